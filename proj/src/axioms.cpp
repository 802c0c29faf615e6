#include "housealloc/axioms.hpp"

#include <algorithm>
#include <set>

#include "housealloc/efficiency.hpp"

namespace housealloc {

SupportRequirements support_requirements(const Ranking& p1, const Ranking& p2,
                                         Relaxation l1, Relaxation l2) {
    if (p1 == p2)
        throw std::invalid_argument("support_requirements: rankings must differ");
    const Ranking* ranks[2] = {&p1, &p2};
    const Relaxation relax[2] = {l1, l2};
    SupportRequirements out;
    for (int i = 0; i < 2; ++i) {
        const Ranking& own = *ranks[i];
        const Ranking& other = *ranks[1 - i];
        for (int k = 0; k + 1 < own.size(); ++k) {
            HousePair pr{own.at(k), own.at(k + 1)};
            out.base[i][pr] = other.prefers(pr.first, pr.second) ? 1 : 2;
        }
        if (relax[i] && !out.base[i].count(*relax[i]))
            throw std::invalid_argument(
                "support_requirements: relaxation pair not adjacent in the ranking");
        out.relaxation[i] = relax[i];
    }
    for (int i = 0; i < 2; ++i) {
        for (const auto& [pr, req] : out.base[i]) {
            int r = req - (out.relaxation[i] == Relaxation(pr) ? 1 : 0);
            auto it = out.combined.find(pr);
            if (it == out.combined.end())
                out.combined[pr] = r;
            else
                it->second = std::max(it->second, r);
        }
    }
    return out;
}

namespace {

int agreers(const Profile& p, int agent, House x, House y) {
    int c = 0;
    for (int j = 0; j < p.agents(); ++j)
        if (j != agent && p.ranking(j).prefers(x, y)) ++c;
    return c;
}

}  // namespace

bool is_supported_agent(const Profile& p, int agent) {
    if (p.agents() != 4)
        throw std::invalid_argument("is_supported_agent: defined for n = 4");
    const Ranking& r = p.ranking(agent);
    const auto analysis = analyze_efficiency(p);
    // relaxation choices: none, or any adjacent pair whose houses are both
    // efficient for the agent
    std::vector<Relaxation> choices{std::nullopt};
    for (int k = 0; k + 1 < r.size(); ++k) {
        House x = r.at(k), y = r.at(k + 1);
        if (analysis.agent_house_efficient(agent, x) &&
            analysis.agent_house_efficient(agent, y))
            choices.emplace_back(HousePair{x, y});
    }
    for (const auto& l : choices) {
        bool ok = true;
        for (int k = 0; k + 1 < r.size() && ok; ++k) {
            HousePair pr{r.at(k), r.at(k + 1)};
            int req = (l == Relaxation(pr)) ? 1 : 2;
            if (agreers(p, agent, pr.first, pr.second) < req) ok = false;
        }
        if (ok) return true;
    }
    return false;
}

std::vector<std::pair<HousePair, int>> support_violations(const Profile& p, int agent) {
    if (p.agents() != 4)
        throw std::invalid_argument("support_violations: defined for n = 4");
    const Ranking& r = p.ranking(agent);
    std::vector<std::pair<HousePair, int>> out;
    for (int k = 0; k + 1 < r.size(); ++k) {
        HousePair pr{r.at(k), r.at(k + 1)};
        int c = agreers(p, agent, pr.first, pr.second);
        if (c < 2) out.emplace_back(pr, c);
    }
    return out;
}

bool is_supported_profile(const Profile& p) {
    if (p.agents() != 4)
        throw std::invalid_argument("is_supported_profile: defined for n = 4");
    std::vector<int> supported;
    for (int i = 0; i < 4; ++i)
        if (is_supported_agent(p, i)) supported.push_back(i);
    for (size_t a = 0; a < supported.size(); ++a)
        for (size_t b = a + 1; b < supported.size(); ++b)
            if (!(p.ranking(supported[a]) == p.ranking(supported[b]))) return true;
    return false;
}

bool is_near_unanimous(const Profile& p) {
    const int n = p.agents(), m = p.houses();
    for (House x = 0; x < m; ++x) {
        for (House y = x + 1; y < m; ++y) {
            int c = 0;
            for (int i = 0; i < n; ++i)
                if (p.ranking(i).prefers(x, y)) ++c;
            if (c > 1 && n - c > 1) return false;
        }
    }
    return true;
}

bool is_degenerate(const Profile& p) {
    std::set<House> tops;
    for (int i = 0; i < p.agents(); ++i) tops.insert(p.ranking(i).at(0));
    return static_cast<int>(tops.size()) == p.agents();
}

std::vector<AxiomConstraint> eta_constraints(const Profile& p) {
    const int n = p.agents(), m = p.houses();
    std::vector<AxiomConstraint> out;
    std::set<std::vector<Cell>> emitted;
    auto emit = [&](std::vector<Cell> cells) {
        std::sort(cells.begin(), cells.end());
        if (cells.size() < 2 || emitted.count(cells)) return;
        emitted.insert(cells);
        out.push_back({AxiomConstraint::Kind::Equality, std::move(cells), Rational(0),
                       std::nullopt});
    };
    // identical-ranking classes, keyed by least member
    std::vector<std::vector<int>> classes;
    std::vector<bool> placed(n, false);
    for (int i = 0; i < n; ++i) {
        if (placed[i]) continue;
        std::vector<int> cls{i};
        for (int j = i + 1; j < n; ++j)
            if (!placed[j] && p.ranking(j) == p.ranking(i)) {
                cls.push_back(j);
                placed[j] = true;
            }
        classes.push_back(std::move(cls));
    }
    for (House h = 0; h < m; ++h)
        for (const auto& cls : classes) {
            if (cls.size() < 2) continue;
            std::vector<Cell> cells;
            for (int i : cls) cells.push_back({i, h});
            emit(std::move(cells));
        }
    // per-house equalization across efficient agents with one shared
    // upper-contour set; valid for square problems only (random serial
    // dictatorship itself violates it when houses outnumber agents)
    if (n != m) return out;
    const auto analysis = analyze_efficiency(p);
    for (House h = 0; h < m; ++h) {
        std::vector<int> eff;
        for (int i = 0; i < n; ++i)
            if (analysis.agent_house_efficient(i, h)) eff.push_back(i);
        if (eff.size() < 2) continue;
        bool same_upper = true;
        const Ranking& r0 = p.ranking(eff[0]);
        const int pos0 = r0.position_of(h);
        for (size_t j = 1; j < eff.size() && same_upper; ++j) {
            const Ranking& rj = p.ranking(eff[j]);
            if (rj.position_of(h) != pos0) {
                same_upper = false;
                break;
            }
            for (int k = 0; k < pos0; ++k)
                if (!rj.prefers(r0.at(k), h)) {
                    same_upper = false;
                    break;
                }
        }
        if (!same_upper) continue;
        std::vector<Cell> cells;
        for (int i : eff) cells.push_back({i, h});
        emit(std::move(cells));
    }
    return out;
}

std::vector<std::pair<AdjacentSwap, Profile>> sp_links(const Profile& p) {
    std::vector<std::pair<AdjacentSwap, Profile>> out;
    out.reserve(p.agents() * (p.houses() - 1));
    for (int i = 0; i < p.agents(); ++i)
        for (int k = 0; k + 1 < p.houses(); ++k) {
            AdjacentSwap s{i, k};
            out.emplace_back(s, apply_swap(p, s));
        }
    return out;
}

}  // namespace housealloc
