#include "housealloc/verifier.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "housealloc/efficiency.hpp"

namespace housealloc {

std::string outcome_name(Outcome o) {
    switch (o) {
        case Outcome::UniqueEqualsRSD: return "UniqueEqualsRSD";
        case Outcome::UniqueDiffersFromRSD: return "UniqueDiffersFromRSD";
        case Outcome::Underdetermined: return "Underdetermined";
        case Outcome::Infeasible: return "Infeasible";
    }
    return "?";
}

std::string reason_name(CertificateStep::Reason r) {
    switch (r) {
        case CertificateStep::Reason::Efficiency: return "Efficiency";
        case CertificateStep::Reason::Eta: return "ETA";
        case CertificateStep::Reason::SpImport: return "SPImport";
        case CertificateStep::Reason::AgentComplement: return "AgentComplement";
        case CertificateStep::Reason::HouseComplement: return "HouseComplement";
        case CertificateStep::Reason::SolvedJointly: return "SolvedJointly";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// DeterminedDB

void DeterminedDB::record(const Profile& canonical, int agent, House h, Rational value,
                          int round) {
    Slot& slot = slots_[canonical.to_string()];
    if (slot.facts.empty()) slot.facts.assign(n_ * m_, std::nullopt);
    slot.facts[agent * m_ + h] = Fact{std::move(value), round};
}

const DeterminedDB::Slot* DeterminedDB::find(const Profile& q, std::vector<int>& sigma,
                                             std::vector<int>& pi) const {
    CanonicalForm cf = canonicalize(q);
    auto it = slots_.find(cf.representative.to_string());
    if (it == slots_.end()) return nullptr;
    sigma = cf.agent_renaming;
    pi = cf.house_renaming;
    return &it->second;
}

std::optional<Rational> DeterminedDB::entry_for(const Profile& q, int agent, House h) const {
    std::vector<int> sigma, pi;
    const Slot* slot = find(q, sigma, pi);
    if (!slot) return std::nullopt;
    const auto& f = slot->facts[sigma[agent] * m_ + pi[h]];
    if (!f || (horizon_ >= 0 && f->round >= horizon_)) return std::nullopt;
    return f->value;
}

bool DeterminedDB::determined(const Profile& q) const {
    std::vector<int> sigma, pi;
    const Slot* slot = find(q, sigma, pi);
    if (!slot) return false;
    for (const auto& f : slot->facts)
        if (!f || (horizon_ >= 0 && f->round >= horizon_)) return false;
    return true;
}

std::optional<AssignmentMatrix> DeterminedDB::matrix_for(const Profile& q) const {
    std::vector<int> sigma, pi;
    const Slot* slot = find(q, sigma, pi);
    if (!slot) return std::nullopt;
    AssignmentMatrix out(n_, m_);
    for (int i = 0; i < n_; ++i) {
        for (House h = 0; h < m_; ++h) {
            const auto& f = slot->facts[sigma[i] * m_ + pi[h]];
            if (!f || (horizon_ >= 0 && f->round >= horizon_)) return std::nullopt;
            out.at(i, h) = f->value;
        }
    }
    return out;
}

std::optional<int> DeterminedDB::round_for(const Profile& q) const {
    std::vector<int> sigma, pi;
    const Slot* slot = find(q, sigma, pi);
    if (!slot) return std::nullopt;
    int r = 0;
    for (const auto& f : slot->facts) {
        if (!f || (horizon_ >= 0 && f->round >= horizon_)) return std::nullopt;
        r = std::max(r, f->round);
    }
    return r;
}

// ---------------------------------------------------------------------------
// constraint assembly

namespace {

LinearSystem assemble(const Profile& p, const EfficiencyProfileAnalysis& analysis,
                      const std::vector<AxiomConstraint>& eta,
                      const std::vector<std::pair<Cell, Rational>>& pins,
                      const std::vector<std::pair<std::array<Cell, 2>, Rational>>& pair_sums) {
    const int n = p.agents(), m = p.houses();
    LinearSystem sys(n * m);
    auto var = [m](const Cell& c) { return c.agent * m + c.house; };
    for (int i = 0; i < n; ++i)
        for (House h = 0; h < m; ++h)
            if (analysis.forced_zero[i][h])
                sys.add_equality({{i * m + h, Rational(1)}}, Rational(0));
    for (const auto& c : eta) {
        if (c.kind != AxiomConstraint::Kind::Equality) continue;
        for (size_t k = 1; k < c.cells.size(); ++k)
            sys.add_equality({{var(c.cells[0]), Rational(1)}, {var(c.cells[k]), Rational(-1)}},
                             Rational(0));
    }
    for (const auto& [cell, val] : pins)
        sys.add_equality({{var(cell), Rational(1)}}, val);
    for (const auto& [cells, val] : pair_sums)
        sys.add_equality({{var(cells[0]), Rational(1)}, {var(cells[1]), Rational(1)}}, val);
    for (int i = 0; i < n; ++i) {
        std::vector<LinearTerm> row;
        for (House h = 0; h < m; ++h) row.push_back({i * m + h, Rational(1)});
        sys.add_equality(std::move(row), Rational(1));
    }
    if (n == m) {
        for (House h = 0; h < m; ++h) {
            std::vector<LinearTerm> col;
            for (int i = 0; i < n; ++i) col.push_back({i * m + h, Rational(1)});
            sys.add_equality(std::move(col), Rational(1));
        }
    }
    return sys;
}

}  // namespace

LinearSystem build_constraints(const Profile& p, const DeterminedDB& db) {
    const int m = p.houses();
    std::vector<std::pair<Cell, Rational>> pins;
    std::vector<std::pair<std::array<Cell, 2>, Rational>> pair_sums;
    for (const auto& [swap, q] : sp_links(p)) {
        const int i = swap.agent;
        const House x = p.ranking(i).at(swap.position);
        const House y = p.ranking(i).at(swap.position + 1);
        for (House h = 0; h < m; ++h) {
            if (h == x || h == y) continue;
            if (auto v = db.entry_for(q, i, h)) pins.push_back({{i, h}, *v});
        }
        auto vx = db.entry_for(q, i, x), vy = db.entry_for(q, i, y);
        if (vx && vy)
            pair_sums.push_back({{Cell{i, x}, Cell{i, y}}, *vx + *vy});
    }
    return assemble(p, analyze_efficiency(p), eta_constraints(p), pins, pair_sums);
}

// ---------------------------------------------------------------------------
// engine

namespace {

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::string> errors(threads);
    auto worker = [&](int t) {
        try {
            for (int i; (i = next.fetch_add(1)) < count;) fn(i);
        } catch (const std::exception& e) {
            errors[t] = e.what();
            next.store(count);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
        if (!e.empty()) throw std::runtime_error(e);
}

using Ids = std::array<std::uint8_t, kMaxAgents>;

struct Link {
    AdjacentSwap swap;
    House x, y;       // pre-swap pair
    int target;       // rep index
    std::vector<int> sigma, pi;  // canonicalizing renaming of the neighbor profile
};

struct Rep {
    Profile profile;
    Ids ids{};
    std::uint64_t index = 0;
    std::uint32_t orbit_size = 0;
    int level = 0;
    std::optional<bool> supported;
    bool near_unanimous = false, degenerate = false;
    EfficiencyProfileAnalysis analysis;
    std::vector<AxiomConstraint> eta;
    AssignmentMatrix rsd_matrix;
    std::vector<Link> links;

    std::vector<std::optional<Rational>> fact;
    std::vector<int> fact_round;
    int entries_known = 0;
    int finalize_round = 0;
    bool infeasible = false;
    bool rsd_violates_system = false;
};

struct Engine {
    int n, m, R;
    std::vector<Ranking> rks;
    std::vector<std::vector<int>> agent_perms, house_perms;
    std::vector<std::vector<int>> hp_table;  // [house perm][rank id] -> rank id
    std::vector<std::vector<int>> swap_table;  // [position][rank id] -> rank id
    std::vector<Rep> reps;
    std::vector<std::int32_t> rep_of;  // profile index -> rep index (orbit map)

    std::uint64_t index_of(const Ids& ids) const {
        std::uint64_t ix = 0;
        for (int i = 0; i < n; ++i) ix = ix * R + ids[i];
        return ix;
    }

    Profile profile_of(const Ids& ids) const {
        std::vector<Ranking> v;
        v.reserve(n);
        for (int i = 0; i < n; ++i) v.push_back(rks[ids[i]]);
        return Profile(std::move(v));
    }

    // lexicographically least renamed id tuple with one witnessing renaming
    void canonicalize_ids(const Ids& ids, Ids& best, int& sigma_ix, int& pi_ix) const {
        bool first = true;
        Ids cand{};
        for (size_t si = 0; si < agent_perms.size(); ++si) {
            const auto& sigma = agent_perms[si];
            for (size_t hi = 0; hi < house_perms.size(); ++hi) {
                const auto& tbl = hp_table[hi];
                for (int i = 0; i < n; ++i)
                    cand[sigma[i]] = static_cast<std::uint8_t>(tbl[ids[i]]);
                bool better = first;
                if (!first) {
                    for (int i = 0; i < n; ++i) {
                        if (cand[i] != best[i]) {
                            better = cand[i] < best[i];
                            break;
                        }
                    }
                }
                if (better) {
                    best = cand;
                    sigma_ix = static_cast<int>(si);
                    pi_ix = static_cast<int>(hi);
                    first = false;
                }
            }
        }
    }
};

std::unique_ptr<Engine> make_engine(int n, int m, int threads,
                                    const std::function<void(const std::string&)>& progress) {
    auto eng = std::make_unique<Engine>();
    eng->n = n;
    eng->m = m;
    eng->rks = enumerate_rankings(m);
    eng->R = static_cast<int>(eng->rks.size());
    eng->agent_perms = all_permutations(n);
    eng->house_perms = all_permutations(m);

    eng->hp_table.assign(eng->house_perms.size(), std::vector<int>(eng->R));
    std::array<House, kMaxHouses> buf{};
    for (size_t hi = 0; hi < eng->house_perms.size(); ++hi) {
        for (int r = 0; r < eng->R; ++r) {
            for (int k = 0; k < m; ++k) buf[k] = eng->house_perms[hi][eng->rks[r].at(k)];
            eng->hp_table[hi][r] =
                ranking_lex_rank(Ranking::of(std::span<const House>(buf.data(), m)));
        }
    }
    eng->swap_table.assign(m - 1, std::vector<int>(eng->R));
    for (int k = 0; k + 1 < m; ++k)
        for (int r = 0; r < eng->R; ++r)
            eng->swap_table[k][r] = ranking_lex_rank(eng->rks[r].with_swap(k));

    const std::uint64_t total = profile_space_size(n, m);
    eng->rep_of.assign(total, -1);

    // orbit scan in index order: the first unmarked profile of each orbit is
    // its lexicographic minimum, hence the canonical representative
    std::vector<std::uint64_t> orbit;
    for (std::uint64_t ix = 0; ix < total; ++ix) {
        if (eng->rep_of[ix] >= 0) continue;
        Ids ids{};
        std::uint64_t t = ix;
        for (int i = n - 1; i >= 0; --i) {
            ids[i] = static_cast<std::uint8_t>(t % eng->R);
            t /= eng->R;
        }
        orbit.clear();
        Ids cand{};
        for (const auto& sigma : eng->agent_perms) {
            for (size_t hi = 0; hi < eng->house_perms.size(); ++hi) {
                for (int i = 0; i < n; ++i)
                    cand[sigma[i]] = static_cast<std::uint8_t>(eng->hp_table[hi][ids[i]]);
                orbit.push_back(eng->index_of(cand));
            }
        }
        std::sort(orbit.begin(), orbit.end());
        orbit.erase(std::unique(orbit.begin(), orbit.end()), orbit.end());
        const int rep_ix = static_cast<int>(eng->reps.size());
        for (std::uint64_t o : orbit) eng->rep_of[o] = rep_ix;
        Rep rep;
        rep.ids = ids;
        rep.index = ix;
        rep.orbit_size = static_cast<std::uint32_t>(orbit.size());
        eng->reps.push_back(std::move(rep));
    }

    // per-representative precomputation
    parallel_for(static_cast<int>(eng->reps.size()), threads, [&](int ri) {
        Rep& rep = eng->reps[ri];
        rep.profile = eng->profile_of(rep.ids);
        rep.level = disagreement_parameter(rep.profile);
        rep.near_unanimous = is_near_unanimous(rep.profile);
        rep.degenerate = is_degenerate(rep.profile);
        if (n == 4) rep.supported = is_supported_profile(rep.profile);
        rep.analysis = analyze_efficiency(rep.profile);
        rep.eta = eta_constraints(rep.profile);
        rep.rsd_matrix = rsd(rep.profile);
        rep.fact.assign(n * m, std::nullopt);
        rep.fact_round.assign(n * m, 0);
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k + 1 < m; ++k) {
                Link lk;
                lk.swap = {i, k};
                lk.x = rep.profile.ranking(i).at(k);
                lk.y = rep.profile.ranking(i).at(k + 1);
                Ids nb = rep.ids;
                nb[i] = static_cast<std::uint8_t>(eng->swap_table[k][nb[i]]);
                Ids best{};
                int sigma_ix = 0, pi_ix = 0;
                eng->canonicalize_ids(nb, best, sigma_ix, pi_ix);
                lk.target = eng->rep_of[eng->index_of(best)];
                lk.sigma = eng->agent_perms[sigma_ix];
                lk.pi = eng->house_perms[pi_ix];
                rep.links.push_back(std::move(lk));
            }
        }
    });
    if (progress) {
        std::ostringstream os;
        os << "canonical representatives: " << eng->reps.size() << " (of " << total
           << " profiles)";
        progress(os.str());
    }
    return eng;
}

struct RoundResult {
    std::vector<std::pair<int, Rational>> pins;  // (var, value)
    bool infeasible = false;
    bool rsd_violates = false;
    int affine_dim = 0;
};

RoundResult solve_rep(const Engine& eng, const Rep& rep, int round, bool probe) {
    const int n = eng.n, m = eng.m;
    RoundResult res;
    std::vector<std::pair<Cell, Rational>> pins;
    std::vector<std::pair<std::array<Cell, 2>, Rational>> pair_sums;
    // own facts from earlier rounds
    for (int v = 0; v < n * m; ++v)
        if (rep.fact[v] && rep.fact_round[v] < round)
            pins.push_back({{v / m, v % m}, *rep.fact[v]});
    // imports from neighbors' facts of earlier rounds
    for (const auto& lk : rep.links) {
        const Rep& src = eng.reps[lk.target];
        const int i = lk.swap.agent;
        auto src_entry = [&](House h) -> const std::optional<Rational>* {
            const int v = lk.sigma[i] * m + lk.pi[h];
            if (src.fact[v] && src.fact_round[v] < round) return &src.fact[v];
            return nullptr;
        };
        for (House h = 0; h < m; ++h) {
            if (h == lk.x || h == lk.y) continue;
            if (auto* v = src_entry(h)) pins.push_back({{i, h}, **v});
        }
        auto* vx = src_entry(lk.x);
        auto* vy = src_entry(lk.y);
        if (vx && vy)
            pair_sums.push_back({{Cell{i, lk.x}, Cell{i, lk.y}}, **vx + **vy});
    }
    LinearSystem sys = assemble(rep.profile, rep.analysis, rep.eta, pins, pair_sums);
    if (!sys.satisfied_by(rep.rsd_matrix.entries())) {
        res.rsd_violates = true;
        return res;
    }
    SolveOutcome out = solve(sys, {.box_probe = probe});
    if (out.kind == SolveOutcome::Kind::Infeasible) {
        res.infeasible = true;
        return res;
    }
    res.affine_dim = out.affine_dim;
    for (int v = 0; v < n * m; ++v)
        if (out.pinned[v] && !rep.fact[v]) res.pins.push_back({v, *out.pinned[v]});
    return res;
}

// --- certificate construction and shared replay rules -----------------------

struct RuleState {
    const Profile& p;
    const EfficiencyProfileAnalysis& analysis;
    const std::vector<AxiomConstraint>& eta;
    // full matrices of determined swap neighbors, in sp_links order
    std::vector<std::optional<AssignmentMatrix>> sources;
    std::vector<std::pair<AdjacentSwap, Profile>> links;
    std::vector<std::optional<Rational>> pinned;
    int n, m;

    RuleState(const Profile& prof, const EfficiencyProfileAnalysis& an,
              const std::vector<AxiomConstraint>& e)
        : p(prof), analysis(an), eta(e), n(prof.agents()), m(prof.houses()) {
        links = sp_links(p);
        pinned.assign(n * m, std::nullopt);
    }
    int var(const Cell& c) const { return c.agent * m + c.house; }
};

// One deterministic sweep; local reasoning first, neighbor imports last, so
// certificates prefer the profile's own structure over cross-profile cites.
bool certificate_sweep(RuleState& st, std::vector<CertificateStep>& steps) {
    bool progress = false;
    auto pin = [&](const Cell& c, Rational v, CertificateStep step) {
        st.pinned[st.var(c)] = std::move(v);
        step.cell = c;
        steps.push_back(std::move(step));
        progress = true;
    };
    // equal-treatment groups: copy from a pinned member, or distribute a
    // column remainder over a fully unpinned group
    for (size_t gi = 0; gi < st.eta.size(); ++gi) {
        const auto& g = st.eta[gi];
        if (g.kind != AxiomConstraint::Kind::Equality) continue;
        CertificateStep base;
        base.reason = CertificateStep::Reason::Eta;
        base.eta_id = static_cast<int>(gi);
        const Rational* known = nullptr;
        for (const auto& c : g.cells)
            if (st.pinned[st.var(c)]) {
                known = &*st.pinned[st.var(c)];
                break;
            }
        if (known) {
            Rational v = *known;
            for (const auto& c : g.cells)
                if (!st.pinned[st.var(c)]) pin(c, v, base);
            continue;
        }
        if (st.n != st.m) continue;
        const House h = g.cells[0].house;
        Rational rest;
        bool outside_all_pinned = true;
        for (int i = 0; i < st.n && outside_all_pinned; ++i) {
            if (std::any_of(g.cells.begin(), g.cells.end(),
                            [&](const Cell& c) { return c.agent == i; }))
                continue;
            if (st.pinned[i * st.m + h])
                rest += *st.pinned[i * st.m + h];
            else
                outside_all_pinned = false;
        }
        if (!outside_all_pinned) continue;
        Rational v = (Rational(1) - rest) / Rational(static_cast<long>(g.cells.size()));
        for (const auto& c : g.cells) pin(c, v, base);
    }
    // complement a lone unknown in a row, then in a column
    for (int i = 0; i < st.n; ++i) {
        int missing = -1, cnt = 0;
        Rational s;
        for (House h = 0; h < st.m; ++h) {
            if (st.pinned[i * st.m + h])
                s += *st.pinned[i * st.m + h];
            else {
                missing = h;
                ++cnt;
            }
        }
        if (cnt == 1) {
            CertificateStep step;
            step.reason = CertificateStep::Reason::AgentComplement;
            pin({i, missing}, Rational(1) - s, step);
        }
    }
    if (st.n == st.m) {
        for (House h = 0; h < st.m; ++h) {
            int missing = -1, cnt = 0;
            Rational s;
            for (int i = 0; i < st.n; ++i) {
                if (st.pinned[i * st.m + h])
                    s += *st.pinned[i * st.m + h];
                else {
                    missing = i;
                    ++cnt;
                }
            }
            if (cnt == 1) {
                CertificateStep step;
                step.reason = CertificateStep::Reason::HouseComplement;
                pin({missing, h}, Rational(1) - s, step);
            }
        }
    }
    if (progress) return true;
    // swap-neighbor imports from determined profiles
    for (size_t li = 0; li < st.links.size(); ++li) {
        if (!st.sources[li]) continue;
        const auto& [swap, q] = st.links[li];
        const AssignmentMatrix& src = *st.sources[li];
        const int i = swap.agent;
        const House x = st.p.ranking(i).at(swap.position);
        const House y = st.p.ranking(i).at(swap.position + 1);
        CertificateStep base;
        base.reason = CertificateStep::Reason::SpImport;
        base.import_from = SpSource{q, swap};
        base.source_level = disagreement_parameter(q);
        for (House h = 0; h < st.m; ++h) {
            if (h == x || h == y) continue;
            if (!st.pinned[i * st.m + h]) pin({i, h}, src.at(i, h), base);
        }
        const Rational s = src.at(i, x) + src.at(i, y);
        auto px = st.pinned[i * st.m + x], py = st.pinned[i * st.m + y];
        if (s.is_zero()) {
            if (!px) pin({i, x}, Rational(0), base);
            if (!py) pin({i, y}, Rational(0), base);
        } else if (px && !py) {
            pin({i, y}, s - *px, base);
        } else if (py && !px) {
            pin({i, x}, s - *py, base);
        }
        if (progress) return true;  // retry local rules before the next import
    }
    return progress;
}

DeterminationCertificate build_certificate(
    const Profile& p, const EfficiencyProfileAnalysis& analysis,
    const std::vector<AxiomConstraint>& eta, const AssignmentMatrix& final_matrix,
    int finalize_round,
    const std::function<std::optional<AssignmentMatrix>(const Profile&)>& source_matrix) {
    RuleState st(p, analysis, eta);
    DeterminationCertificate cert;
    cert.profile = p;
    cert.final_matrix = final_matrix;
    st.sources.reserve(st.links.size());
    for (const auto& [swap, q] : st.links) st.sources.push_back(source_matrix(q));

    for (int i = 0; i < st.n; ++i)
        for (House h = 0; h < st.m; ++h)
            if (analysis.forced_zero[i][h]) {
                CertificateStep step;
                step.cell = {i, h};
                step.reason = CertificateStep::Reason::Efficiency;
                st.pinned[i * st.m + h] = Rational(0);
                cert.steps.push_back(step);
            }
    while (certificate_sweep(st, cert.steps)) {
    }
    for (int v = 0; v < st.n * st.m; ++v) {
        if (st.pinned[v]) continue;
        CertificateStep step;
        step.cell = {v / st.m, v % st.m};
        step.reason = CertificateStep::Reason::SolvedJointly;
        step.system_id = finalize_round;
        cert.steps.push_back(step);
        st.pinned[v] = final_matrix.at(v / st.m, v % st.m);
    }
    // a sound derivation can only reproduce the determined matrix
    for (int i = 0; i < st.n; ++i)
        for (House h = 0; h < st.m; ++h)
            if (*st.pinned[i * st.m + h] != final_matrix.at(i, h))
                throw std::logic_error("certificate derivation diverged from final matrix");
    return cert;
}

}  // namespace

// ---------------------------------------------------------------------------
// verify_theorem

VerificationReport verify_theorem(int n, int m, const VerifyOptions& opts) {
    if (n < 1 || n > m || m > kMaxHouses || n > kMaxAgents)
        throw std::invalid_argument("verify_theorem: requires 1 <= n <= m <= 6");
    int threads = opts.threads > 0 ? opts.threads
                                   : static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    auto eng = make_engine(n, m, threads, opts.progress);
    const int nreps = static_cast<int>(eng->reps.size());

    // global fixpoint: each round reads only facts of strictly earlier rounds
    std::vector<int> order(nreps);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return eng->reps[a].level < eng->reps[b].level;
    });
    std::vector<char> dirty(nreps, 1);
    bool probe = false;
    int round = 0;
    int max_round = 0;
    while (true) {
        ++round;
        std::vector<int> tasks;
        for (int ri : order)
            if (eng->reps[ri].entries_known < n * m && dirty[ri]) tasks.push_back(ri);
        std::fill(dirty.begin(), dirty.end(), 0);
        std::vector<RoundResult> results(tasks.size());
        parallel_for(static_cast<int>(tasks.size()), threads, [&](int t) {
            results[t] = solve_rep(*eng, eng->reps[tasks[t]], round, probe);
        });
        std::uint64_t new_entries = 0;
        for (size_t t = 0; t < tasks.size(); ++t) {
            Rep& rep = eng->reps[tasks[t]];
            if (results[t].infeasible) rep.infeasible = true;
            if (results[t].rsd_violates) rep.rsd_violates_system = true;
            if (results[t].pins.empty()) continue;
            for (auto& [v, val] : results[t].pins) {
                rep.fact[v] = std::move(val);
                rep.fact_round[v] = round;
                ++rep.entries_known;
                ++new_entries;
            }
            if (rep.entries_known == n * m) rep.finalize_round = round;
            for (const auto& lk : rep.links) dirty[lk.target] = 1;
        }
        if (new_entries > 0) max_round = round;
        if (opts.progress) {
            std::ostringstream os;
            os << "round " << round << (probe ? " (box probe)" : "") << ": " << tasks.size()
               << " profiles solved, " << new_entries << " entries pinned";
            opts.progress(os.str());
        }
        if (new_entries == 0) {
            if (probe) break;
            probe = true;  // one escalated sweep before giving up
            for (int ri : order)
                if (eng->reps[ri].entries_known < n * m) dirty[ri] = 1;
            bool any = std::any_of(dirty.begin(), dirty.end(), [](char c) { return c != 0; });
            if (!any) break;
        } else {
            probe = false;
        }
    }

    // final classification
    std::vector<Outcome> outcomes(nreps);
    std::vector<int> dims(nreps, 0);
    parallel_for(nreps, threads, [&](int ri) {
        Rep& rep = eng->reps[ri];
        if (rep.rsd_violates_system || rep.infeasible) {
            outcomes[ri] = Outcome::Infeasible;
            return;
        }
        if (rep.entries_known == n * m) {
            bool equals = true;
            for (int v = 0; v < n * m && equals; ++v)
                equals = (*rep.fact[v] == rep.rsd_matrix.entries()[v]);
            outcomes[ri] = equals ? Outcome::UniqueEqualsRSD : Outcome::UniqueDiffersFromRSD;
            return;
        }
        RoundResult final_try = solve_rep(*eng, rep, round + 1, true);
        if (final_try.infeasible || final_try.rsd_violates) {
            outcomes[ri] = Outcome::Infeasible;
            return;
        }
        outcomes[ri] = Outcome::Underdetermined;
        dims[ri] = final_try.affine_dim;
    });

    // certificates for determined profiles
    std::vector<DeterminationCertificate> certs(nreps);
    parallel_for(nreps, threads, [&](int ri) {
        Rep& rep = eng->reps[ri];
        if (rep.entries_known != n * m) return;
        AssignmentMatrix M(n, m);
        for (int v = 0; v < n * m; ++v) M.at(v / m, v % m) = *rep.fact[v];
        auto source_matrix = [&](const Profile& q) -> std::optional<AssignmentMatrix> {
            Ids ids{};
            for (int i = 0; i < n; ++i)
                ids[i] = static_cast<std::uint8_t>(ranking_lex_rank(q.ranking(i)));
            Ids best{};
            int sigma_ix = 0, pi_ix = 0;
            eng->canonicalize_ids(ids, best, sigma_ix, pi_ix);
            const Rep& src = eng->reps[eng->rep_of[eng->index_of(best)]];
            if (src.entries_known != n * m) return std::nullopt;
            const auto& sigma = eng->agent_perms[sigma_ix];
            const auto& pi = eng->house_perms[pi_ix];
            AssignmentMatrix out(n, m);
            for (int i = 0; i < n; ++i)
                for (House h = 0; h < m; ++h)
                    out.at(i, h) = *src.fact[sigma[i] * m + pi[h]];
            return out;
        };
        certs[ri] = build_certificate(rep.profile, rep.analysis, rep.eta, M,
                                      rep.finalize_round, source_matrix);
    });

    // assemble the report
    VerificationReport report;
    report.n = n;
    report.m = m;
    report.total_profiles = profile_space_size(n, m);
    report.max_round = max_round;
    auto db = std::make_shared<DeterminedDB>(n, m);
    for (const Rep& rep : eng->reps)
        for (int v = 0; v < n * m; ++v)
            if (rep.fact[v]) db->record(rep.profile, v / m, v % m, *rep.fact[v],
                                        rep.fact_round[v]);
    report.db = db;
    report.records.reserve(nreps);
    for (int ri : order) {
        const Rep& rep = eng->reps[ri];
        ProfileRecord rec;
        rec.profile = rep.profile;
        rec.orbit_size = rep.orbit_size;
        rec.level = rep.level;
        rec.supported = rep.supported;
        rec.near_unanimous = rep.near_unanimous;
        rec.degenerate = rep.degenerate;
        rec.outcome = outcomes[ri];
        rec.round = rep.finalize_round;
        rec.underdetermined_dim = dims[ri];
        rec.matrix_entries.assign(rep.fact.begin(), rep.fact.end());
        rec.certificate = certs[ri];
        switch (rec.outcome) {
            case Outcome::UniqueEqualsRSD: ++report.count_unique_equals_rsd; break;
            case Outcome::UniqueDiffersFromRSD: ++report.count_unique_differs; break;
            case Outcome::Underdetermined: ++report.count_underdetermined; break;
            case Outcome::Infeasible: ++report.count_infeasible; break;
        }
        report.records.push_back(std::move(rec));
    }
    return report;
}

// ---------------------------------------------------------------------------
// certify / replay

DeterminationCertificate certify(const Profile& p, const DeterminedDB& db) {
    auto M = db.matrix_for(p);
    if (!M) throw std::invalid_argument("certify: profile not determined");
    auto rnd = db.round_for(p);
    auto source_matrix = [&](const Profile& q) { return db.matrix_for(q); };
    return build_certificate(p, analyze_efficiency(p), eta_constraints(p), *M,
                             rnd.value_or(0), source_matrix);
}

bool replay_certificate(const DeterminationCertificate& cert, const DeterminedDB& db,
                        std::string* diagnostic) {
    auto fail = [&](const std::string& why) {
        if (diagnostic) *diagnostic = why;
        return false;
    };
    const Profile& p = cert.profile;
    const int n = p.agents(), m = p.houses();
    if (cert.final_matrix.agents() != n || cert.final_matrix.houses() != m)
        return fail("final matrix shape mismatch");
    const auto analysis = analyze_efficiency(p);
    const auto eta = eta_constraints(p);
    std::vector<std::optional<Rational>> pinned(n * m);
    auto var = [m](const Cell& c) { return c.agent * m + c.house; };
    std::vector<const CertificateStep*> joint;

    for (const auto& step : cert.steps) {
        const Cell& c = step.cell;
        if (c.agent < 0 || c.agent >= n || c.house < 0 || c.house >= m)
            return fail("step cell out of range");
        if (pinned[var(c)]) return fail("entry pinned twice");
        Rational value;
        switch (step.reason) {
            case CertificateStep::Reason::Efficiency:
                if (!analysis.forced_zero[c.agent][c.house])
                    return fail("Efficiency step on a non-forced-zero entry");
                value = Rational(0);
                break;
            case CertificateStep::Reason::Eta: {
                if (step.eta_id < 0 || step.eta_id >= static_cast<int>(eta.size()))
                    return fail("ETA step with unknown constraint id");
                const auto& g = eta[step.eta_id];
                if (std::find(g.cells.begin(), g.cells.end(), c) == g.cells.end())
                    return fail("ETA step cell not in the cited constraint");
                const Rational* known = nullptr;
                for (const auto& gc : g.cells)
                    if (pinned[var(gc)]) {
                        known = &*pinned[var(gc)];
                        break;
                    }
                if (known) {
                    value = *known;
                } else {
                    if (n != m) return fail("ETA column distribution needs n == m");
                    Rational rest;
                    for (int i = 0; i < n; ++i) {
                        if (std::any_of(g.cells.begin(), g.cells.end(),
                                        [&](const Cell& gc) { return gc.agent == i; }))
                            continue;
                        const auto& pv = pinned[i * m + c.house];
                        if (!pv) return fail("ETA column distribution with open column");
                        rest += *pv;
                    }
                    value = (Rational(1) - rest) / Rational(static_cast<long>(g.cells.size()));
                }
                break;
            }
            case CertificateStep::Reason::SpImport: {
                if (!step.import_from) return fail("SPImport step without source");
                const Profile& q = step.import_from->source;
                const AdjacentSwap& s = step.import_from->swap;
                if (s.agent != c.agent) return fail("SPImport step for a non-swapping agent");
                Profile expect(q);
                try {
                    expect = apply_swap(p, s);
                } catch (const std::exception&) {
                    return fail("SPImport with invalid swap");
                }
                if (!(expect == q)) return fail("SPImport source is not the named neighbor");
                if (step.source_level != disagreement_parameter(q))
                    return fail("SPImport source level mismatch");
                auto src = db.matrix_for(q);
                if (!src) return fail("dangling SPImport reference: " + q.to_string());
                const House x = p.ranking(s.agent).at(s.position);
                const House y = p.ranking(s.agent).at(s.position + 1);
                if (c.house != x && c.house != y) {
                    value = src->at(c.agent, c.house);
                } else {
                    const Rational sum = src->at(c.agent, x) + src->at(c.agent, y);
                    const House other = (c.house == x) ? y : x;
                    if (sum.is_zero())
                        value = Rational(0);
                    else if (pinned[c.agent * m + other])
                        value = sum - *pinned[c.agent * m + other];
                    else
                        return fail("SPImport pair value without its partner");
                }
                break;
            }
            case CertificateStep::Reason::AgentComplement: {
                Rational sum;
                for (House h = 0; h < m; ++h) {
                    if (h == c.house) continue;
                    const auto& pv = pinned[c.agent * m + h];
                    if (!pv) return fail("AgentComplement with open row");
                    sum += *pv;
                }
                value = Rational(1) - sum;
                break;
            }
            case CertificateStep::Reason::HouseComplement: {
                if (n != m) return fail("HouseComplement needs n == m");
                Rational sum;
                for (int i = 0; i < n; ++i) {
                    if (i == c.agent) continue;
                    const auto& pv = pinned[i * m + c.house];
                    if (!pv) return fail("HouseComplement with open column");
                    sum += *pv;
                }
                value = Rational(1) - sum;
                break;
            }
            case CertificateStep::Reason::SolvedJointly:
                joint.push_back(&step);
                pinned[var(c)] = cert.final_matrix.at(c.agent, c.house);  // placeholder
                continue;
        }
        pinned[var(c)] = value;
    }

    if (!joint.empty()) {
        // re-solve the residual axiom system: zeros, equal treatment, sums,
        // neighbor imports from the database, and the step-pinned entries
        for (const auto* step : joint) pinned[var(step->cell)] = std::nullopt;
        std::vector<std::pair<Cell, Rational>> pins;
        for (int v = 0; v < n * m; ++v)
            if (pinned[v]) pins.push_back({{v / m, v % m}, *pinned[v]});
        LinearSystem base = build_constraints(p, db);
        LinearSystem sys(n * m);
        for (const auto& row : base.rows()) {
            auto terms = row.terms;
            sys.add_equality(std::move(terms), row.rhs);
        }
        for (const auto& [cell, val] : pins)
            sys.add_equality({{var(cell), Rational(1)}}, val);
        SolveOutcome out = solve(sys);
        for (const auto* step : joint) {
            const int v = var(step->cell);
            if (!out.pinned[v]) return fail("SolvedJointly entry not pinned by the system");
            pinned[v] = *out.pinned[v];
        }
    }

    for (int v = 0; v < n * m; ++v) {
        if (!pinned[v]) return fail("replay leaves an entry unpinned");
        if (*pinned[v] != cert.final_matrix.entries()[v])
            return fail("replayed value differs from final matrix");
    }
    if (!cert.final_matrix.satisfies_invariants())
        return fail("final matrix violates assignment-matrix invariants");
    return true;
}

// ---------------------------------------------------------------------------
// serialization

namespace {

nlohmann::ordered_json step_to_json(const CertificateStep& s) {
    nlohmann::ordered_json j;
    j["agent"] = s.cell.agent + 1;  // 1-indexed in reports
    j["house"] = std::string(1, house_letter(s.cell.house));
    j["reason"] = reason_name(s.reason);
    if (s.reason == CertificateStep::Reason::Eta) j["id"] = s.eta_id;
    if (s.reason == CertificateStep::Reason::SpImport) {
        j["source"] = s.import_from->source.to_string();
        j["swap_agent"] = s.import_from->swap.agent + 1;
        j["swap_pos"] = s.import_from->swap.position;
        j["source_D"] = s.source_level;
    }
    if (s.reason == CertificateStep::Reason::SolvedJointly) j["system"] = s.system_id;
    return j;
}

}  // namespace

std::string VerificationReport::to_jsonl() const {
    std::ostringstream os;
    for (const auto& rec : records) {
        nlohmann::ordered_json j;
        j["profile"] = rec.profile.to_string();
        j["D"] = rec.level;
        if (rec.supported)
            j["supported"] = *rec.supported;
        else
            j["supported"] = nullptr;
        j["near_unanimous"] = rec.near_unanimous;
        j["degenerate"] = rec.degenerate;
        j["orbit_size"] = rec.orbit_size;
        j["outcome"] = outcome_name(rec.outcome);
        j["round"] = rec.round;
        if (rec.outcome == Outcome::Underdetermined) j["dim"] = rec.underdetermined_dim;
        nlohmann::ordered_json mat;
        mat["n"] = n;
        mat["m"] = m;
        nlohmann::ordered_json entries = nlohmann::ordered_json::array();
        for (const auto& e : rec.matrix_entries) {
            if (e)
                entries.push_back(e->to_string());
            else
                entries.push_back(nullptr);
        }
        mat["entries"] = std::move(entries);
        j["matrix"] = std::move(mat);
        nlohmann::ordered_json cert = nlohmann::ordered_json::array();
        for (const auto& s : rec.certificate.steps) cert.push_back(step_to_json(s));
        j["certificate"] = std::move(cert);
        os << j.dump() << '\n';
    }
    return os.str();
}

std::string VerificationReport::summary_csv() const {
    std::map<int, std::array<std::uint64_t, 4>> by_level;  // profiles, unique, under, infeas
    std::map<int, int> level_round;
    for (const auto& rec : records) {
        auto& row = by_level[rec.level];
        ++row[0];
        switch (rec.outcome) {
            case Outcome::UniqueEqualsRSD:
            case Outcome::UniqueDiffersFromRSD: ++row[1]; break;
            case Outcome::Underdetermined: ++row[2]; break;
            case Outcome::Infeasible: ++row[3]; break;
        }
        auto& mr = level_round[rec.level];
        mr = std::max(mr, rec.round);
    }
    std::ostringstream os;
    os << "level,profiles,unique,underdetermined,infeasible,max_round\n";
    for (const auto& [lvl, row] : by_level)
        os << lvl << ',' << row[0] << ',' << row[1] << ',' << row[2] << ',' << row[3] << ','
           << level_round[lvl] << '\n';
    return os.str();
}

}  // namespace housealloc
