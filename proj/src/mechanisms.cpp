#include "housealloc/mechanisms.hpp"

#include <algorithm>
#include <numeric>

#include "housealloc/axioms.hpp"
#include "housealloc/efficiency.hpp"

namespace housealloc {

DeterministicAssignment serial_dictatorship(const Profile& p,
                                            std::span<const int> ordering) {
    const int n = p.agents(), m = p.houses();
    if (n > m) throw std::invalid_argument("serial_dictatorship: requires n <= m");
    if (static_cast<int>(ordering.size()) != n)
        throw std::invalid_argument("serial_dictatorship: ordering size mismatch");
    std::array<bool, kMaxHouses> taken{};
    DeterministicAssignment a;
    a.house_of.assign(n, -1);
    for (int i : ordering) {
        const Ranking& r = p.ranking(i);
        for (int k = 0; k < m; ++k) {
            House h = r.at(k);
            if (!taken[h]) {
                taken[h] = true;
                a.house_of[i] = h;
                break;
            }
        }
    }
    return a;
}

AssignmentMatrix rsd(const Profile& p) {
    const int n = p.agents(), m = p.houses();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<long> counts(n * m, 0);
    long total = 0;
    do {
        auto a = serial_dictatorship(p, order);
        for (int i = 0; i < n; ++i) ++counts[i * m + a.house_of[i]];
        ++total;
    } while (std::next_permutation(order.begin(), order.end()));
    AssignmentMatrix out(n, m);
    for (int i = 0; i < n; ++i)
        for (House h = 0; h < m; ++h) out.at(i, h) = Rational(counts[i * m + h], total);
    return out;
}

bool check_sp(const Mechanism& mech, const Profile& p, const AdjacentSwap& s) {
    const Profile q = apply_swap(p, s);
    const House x = p.ranking(s.agent).at(s.position);
    const House y = p.ranking(s.agent).at(s.position + 1);
    const AssignmentMatrix mp = mech(p), mq = mech(q);
    for (House h = 0; h < p.houses(); ++h) {
        if (h == x || h == y) continue;
        if (mp.at(s.agent, h) != mq.at(s.agent, h)) return false;
    }
    return mp.at(s.agent, x) + mp.at(s.agent, y) ==
           mq.at(s.agent, x) + mq.at(s.agent, y);
}

bool check_eta(const Mechanism& mech, const Profile& p) {
    const AssignmentMatrix M = mech(p);
    for (const auto& c : eta_constraints(p)) {
        if (c.kind != AxiomConstraint::Kind::Equality) continue;
        for (size_t k = 1; k < c.cells.size(); ++k)
            if (M.at(c.cells[k].agent, c.cells[k].house) !=
                M.at(c.cells[0].agent, c.cells[0].house))
                return false;
    }
    return true;
}

bool check_expe(const Mechanism& mech, const Profile& p) {
    return is_expost_efficient(mech(p), p);
}

}  // namespace housealloc
