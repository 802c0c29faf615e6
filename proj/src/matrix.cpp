#include "housealloc/matrix.hpp"

namespace housealloc {

AssignmentMatrix AssignmentMatrix::indicator(const DeterministicAssignment& a, int m) {
    AssignmentMatrix out(a.agents(), m);
    for (int i = 0; i < a.agents(); ++i) out.at(i, a.house_of[i]) = Rational(1);
    return out;
}

Rational AssignmentMatrix::row_sum(int agent) const {
    Rational s;
    for (House h = 0; h < m_; ++h) s += at(agent, h);
    return s;
}

Rational AssignmentMatrix::column_sum(House h) const {
    Rational s;
    for (int i = 0; i < n_; ++i) s += at(i, h);
    return s;
}

bool AssignmentMatrix::satisfies_invariants() const {
    if (n_ < 1 || m_ < n_) return false;
    const Rational zero(0), one(1);
    for (const auto& e : entries_)
        if (e < zero || e > one) return false;
    for (int i = 0; i < n_; ++i)
        if (row_sum(i) != one) return false;
    for (House h = 0; h < m_; ++h) {
        Rational c = column_sum(h);
        if (n_ == m_ ? c != one : c > one) return false;
    }
    return true;
}

AssignmentMatrix AssignmentMatrix::renamed(std::span<const int> agent_perm,
                                           std::span<const int> house_perm) const {
    AssignmentMatrix out(n_, m_);
    for (int i = 0; i < n_; ++i)
        for (House h = 0; h < m_; ++h)
            out.at(agent_perm[i], house_perm[h]) = at(i, h);
    return out;
}

}  // namespace housealloc
