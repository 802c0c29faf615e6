#pragma once

#include <vector>

#include "housealloc/prefs.hpp"
#include "housealloc/rational.hpp"

namespace housealloc {

// An agent's deterministic allocation: house_of[i] is agent i's house.
// Injective; total over agents (requires n <= m).
struct DeterministicAssignment {
    std::vector<House> house_of;

    int agents() const { return static_cast<int>(house_of.size()); }
    friend bool operator==(const DeterministicAssignment&,
                           const DeterministicAssignment&) = default;
};

// n x m matrix of probabilities: entry (i, h) is agent i's probability of
// receiving house h. Rows sum to 1; columns sum to 1 when n = m, else <= 1.
class AssignmentMatrix {
public:
    AssignmentMatrix() = default;
    AssignmentMatrix(int n, int m) : n_(n), m_(m), entries_(n * m) {}

    static AssignmentMatrix indicator(const DeterministicAssignment& a, int m);

    int agents() const { return n_; }
    int houses() const { return m_; }

    const Rational& at(int agent, House h) const { return entries_[agent * m_ + h]; }
    Rational& at(int agent, House h) { return entries_[agent * m_ + h]; }

    const std::vector<Rational>& entries() const { return entries_; }

    Rational row_sum(int agent) const;
    Rational column_sum(House h) const;

    // Entry bounds, row sums exactly 1, column sums exactly 1 (n = m) / <= 1.
    bool satisfies_invariants() const;

    // Matrix of the renamed profile: out(agent_perm[i], house_perm[h]) = at(i, h).
    AssignmentMatrix renamed(std::span<const int> agent_perm,
                             std::span<const int> house_perm) const;

    friend bool operator==(const AssignmentMatrix&, const AssignmentMatrix&) = default;

private:
    int n_ = 0, m_ = 0;
    std::vector<Rational> entries_;  // row-major
};

}  // namespace housealloc
