#pragma once

#include <functional>
#include <span>

#include "housealloc/matrix.hpp"
#include "housealloc/prefs.hpp"

namespace housealloc {

// A mechanism is a total map from profiles to assignment matrices for a
// fixed problem size. Pure by convention.
using Mechanism = std::function<AssignmentMatrix(const Profile&)>;

// Agents pick, in the given order, their most-preferred still-available house.
DeterministicAssignment serial_dictatorship(const Profile& p,
                                            std::span<const int> ordering);

// Exact average of serial dictatorship over all n! orderings.
// Every entry has denominator dividing n!.
AssignmentMatrix rsd(const Profile& p);

// Swap invariance for the swapping agent: probabilities for houses outside
// the swapped pair, and the sum over the pair, are unchanged.
bool check_sp(const Mechanism& mech, const Profile& p, const AdjacentSwap& s);

// mech(p) satisfies every equality of eta_constraints(p).
bool check_eta(const Mechanism& mech, const Profile& p);

// mech(p) decomposes over the Pareto-efficient assignments of p.
bool check_expe(const Mechanism& mech, const Profile& p);

}  // namespace housealloc
