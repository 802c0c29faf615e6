#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "housealloc/prefs.hpp"
#include "housealloc/rational.hpp"

namespace housealloc {

struct Cell {
    int agent;
    House house;
    friend auto operator<=>(const Cell&, const Cell&) = default;
};

// Ordered pair (x, y): x required above y.
using HousePair = std::pair<House, House>;
using Relaxation = std::optional<HousePair>;

// Agreement requirements imposed on the two non-designated agents by the
// supportedness of two designated agents with rankings p1, p2.
struct SupportRequirements {
    // base R~ per designated agent: for each adjacent pair (x, y) of his
    // ranking, how many of the other two agents must prefer x to y (1 if the
    // other designated agent already prefers x to y, else 2).
    std::map<HousePair, int> base[2];
    Relaxation relaxation[2];
    // combined R: max over the designated agents after relaxation, over every
    // pair adjacent in either ranking (absent pairs contribute 0).
    std::map<HousePair, int> combined;
};

SupportRequirements support_requirements(const Ranking& p1, const Ranking& p2,
                                         Relaxation l1, Relaxation l2);

// An agent is supported when every adjacent comparison of his ranking is
// shared by at least two other agents, where at most one requirement may be
// lowered by one if both houses of that pair are efficient for him.
// Defined for n = 4.
bool is_supported_agent(const Profile& p, int agent);

// Adjacent pairs of the agent's ranking failing the unrelaxed two-agreers
// requirement, with their agreement counts. Empty for agents whose every
// comparison already has two agreers.
std::vector<std::pair<HousePair, int>> support_violations(const Profile& p, int agent);

// At least two supported agents with different rankings. Defined for n = 4.
bool is_supported_profile(const Profile& p);

// Every house pair is ordered the same way by at least n-1 agents.
bool is_near_unanimous(const Profile& p);

// Each agent ranks a different house first.
bool is_degenerate(const Profile& p);

struct SpSource {
    Profile source;
    AdjacentSwap swap;
};

struct AxiomConstraint {
    enum class Kind { ForcedZero, Equality, PinnedValue, SumPin };
    Kind kind;
    std::vector<Cell> cells;
    Rational value;                      // PinnedValue / SumPin
    std::optional<SpSource> provenance;  // always set for PinnedValue / SumPin
};

// Equality constraints the equal-treatment axiom imposes at p: row equality
// for agents with identical rankings, and, when n = m, per-house equality
// across the agents for whom the house is efficient whenever they all rank
// the same set of houses above it. Deterministic, sorted, deduplicated.
std::vector<AxiomConstraint> eta_constraints(const Profile& p);

// All n(m-1) single-adjacent-swap neighbors with the producing swap.
std::vector<std::pair<AdjacentSwap, Profile>> sp_links(const Profile& p);

}  // namespace housealloc
