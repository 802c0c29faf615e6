#pragma once

#include <vector>

#include "housealloc/matrix.hpp"
#include "housealloc/prefs.hpp"

namespace housealloc {

struct EfficiencyProfileAnalysis {
    std::vector<DeterministicAssignment> efficient_set;
    // forced_zero[i][h]: no efficient assignment gives house h to agent i
    std::vector<std::vector<bool>> forced_zero;

    bool agent_house_efficient(int agent, House h) const {
        return !forced_zero[agent][h];
    }
};

// True iff no reallocation among a subset of agents (plus, when m > n, moves
// onto unassigned houses) makes someone strictly better off and no one worse.
// Detected as: no agent prefers a free house, and the envy digraph is acyclic.
bool is_pareto_efficient(const DeterministicAssignment& a, const Profile& p);

// Enumerates all m!/(m-n)! injective assignments and filters by efficiency.
EfficiencyProfileAnalysis analyze_efficiency(const Profile& p);

// True iff M decomposes as a convex combination of Pareto-efficient
// deterministic assignments of p.
bool is_expost_efficient(const AssignmentMatrix& M, const Profile& p);

}  // namespace housealloc
