#include "housealloc/efficiency.hpp"

#include <array>

#include "housealloc/linsys.hpp"

namespace housealloc {

bool is_pareto_efficient(const DeterministicAssignment& a, const Profile& p) {
    const int n = p.agents(), m = p.houses();
    if (a.agents() != n)
        throw std::invalid_argument("is_pareto_efficient: incomplete assignment");
    std::array<bool, kMaxHouses> held{};
    for (int i = 0; i < n; ++i) held[a.house_of[i]] = true;
    // a free preferred house is an improvement on its own
    for (int i = 0; i < n; ++i)
        for (House h = 0; h < m; ++h)
            if (!held[h] && p.ranking(i).prefers(h, a.house_of[i])) return false;
    // cycle in the envy digraph: i -> j when i prefers j's house to his own
    std::array<int, kMaxAgents> color{};  // 0 unvisited, 1 on stack, 2 done
    auto dfs = [&](auto&& self, int u) -> bool {
        color[u] = 1;
        for (int v = 0; v < n; ++v) {
            if (v == u || !p.ranking(u).prefers(a.house_of[v], a.house_of[u])) continue;
            if (color[v] == 1) return true;
            if (color[v] == 0 && self(self, v)) return true;
        }
        color[u] = 2;
        return false;
    };
    for (int i = 0; i < n; ++i)
        if (color[i] == 0 && dfs(dfs, i)) return false;
    return true;
}

namespace {

void enumerate_assignments(int n, int m, const std::function<void(const DeterministicAssignment&)>& fn) {
    DeterministicAssignment a;
    a.house_of.assign(n, -1);
    std::array<bool, kMaxHouses> used{};
    auto rec = [&](auto&& self, int agent) -> void {
        if (agent == n) {
            fn(a);
            return;
        }
        for (House h = 0; h < m; ++h) {
            if (used[h]) continue;
            used[h] = true;
            a.house_of[agent] = h;
            self(self, agent + 1);
            used[h] = false;
        }
    };
    rec(rec, 0);
}

}  // namespace

EfficiencyProfileAnalysis analyze_efficiency(const Profile& p) {
    const int n = p.agents(), m = p.houses();
    if (n > m) throw std::invalid_argument("analyze_efficiency: requires n <= m");
    EfficiencyProfileAnalysis out;
    out.forced_zero.assign(n, std::vector<bool>(m, true));
    enumerate_assignments(n, m, [&](const DeterministicAssignment& a) {
        if (!is_pareto_efficient(a, p)) return;
        out.efficient_set.push_back(a);
        for (int i = 0; i < n; ++i) out.forced_zero[i][a.house_of[i]] = false;
    });
    return out;
}

bool is_expost_efficient(const AssignmentMatrix& M, const Profile& p) {
    if (M.agents() != p.agents() || M.houses() != p.houses())
        throw std::invalid_argument("is_expost_efficient: shape mismatch");
    auto analysis = analyze_efficiency(p);
    std::vector<AssignmentMatrix> vertices;
    vertices.reserve(analysis.efficient_set.size());
    for (const auto& a : analysis.efficient_set)
        vertices.push_back(AssignmentMatrix::indicator(a, p.houses()));
    return feasible_combination(M, vertices).has_value();
}

}  // namespace housealloc
