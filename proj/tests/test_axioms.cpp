#include <doctest.h>

#include <algorithm>
#include <set>

#include "housealloc/axioms.hpp"
#include "housealloc/efficiency.hpp"
#include "housealloc/mechanisms.hpp"
#include "test_util.hpp"

using namespace housealloc;

namespace {

Ranking rk(const char* s) { return Ranking::from_string(s); }

HousePair hp(char x, char y) { return {x - 'a', y - 'a'}; }

}  // namespace

TEST_CASE("support_requirements: abcd vs adbc") {
    auto req = support_requirements(rk("abcd"), rk("adbc"), std::nullopt, std::nullopt);
    CHECK(req.base[0] == std::map<HousePair, int>{{hp('a', 'b'), 1},
                                                  {hp('b', 'c'), 1},
                                                  {hp('c', 'd'), 2}});
    CHECK(req.base[1] == std::map<HousePair, int>{{hp('a', 'd'), 1},
                                                  {hp('d', 'b'), 2},
                                                  {hp('b', 'c'), 1}});
}

TEST_CASE("support_requirements: abcd vs abdc with both relaxations") {
    auto req = support_requirements(rk("abcd"), rk("abdc"), Relaxation(hp('c', 'd')),
                                    Relaxation(hp('d', 'c')));
    std::map<HousePair, int> expected{{hp('a', 'b'), 1},
                                      {hp('b', 'c'), 1},
                                      {hp('c', 'd'), 1},
                                      {hp('b', 'd'), 1},
                                      {hp('d', 'c'), 1}};
    CHECK(req.combined == expected);
}

TEST_CASE("support_requirements validation and ranges") {
    CHECK_THROWS_AS(support_requirements(rk("abcd"), rk("abcd"), std::nullopt, std::nullopt),
                    std::invalid_argument);
    // relaxation must name an adjacent pair of the respective ranking
    CHECK_THROWS_AS(support_requirements(rk("abcd"), rk("abdc"), Relaxation(hp('a', 'c')),
                                         std::nullopt),
                    std::invalid_argument);
    // combined equals the max of the per-agent requirements; never negative
    testutil::Rng rng(103);
    auto rks = enumerate_rankings(4);
    for (int t = 0; t < 50; ++t) {
        Ranking p1 = rks[rng.below(24)], p2 = rks[rng.below(24)];
        if (p1 == p2) continue;
        auto base = support_requirements(p1, p2, std::nullopt, std::nullopt);
        for (int i = 0; i < 2; ++i)
            for (const auto& [pr, r] : base.base[i]) CHECK((r == 1 || r == 2));
        for (const auto& [pr, r] : base.combined) {
            int r1 = base.base[0].count(pr) ? base.base[0].at(pr) : 0;
            int r2 = base.base[1].count(pr) ? base.base[1].at(pr) : 0;
            CHECK(r == std::max(r1, r2));
            CHECK(r >= 0);
            CHECK(r <= 2);
        }
    }
}

TEST_CASE("shared adjacent pair in reversed order is unsatisfiable unrelaxed") {
    // both orders of {c,d} are required from two agents: R_cd + R_dc = 4 > 2
    auto req = support_requirements(rk("abcd"), rk("abdc"), std::nullopt, std::nullopt);
    CHECK(req.combined.at(hp('c', 'd')) + req.combined.at(hp('d', 'c')) > 2);
}

TEST_CASE("is_supported_agent") {
    Profile u = parse_profile("abcd|abcd|abcd|abcd");
    for (int i = 0; i < 4; ++i) CHECK(is_supported_agent(u, i));

    // every adjacent pair of dcba is opposed by all three others
    Profile rev = parse_profile("abcd|abcd|abcd|dcba");
    CHECK_FALSE(is_supported_agent(rev, 3));

    // the {d,c} requirement cannot be met even with the one relaxation
    Profile p1 = parse_profile("abcd|abcd|abdc|badc");
    CHECK_FALSE(is_supported_agent(p1, 3));
    auto v1 = support_violations(p1, 3);
    CHECK(std::find(v1.begin(), v1.end(),
                    std::pair<HousePair, int>{hp('d', 'c'), 1}) != v1.end());

    Profile p2 = parse_profile("abcd|abcd|bacd|badc");
    CHECK_FALSE(is_supported_agent(p2, 3));
    auto v2 = support_violations(p2, 3);
    CHECK(std::find(v2.begin(), v2.end(),
                    std::pair<HousePair, int>{hp('d', 'c'), 0}) != v2.end());

    Profile small = parse_profile("abc|abc|abc");
    CHECK_THROWS_AS(is_supported_agent(small, 0), std::invalid_argument);
}

TEST_CASE("agents 3 and 4 unsupported because of {c,b} and {d,b}") {
    Profile p = parse_profile("abcd|abdc|acbd|adbc");
    CHECK(is_supported_agent(p, 0));
    CHECK(is_supported_agent(p, 1));
    CHECK_FALSE(is_supported_agent(p, 2));
    CHECK_FALSE(is_supported_agent(p, 3));
    auto v2 = support_violations(p, 2);
    CHECK(std::find(v2.begin(), v2.end(),
                    std::pair<HousePair, int>{hp('c', 'b'), 0}) != v2.end());
    auto v3 = support_violations(p, 3);
    CHECK(std::find(v3.begin(), v3.end(),
                    std::pair<HousePair, int>{hp('d', 'b'), 0}) != v3.end());
}

TEST_CASE("relaxation is only available on pairs efficient for the agent") {
    // agent 3's lone deficient pair {c,b} has one agreer, so a relaxation
    // would satisfy it; it is blocked because house b is forced to zero for
    // him, which leaves the agent unsupported
    Profile p = parse_profile("abcd|abdc|acbd|adcb");
    CHECK_FALSE(is_supported_agent(p, 2));
    auto v = support_violations(p, 2);
    REQUIRE(v.size() == 1);
    CHECK(v[0] == std::pair<HousePair, int>{hp('c', 'b'), 1});
    auto an = analyze_efficiency(p);
    CHECK(an.forced_zero[2][1]);  // house b unattainable for agent 3
    CHECK_FALSE(an.forced_zero[2][2]);
}

TEST_CASE("is_supported_agent symmetry under house renaming") {
    testutil::Rng rng(107);
    auto rks = enumerate_rankings(4);
    for (int t = 0; t < 10; ++t) {
        Profile p = testutil::random_profile(rng, 4, rks);
        auto pi = testutil::random_permutation(rng, 4);
        std::vector<int> id{0, 1, 2, 3};
        Profile q = rename(p, id, pi);
        for (int i = 0; i < 4; ++i)
            CHECK(is_supported_agent(p, i) == is_supported_agent(q, i));
    }
}

TEST_CASE("is_supported_profile") {
    CHECK_FALSE(is_supported_profile(parse_profile("abcd|abcd|abcd|abcd")));
    // two supported agents with distinct rankings
    CHECK(is_supported_profile(parse_profile("abcd|abdc|acbd|adbc")));
    CHECK_THROWS_AS(is_supported_profile(parse_profile("abc|abc|abc")),
                    std::invalid_argument);
}

TEST_CASE("is_near_unanimous") {
    CHECK(is_near_unanimous(parse_profile("abcd|abcd|abcd|dcba")));
    CHECK_FALSE(is_near_unanimous(parse_profile("abcd|abcd|abdc|abdc")));
    CHECK(is_near_unanimous(parse_profile("abcd|abcd|abcd|abcd")));
}

TEST_CASE("is_degenerate") {
    CHECK(is_degenerate(parse_profile("abcd|bacd|cabd|dabc")));
    CHECK_FALSE(is_degenerate(parse_profile("abcd|abdc|cabd|dabc")));
    // degenerate profiles collapse rsd to the indicator of tops
    Profile dg = parse_profile("bacd|abdc|cabd|dabc");
    REQUIRE(is_degenerate(dg));
    AssignmentMatrix M = rsd(dg);
    for (int i = 0; i < 4; ++i)
        for (House h = 0; h < 4; ++h)
            CHECK(M.at(i, h) == (h == dg.ranking(i).at(0) ? Rational(1) : Rational(0)));
}

TEST_CASE("eta_constraints structure") {
    // identical rankings: all four rows constrained equal, house by house
    auto u = eta_constraints(parse_profile("abcd|abcd|abcd|abcd"));
    int full_groups = 0;
    for (const auto& c : u) {
        REQUIRE(c.kind == AxiomConstraint::Kind::Equality);
        if (c.cells.size() == 4) ++full_groups;
    }
    CHECK(full_groups == 4);

    // two pairs of identical rankings: rows 1,2 and rows 3,4 equal
    auto pairs = eta_constraints(parse_profile("abcd|abcd|abdc|abdc"));
    for (House h = 0; h < 4; ++h) {
        std::vector<Cell> g01{{0, h}, {1, h}}, g23{{2, h}, {3, h}};
        CHECK(std::any_of(pairs.begin(), pairs.end(),
                          [&](const AxiomConstraint& c) { return c.cells == g01; }));
        CHECK(std::any_of(pairs.begin(), pairs.end(),
                          [&](const AxiomConstraint& c) { return c.cells == g23; }));
    }

    // after the forced zeros of column a and b, the remaining entries are
    // equalized across agents 2,3,4 (1-indexed)
    auto anchored = eta_constraints(parse_profile("cbad|abcd|abdc|abdc"));
    std::vector<Cell> col_a{{1, 0}, {2, 0}, {3, 0}}, col_b{{1, 1}, {2, 1}, {3, 1}};
    CHECK(std::any_of(anchored.begin(), anchored.end(),
                      [&](const AxiomConstraint& c) { return c.cells == col_a; }));
    CHECK(std::any_of(anchored.begin(), anchored.end(),
                      [&](const AxiomConstraint& c) { return c.cells == col_b; }));
}

TEST_CASE("eta_constraints determinism and ETE inclusion") {
    testutil::Rng rng(109);
    auto rks = enumerate_rankings(4);
    for (int t = 0; t < 20; ++t) {
        Profile p = testutil::random_profile(rng, 4, rks);
        auto a = eta_constraints(p), b = eta_constraints(p);
        REQUIRE(a.size() == b.size());
        for (size_t k = 0; k < a.size(); ++k) CHECK(a[k].cells == b[k].cells);
        // row equality for identical-ranking pairs is always present
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) {
                if (!(p.ranking(i) == p.ranking(j))) continue;
                for (House h = 0; h < 4; ++h) {
                    Cell ci{i, h}, cj{j, h};
                    bool found = std::any_of(
                        a.begin(), a.end(), [&](const AxiomConstraint& c) {
                            return std::count(c.cells.begin(), c.cells.end(), ci) &&
                                   std::count(c.cells.begin(), c.cells.end(), cj);
                        });
                    CHECK(found);
                }
            }
    }
}

TEST_CASE("rsd satisfies every emitted equal-treatment equality") {
    testutil::Rng rng(113);
    auto rks = enumerate_rankings(4);
    for (int t = 0; t < 30; ++t) {
        Profile p = testutil::random_profile(rng, 4, rks);
        AssignmentMatrix M = rsd(p);
        for (const auto& c : eta_constraints(p))
            for (size_t k = 1; k < c.cells.size(); ++k)
                CHECK(M.at(c.cells[k].agent, c.cells[k].house) ==
                      M.at(c.cells[0].agent, c.cells[0].house));
    }
}

TEST_CASE("sp_links") {
    Profile p = parse_profile("abcd|abcd|abcd|abcd");
    auto links = sp_links(p);
    CHECK(links.size() == 12);  // 4 agents x 3 positions
    for (const auto& [swap, q] : links) {
        CHECK(apply_swap(p, swap) == q);
        // symmetric: p is a neighbor of q under the same swap
        auto back = sp_links(q);
        bool found = std::any_of(back.begin(), back.end(), [&](const auto& e) {
            return e.second == p;
        });
        CHECK(found);
        // all neighbors of the unanimous profile sit at disagreement 3
        CHECK(disagreement_parameter(q) == 3);
    }
}
