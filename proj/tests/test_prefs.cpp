#include <doctest.h>

#include <map>
#include <set>

#include "housealloc/prefs.hpp"
#include "test_util.hpp"

using namespace housealloc;

TEST_CASE("parse_profile accepts well-formed input") {
    Profile p = parse_profile("abcd|abcd|abcd|abcd");
    CHECK(p.agents() == 4);
    CHECK(p.houses() == 4);
    for (int i = 0; i < 4; ++i) CHECK(p.ranking(i).to_string() == "abcd");

    Profile q = parse_profile("abcd|abdc|acbd|bacd");
    CHECK(q.ranking(0).to_string() == "abcd");
    CHECK(q.ranking(1).to_string() == "abdc");
    CHECK(q.ranking(2).to_string() == "acbd");
    CHECK(q.ranking(3).to_string() == "bacd");

    CHECK(parse_profile(" abc | bca ").to_string() == "abc|bca");
}

TEST_CASE("parse_profile errors name the offending agent") {
    CHECK_THROWS_WITH_AS(parse_profile("abca|abcd"),
                         doctest::Contains("agent 0"), ParseError);
    CHECK_THROWS_WITH_AS(parse_profile("abcd|abca"),
                         doctest::Contains("duplicate house 'a'"), ParseError);
    CHECK_THROWS_AS(parse_profile("abcd|abc"), ParseError);
    CHECK_THROWS_AS(parse_profile("abcd|abce"), ParseError);
    CHECK_THROWS_AS(parse_profile(""), ParseError);
}

TEST_CASE("parse/format round-trip") {
    testutil::Rng rng(11);
    auto rks = enumerate_rankings(4);
    for (int t = 0; t < 200; ++t) {
        Profile p = testutil::random_profile(rng, 4, rks);
        CHECK(parse_profile(p.to_string()) == p);
    }
}

TEST_CASE("enumerate_rankings") {
    auto r1 = enumerate_rankings(1);
    REQUIRE(r1.size() == 1);
    CHECK(r1[0].to_string() == "a");

    auto r3 = enumerate_rankings(3);
    REQUIRE(r3.size() == 6);
    CHECK(r3.front().to_string() == "abc");
    CHECK(r3.back().to_string() == "cba");

    auto r4 = enumerate_rankings(4);
    CHECK(r4.size() == 24);
    std::set<std::string> seen;
    for (size_t i = 0; i < r4.size(); ++i) {
        seen.insert(r4[i].to_string());
        if (i) CHECK(r4[i - 1] < r4[i]);  // strictly increasing = lex order, no dups
        CHECK(ranking_lex_rank(r4[i]) == static_cast<int>(i));
        CHECK(ranking_from_lex_rank(4, static_cast<int>(i)) == r4[i]);
    }
    CHECK(seen.size() == 24);

    CHECK_THROWS_AS(enumerate_rankings(0), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_rankings(7), std::invalid_argument);
}

TEST_CASE("enumerate_profiles counts and order") {
    std::uint64_t count = 0;
    Profile first, last;
    enumerate_profiles(2, 2, [&](const Profile& p) {
        if (count == 0) first = p;
        last = p;
        ++count;
    });
    CHECK(count == 4);
    CHECK(first.to_string() == "ab|ab");
    CHECK(last.to_string() == "ba|ba");

    count = 0;
    enumerate_profiles(3, 4, [&](const Profile&) { ++count; });
    CHECK(count == 13824);

    CHECK(profile_space_size(4, 4) == 331776);
    CHECK_THROWS_WITH_AS(profile_space_size(5, 5), doctest::Contains("120^5"),
                         std::invalid_argument);
}

TEST_CASE("apply_swap") {
    Profile p = parse_profile("abcd|abcd");
    Profile q = apply_swap(p, {0, 2});
    CHECK(q.to_string() == "abdc|abcd");
    CHECK(apply_swap(q, {0, 2}) == p);  // involution

    Profile r = parse_profile("abcd|abdc|acbd|bacd");
    CHECK(apply_swap(r, {3, 0}).to_string() == "abcd|abdc|acbd|abcd");

    CHECK_THROWS_AS(apply_swap(p, {0, 3}), std::invalid_argument);
    CHECK_THROWS_AS(apply_swap(p, {5, 0}), std::invalid_argument);
}

TEST_CASE("prefers") {
    Ranking abcd = Ranking::from_string("abcd");
    Ranking dcba = Ranking::from_string("dcba");
    CHECK(abcd.prefers(0, 3));
    CHECK_FALSE(abcd.prefers(3, 0));
    CHECK(dcba.prefers(2, 1));
    CHECK_THROWS_AS(abcd.prefers(1, 1), std::invalid_argument);
}

namespace {

// independent oracle: direct count over agent pairs and unordered house pairs
int disagreement_bruteforce(const Profile& p) {
    int d = 0;
    for (int i = 0; i < p.agents(); ++i)
        for (int j = i + 1; j < p.agents(); ++j)
            for (House x = 0; x < p.houses(); ++x)
                for (House y = x + 1; y < p.houses(); ++y)
                    if (p.ranking(i).prefers(x, y) != p.ranking(j).prefers(x, y)) ++d;
    return d;
}

}  // namespace

TEST_CASE("disagreement parameter") {
    CHECK(disagreement_parameter(parse_profile("abcd|abcd|abcd|abcd")) == 0);
    CHECK(disagreement_parameter(parse_profile("abcd|abcd|abcd|abdc")) == 3);
    CHECK(disagreement_bruteforce(parse_profile("abcd|abcd|abcd|abdc")) == 3);

    testutil::Rng rng(23);
    auto rks = enumerate_rankings(4);
    for (int t = 0; t < 100; ++t) {
        Profile p = testutil::random_profile(rng, 4, rks);
        CHECK(disagreement_parameter(p) == disagreement_bruteforce(p));
    }
}

TEST_CASE("swap delta law") {
    // flipping agent i from x>y to y>x changes D by
    // (#others with x>y) - (#others with y>x); for n=4 that is odd, in {1,3}
    testutil::Rng rng(37);
    auto rks = enumerate_rankings(4);
    for (int t = 0; t < 300; ++t) {
        Profile p = testutil::random_profile(rng, 4, rks);
        int d0 = disagreement_parameter(p);
        for (int i = 0; i < 4; ++i) {
            for (int k = 0; k < 3; ++k) {
                House x = p.ranking(i).at(k), y = p.ranking(i).at(k + 1);
                int agree = 0, disagree = 0;
                for (int j = 0; j < 4; ++j) {
                    if (j == i) continue;
                    (p.ranking(j).prefers(x, y) ? agree : disagree)++;
                }
                int delta = disagreement_parameter(apply_swap(p, {i, k})) - d0;
                CHECK(delta == agree - disagree);
                CHECK((delta == 1 || delta == -1 || delta == 3 || delta == -3));
            }
        }
    }
}

TEST_CASE("canonicalize basics") {
    Profile p = parse_profile("bacd|bacd|bacd|bacd");
    CanonicalForm cf = canonicalize(p);
    CHECK(cf.representative.to_string() == "abcd|abcd|abcd|abcd");

    Profile u = parse_profile("abcd|abcd|abcd|abcd");
    CHECK(canonicalize(u).representative == u);

    // witnessing renamings reproduce the representative, and canonicalization
    // is idempotent
    testutil::Rng rng(51);
    auto rks = enumerate_rankings(4);
    for (int t = 0; t < 30; ++t) {
        Profile q = testutil::random_profile(rng, 4, rks);
        CanonicalForm c = canonicalize(q);
        CHECK(rename(q, c.agent_renaming, c.house_renaming) == c.representative);
        CHECK(canonicalize(c.representative).representative == c.representative);
    }
}

TEST_CASE("canonicalize is constant on orbits and D is renaming-invariant") {
    testutil::Rng rng(67);
    auto rks = enumerate_rankings(4);
    for (int t = 0; t < 30; ++t) {
        Profile p = testutil::random_profile(rng, 4, rks);
        auto sigma = testutil::random_permutation(rng, 4);
        auto pi = testutil::random_permutation(rng, 4);
        Profile q = rename(p, sigma, pi);
        CHECK(canonicalize(q).representative == canonicalize(p).representative);
        CHECK(disagreement_parameter(q) == disagreement_parameter(p));
    }
}

TEST_CASE("orbit sizes over all (3,3) profiles partition the 216 profiles") {
    // brute-force orbit enumeration over S_3 x S_3
    std::map<std::string, std::set<std::string>> orbits;
    enumerate_profiles(3, 3, [&](const Profile& p) {
        orbits[canonicalize(p).representative.to_string()].insert(p.to_string());
    });
    std::uint64_t total = 0;
    for (const auto& [rep, members] : orbits) {
        CHECK(members.count(rep) == 1);  // representative belongs to its orbit
        total += members.size();
    }
    CHECK(total == 216);
    CHECK(orbits.size() == 10);
}
