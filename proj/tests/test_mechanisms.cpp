#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "housealloc/efficiency.hpp"
#include "housealloc/mechanisms.hpp"
#include "test_util.hpp"

using namespace housealloc;

namespace {

// independent serial-dictatorship oracle for rsd: literal pick simulation
// over explicitly enumerated orderings
AssignmentMatrix rsd_oracle(const Profile& p) {
    const int n = p.agents(), m = p.houses();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<long> counts(n * m, 0);
    long total = 0;
    do {
        std::vector<bool> taken(m, false);
        for (int i : order) {
            for (int k = 0; k < m; ++k) {
                House h = p.ranking(i).at(k);
                if (!taken[h]) {
                    taken[h] = true;
                    ++counts[i * m + h];
                    break;
                }
            }
        }
        ++total;
    } while (std::next_permutation(order.begin(), order.end()));
    AssignmentMatrix out(n, m);
    for (int i = 0; i < n; ++i)
        for (House h = 0; h < m; ++h) out.at(i, h) = Rational(counts[i * m + h], total);
    return out;
}

const Mechanism kRsd = [](const Profile& p) { return rsd(p); };

}  // namespace

TEST_CASE("serial_dictatorship") {
    Profile p = parse_profile("abc|abc|abc");
    std::vector<int> order{0, 1, 2};
    auto a = serial_dictatorship(p, order);
    CHECK(a.house_of == std::vector<House>{0, 1, 2});

    Profile dg = parse_profile("abcd|bacd|cabd|dabc");
    auto perms = all_permutations(4);
    for (const auto& o : perms) {
        auto d = serial_dictatorship(dg, o);
        for (int i = 0; i < 4; ++i) CHECK(d.house_of[i] == dg.ranking(i).at(0));
    }

    Profile q = parse_profile("cbad|abcd|abdc|abdc");
    std::vector<int> o{0, 1, 2, 3};
    auto s = serial_dictatorship(q, o);
    CHECK(s.house_of == std::vector<House>{2, 0, 1, 3});  // c, a, b, d

    std::vector<int> bad{0, 1};
    CHECK_THROWS_AS(serial_dictatorship(q, bad), std::invalid_argument);
}

TEST_CASE("rsd on symmetric and degenerate profiles") {
    AssignmentMatrix u = rsd(parse_profile("abcd|abcd|abcd|abcd"));
    for (int i = 0; i < 4; ++i)
        for (House h = 0; h < 4; ++h) CHECK(u.at(i, h) == Rational(1, 4));

    Profile dg = parse_profile("abcd|bacd|cabd|dabc");
    AssignmentMatrix d = rsd(dg);
    for (int i = 0; i < 4; ++i)
        for (House h = 0; h < 4; ++h)
            CHECK(d.at(i, h) == (h == dg.ranking(i).at(0) ? Rational(1) : Rational(0)));
}

TEST_CASE("rsd equals the ordering-enumeration oracle") {
    CHECK(rsd(parse_profile("abcd|abcd|abcd|abdc")) ==
          rsd_oracle(parse_profile("abcd|abcd|abcd|abdc")));
    CHECK(rsd(parse_profile("cbad|abcd|abdc|abdc")) ==
          rsd_oracle(parse_profile("cbad|abcd|abdc|abdc")));
    testutil::Rng rng(91);
    auto rks = enumerate_rankings(4);
    for (int t = 0; t < 25; ++t) {
        Profile p = testutil::random_profile(rng, 4, rks);
        CHECK(rsd(p) == rsd_oracle(p));
    }
}

TEST_CASE("rsd matrices satisfy the assignment invariants") {
    testutil::Rng rng(93);
    auto rks4 = enumerate_rankings(4);
    for (int t = 0; t < 25; ++t)
        CHECK(rsd(testutil::random_profile(rng, 4, rks4)).satisfies_invariants());
    // n < m: rows sum to one, columns at most one
    auto rks3 = enumerate_rankings(4);
    for (int t = 0; t < 10; ++t) {
        Profile p = testutil::random_profile(rng, 3, rks3);
        CHECK(rsd(p).satisfies_invariants());
    }
}

TEST_CASE("rsd renaming equivariance") {
    testutil::Rng rng(97);
    auto rks = enumerate_rankings(4);
    for (int t = 0; t < 15; ++t) {
        Profile p = testutil::random_profile(rng, 4, rks);
        auto sigma = testutil::random_permutation(rng, 4);
        auto pi = testutil::random_permutation(rng, 4);
        CHECK(rsd(rename(p, sigma, pi)) == rsd(p).renamed(sigma, pi));
    }
}

TEST_CASE("check_sp") {
    Profile u = parse_profile("abcd|abcd|abcd|abcd");
    CHECK(check_sp(kRsd, u, {0, 2}));  // agent 0 swaps {c,d}

    // swapping twice returns to p, so the check holds reflexively
    Profile p = parse_profile("abcd|abdc|acbd|bacd");
    Profile q = apply_swap(p, {1, 2});
    CHECK(check_sp(kRsd, p, {1, 2}) == check_sp(kRsd, q, {1, 2}));

    // constant mechanisms pass vacuously
    AssignmentMatrix fixed = rsd(u);
    const Mechanism constant = [fixed](const Profile&) { return fixed; };
    CHECK(check_sp(constant, p, {0, 0}));

    // a mechanism that rewards a specific reported ranking is manipulable
    const Mechanism rigged = [](const Profile& pr) {
        AssignmentMatrix M = rsd(pr);
        if (pr.ranking(0).to_string() == "abcd") {
            for (House h = 0; h < 4; ++h) M.at(0, h) = (h == 0) ? Rational(1) : Rational(0);
        }
        return M;
    };
    CHECK_FALSE(check_sp(rigged, u, {0, 2}));
}

TEST_CASE("check_eta") {
    Profile u = parse_profile("abcd|abcd|abcd|abcd");
    CHECK(check_eta(kRsd, u));

    const Mechanism favorite = [](const Profile& pr) {
        AssignmentMatrix M(pr.agents(), pr.houses());
        // agent 0 takes his top; the rest split what remains of each house
        for (House h = 0; h < pr.houses(); ++h) {
            bool top = (pr.ranking(0).at(0) == h);
            M.at(0, h) = top ? Rational(1) : Rational(0);
            for (int i = 1; i < pr.agents(); ++i)
                M.at(i, h) = top ? Rational(0)
                                 : Rational(1, static_cast<long>(pr.agents() - 1));
        }
        return M;
    };
    CHECK_FALSE(check_eta(favorite, u));

    Profile pairs = parse_profile("abcd|abcd|abdc|abdc");
    CHECK(check_eta(kRsd, pairs));
    AssignmentMatrix M = rsd(pairs);
    for (House h = 0; h < 4; ++h) {
        CHECK(M.at(0, h) == M.at(1, h));
        CHECK(M.at(2, h) == M.at(3, h));
    }
}

TEST_CASE("check_expe") {
    Profile p = parse_profile("cbad|abcd|abdc|abdc");
    CHECK(check_expe(kRsd, p));
    auto an = analyze_efficiency(p);
    AssignmentMatrix M = rsd(p);
    for (int i = 0; i < 4; ++i)
        for (House h = 0; h < 4; ++h)
            if (an.forced_zero[i][h]) CHECK(M.at(i, h) == Rational(0));

    Profile dg = parse_profile("abcd|bacd|cabd|dabc");
    AssignmentMatrix uniform(4, 4);
    for (int i = 0; i < 4; ++i)
        for (House h = 0; h < 4; ++h) uniform.at(i, h) = Rational(1, 4);
    const Mechanism uniform_mech = [uniform](const Profile&) { return uniform; };
    CHECK_FALSE(check_expe(uniform_mech, dg));
}

TEST_CASE("rsd support equals efficiency support on every (3,3) profile") {
    std::set<std::string> seen;
    enumerate_profiles(3, 3, [&](const Profile& p) {
        CHECK(seen.insert(p.to_string()).second);  // enumeration never repeats
        AssignmentMatrix M = rsd(p);
        auto an = analyze_efficiency(p);
        for (int i = 0; i < 3; ++i)
            for (House h = 0; h < 3; ++h)
                CHECK((M.at(i, h) == Rational(0)) == an.forced_zero[i][h]);
    });
    CHECK(seen.size() == 216);
}

TEST_CASE("rsd satisfies all three axioms on sampled (4,4) profiles") {
    testutil::Rng rng(101);
    auto rks = enumerate_rankings(4);
    for (int t = 0; t < 15; ++t) {
        Profile p = testutil::random_profile(rng, 4, rks);
        CHECK(check_expe(kRsd, p));
        CHECK(check_eta(kRsd, p));
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < 3; ++k) CHECK(check_sp(kRsd, p, {i, k}));
    }
}
