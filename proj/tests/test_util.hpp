#pragma once

#include <cstdint>
#include <vector>

#include "housealloc/prefs.hpp"

namespace testutil {

// splitmix64; deterministic across platforms
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    std::uint64_t below(std::uint64_t bound) {
        std::uint64_t limit = bound * (UINT64_MAX / bound);
        std::uint64_t v;
        do {
            v = next();
        } while (v >= limit);
        return v % bound;
    }
};

inline housealloc::Profile random_profile(Rng& rng, int n,
                                          const std::vector<housealloc::Ranking>& rks) {
    std::vector<housealloc::Ranking> v;
    v.reserve(n);
    for (int i = 0; i < n; ++i) v.push_back(rks[rng.below(rks.size())]);
    return housealloc::Profile(std::move(v));
}

inline std::vector<int> random_permutation(Rng& rng, int k) {
    std::vector<int> p(k);
    for (int i = 0; i < k; ++i) p[i] = i;
    for (int i = k - 1; i > 0; --i) std::swap(p[i], p[rng.below(i + 1)]);
    return p;
}

}  // namespace testutil
