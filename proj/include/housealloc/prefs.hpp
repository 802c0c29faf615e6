#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace housealloc {

inline constexpr int kMaxHouses = 6;
inline constexpr int kMaxAgents = 6;

// Houses are indices 0..m-1, displayed as letters 'a'..'f'.
using House = int;

inline char house_letter(House h) { return static_cast<char>('a' + h); }

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Strict preference order over m houses, most preferred first.
class Ranking {
public:
    Ranking() = default;

    // Validates that `order` is a permutation of 0..m-1.
    static Ranking of(std::span<const House> order);
    static Ranking from_string(std::string_view s);

    int size() const { return size_; }
    House at(int k) const { return order_[k]; }
    int position_of(House h) const { return pos_[h]; }

    // True iff x is ranked above y. x == y is a caller error.
    bool prefers(House x, House y) const {
        if (x == y) throw std::invalid_argument("prefers: x == y");
        return pos_[x] < pos_[y];
    }

    // Transposes the houses at positions k and k+1.
    Ranking with_swap(int k) const;

    std::string to_string() const;

    friend bool operator==(const Ranking& a, const Ranking& b) {
        if (a.size_ != b.size_) return false;
        for (int k = 0; k < a.size_; ++k)
            if (a.order_[k] != b.order_[k]) return false;
        return true;
    }
    friend std::strong_ordering operator<=>(const Ranking& a, const Ranking& b) {
        for (int k = 0; k < a.size_ && k < b.size_; ++k)
            if (auto c = a.order_[k] <=> b.order_[k]; c != 0) return c;
        return a.size_ <=> b.size_;
    }

private:
    std::array<House, kMaxHouses> order_{};
    std::array<int, kMaxHouses> pos_{};
    int size_ = 0;
};

// One ranking per agent; agent ids are 0-based positions (1-based in reports).
class Profile {
public:
    Profile() = default;
    explicit Profile(std::vector<Ranking> rankings);

    int agents() const { return static_cast<int>(rankings_.size()); }
    int houses() const { return rankings_.empty() ? 0 : rankings_[0].size(); }
    const Ranking& ranking(int agent) const { return rankings_[agent]; }

    Profile with_ranking(int agent, const Ranking& r) const;

    std::string to_string() const;

    friend bool operator==(const Profile& a, const Profile& b) = default;
    friend std::strong_ordering operator<=>(const Profile& a, const Profile& b) {
        for (size_t i = 0; i < a.rankings_.size() && i < b.rankings_.size(); ++i)
            if (auto c = a.rankings_[i] <=> b.rankings_[i]; c != 0) return c;
        return a.rankings_.size() <=> b.rankings_.size();
    }

private:
    std::vector<Ranking> rankings_;
};

// Swap of the houses an agent ranks at positions `position` and `position`+1.
struct AdjacentSwap {
    int agent = 0;
    int position = 0;
    friend bool operator==(const AdjacentSwap&, const AdjacentSwap&) = default;
};

struct CanonicalForm {
    Profile representative;
    std::vector<int> agent_renaming;  // representative agent of original agent i
    std::vector<int> house_renaming;  // representative house of original house h
};

// "abcd|abdc|..." with optional whitespace around '|'. Errors name the agent.
Profile parse_profile(std::string_view text);

// All m! rankings in lexicographic order. 1 <= m <= kMaxHouses.
std::vector<Ranking> enumerate_rankings(int m);

// Lexicographic rank of a ranking among the m! permutations, and back.
int ranking_lex_rank(const Ranking& r);
Ranking ranking_from_lex_rank(int m, int rank);

inline constexpr std::uint64_t kProfileEnumerationGuard = 10'000'000;

// (m!)^n, or throws if it exceeds the enumeration guard.
std::uint64_t profile_space_size(int n, int m);

// Yields every profile exactly once, in lexicographic order of ranking indices.
void enumerate_profiles(int n, int m, const std::function<void(const Profile&)>& fn);

Profile apply_swap(const Profile& p, const AdjacentSwap& s);

// Number of (agent pair, house pair) combinations ordered oppositely.
int disagreement_parameter(const Profile& p);

// Renamed profile q with q.ranking(agent_perm[i])[k] = house_perm[p.ranking(i)[k]].
Profile rename(const Profile& p, std::span<const int> agent_perm,
               std::span<const int> house_perm);

// Lexicographically least profile in the orbit of p under agent and house
// renamings, with one witnessing renaming pair.
CanonicalForm canonicalize(const Profile& p);

std::vector<std::vector<int>> all_permutations(int k);

}  // namespace housealloc
