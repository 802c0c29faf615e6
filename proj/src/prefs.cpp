#include "housealloc/prefs.hpp"

#include <algorithm>
#include <numeric>

namespace housealloc {

Ranking Ranking::of(std::span<const House> order) {
    if (order.empty() || order.size() > kMaxHouses)
        throw std::invalid_argument("Ranking: size must be in [1, 6]");
    Ranking r;
    r.size_ = static_cast<int>(order.size());
    std::array<bool, kMaxHouses> seen{};
    for (int k = 0; k < r.size_; ++k) {
        House h = order[k];
        if (h < 0 || h >= r.size_ || seen[h])
            throw std::invalid_argument("Ranking: not a permutation");
        seen[h] = true;
        r.order_[k] = h;
        r.pos_[h] = k;
    }
    return r;
}

Ranking Ranking::from_string(std::string_view s) {
    std::array<House, kMaxHouses> buf{};
    if (s.empty() || s.size() > kMaxHouses)
        throw ParseError("ranking length must be in [1, 6]");
    for (size_t k = 0; k < s.size(); ++k) {
        char c = s[k];
        if (c < 'a' || c >= 'a' + static_cast<int>(s.size()))
            throw ParseError(std::string("bad house letter '") + c + "'");
        buf[k] = c - 'a';
    }
    // route through of() for the duplicate check, but report parse-style errors
    std::array<bool, kMaxHouses> seen{};
    for (size_t k = 0; k < s.size(); ++k) {
        if (seen[buf[k]])
            throw ParseError(std::string("duplicate house '") + s[k] + "'");
        seen[buf[k]] = true;
    }
    return of(std::span<const House>(buf.data(), s.size()));
}

Ranking Ranking::with_swap(int k) const {
    if (k < 0 || k + 1 >= size_)
        throw std::invalid_argument("with_swap: position out of range");
    Ranking r = *this;
    std::swap(r.order_[k], r.order_[k + 1]);
    r.pos_[r.order_[k]] = k;
    r.pos_[r.order_[k + 1]] = k + 1;
    return r;
}

std::string Ranking::to_string() const {
    std::string s;
    for (int k = 0; k < size_; ++k) s += house_letter(order_[k]);
    return s;
}

Profile::Profile(std::vector<Ranking> rankings) : rankings_(std::move(rankings)) {
    if (rankings_.empty()) throw std::invalid_argument("Profile: no agents");
    if (rankings_.size() > kMaxAgents) throw std::invalid_argument("Profile: too many agents");
    for (const auto& r : rankings_)
        if (r.size() != rankings_[0].size())
            throw std::invalid_argument("Profile: rankings over different house sets");
}

Profile Profile::with_ranking(int agent, const Ranking& r) const {
    Profile q = *this;
    q.rankings_[agent] = r;
    return q;
}

std::string Profile::to_string() const {
    std::string s;
    for (size_t i = 0; i < rankings_.size(); ++i) {
        if (i) s += '|';
        s += rankings_[i].to_string();
    }
    return s;
}

Profile parse_profile(std::string_view text) {
    std::vector<Ranking> rks;
    size_t start = 0;
    int agent = 0;
    while (true) {
        size_t bar = text.find('|', start);
        std::string_view part = text.substr(start, bar == std::string_view::npos
                                                       ? std::string_view::npos
                                                       : bar - start);
        while (!part.empty() && (part.front() == ' ' || part.front() == '\t'))
            part.remove_prefix(1);
        while (!part.empty() && (part.back() == ' ' || part.back() == '\t'))
            part.remove_suffix(1);
        try {
            rks.push_back(Ranking::from_string(part));
        } catch (const ParseError& e) {
            throw ParseError("agent " + std::to_string(agent) + ": " + e.what());
        }
        if (rks.back().size() != rks.front().size())
            throw ParseError("agent " + std::to_string(agent) + ": inconsistent length");
        if (bar == std::string_view::npos) break;
        start = bar + 1;
        ++agent;
    }
    return Profile(std::move(rks));
}

static std::uint64_t factorial(int k) {
    std::uint64_t f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

std::vector<Ranking> enumerate_rankings(int m) {
    if (m < 1 || m > kMaxHouses)
        throw std::invalid_argument("enumerate_rankings: m must be in [1, 6]");
    std::array<House, kMaxHouses> order{};
    std::iota(order.begin(), order.begin() + m, 0);
    std::vector<Ranking> out;
    out.reserve(factorial(m));
    do {
        out.push_back(Ranking::of(std::span<const House>(order.data(), m)));
    } while (std::next_permutation(order.begin(), order.begin() + m));
    return out;
}

int ranking_lex_rank(const Ranking& r) {
    int m = r.size();
    int rank = 0;
    for (int k = 0; k < m; ++k) {
        int smaller = 0;
        for (int j = k + 1; j < m; ++j)
            if (r.at(j) < r.at(k)) ++smaller;
        rank = rank * (m - k) + smaller;
    }
    return rank;
}

Ranking ranking_from_lex_rank(int m, int rank) {
    std::vector<House> avail(m);
    std::iota(avail.begin(), avail.end(), 0);
    std::array<House, kMaxHouses> order{};
    std::uint64_t f = factorial(m);
    for (int k = 0; k < m; ++k) {
        f /= (m - k);
        int ix = static_cast<int>(rank / f);
        rank = static_cast<int>(rank % f);
        order[k] = avail[ix];
        avail.erase(avail.begin() + ix);
    }
    return Ranking::of(std::span<const House>(order.data(), m));
}

std::uint64_t profile_space_size(int n, int m) {
    if (n < 1 || n > kMaxAgents || m < 1 || m > kMaxHouses)
        throw std::invalid_argument("profile_space_size: n, m out of range");
    std::uint64_t total = 1;
    std::uint64_t rk = factorial(m);
    for (int i = 0; i < n; ++i) {
        total *= rk;
        if (total > kProfileEnumerationGuard)
            throw std::invalid_argument(
                "profile enumeration refused: (m!)^n = " + std::to_string(rk) + "^" +
                std::to_string(n) + " exceeds guard " +
                std::to_string(kProfileEnumerationGuard));
    }
    return total;
}

void enumerate_profiles(int n, int m, const std::function<void(const Profile&)>& fn) {
    std::uint64_t total = profile_space_size(n, m);
    auto rks = enumerate_rankings(m);
    std::vector<int> idx(n, 0);
    for (std::uint64_t c = 0; c < total; ++c) {
        std::vector<Ranking> v;
        v.reserve(n);
        for (int i = 0; i < n; ++i) v.push_back(rks[idx[i]]);
        fn(Profile(std::move(v)));
        for (int i = n - 1; i >= 0; --i) {
            if (++idx[i] < static_cast<int>(rks.size())) break;
            idx[i] = 0;
        }
    }
}

Profile apply_swap(const Profile& p, const AdjacentSwap& s) {
    if (s.agent < 0 || s.agent >= p.agents())
        throw std::invalid_argument("apply_swap: agent out of range");
    return p.with_ranking(s.agent, p.ranking(s.agent).with_swap(s.position));
}

int disagreement_parameter(const Profile& p) {
    int n = p.agents(), m = p.houses();
    int d = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (House x = 0; x < m; ++x)
                for (House y = x + 1; y < m; ++y)
                    if (p.ranking(i).prefers(x, y) != p.ranking(j).prefers(x, y)) ++d;
    return d;
}

Profile rename(const Profile& p, std::span<const int> agent_perm,
               std::span<const int> house_perm) {
    int n = p.agents(), m = p.houses();
    std::vector<Ranking> out(n);
    std::array<House, kMaxHouses> buf{};
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < m; ++k) buf[k] = house_perm[p.ranking(i).at(k)];
        out[agent_perm[i]] = Ranking::of(std::span<const House>(buf.data(), m));
    }
    return Profile(std::move(out));
}

std::vector<std::vector<int>> all_permutations(int k) {
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::vector<int>> out;
    do {
        out.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

CanonicalForm canonicalize(const Profile& p) {
    auto agent_perms = all_permutations(p.agents());
    auto house_perms = all_permutations(p.houses());
    CanonicalForm best;
    bool first = true;
    for (const auto& sigma : agent_perms) {
        for (const auto& pi : house_perms) {
            Profile q = rename(p, sigma, pi);
            if (first || q < best.representative) {
                best = {std::move(q), sigma, pi};
                first = false;
            }
        }
    }
    return best;
}

}  // namespace housealloc
