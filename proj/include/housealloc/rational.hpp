#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace housealloc {

// Exact rational number, always in lowest terms with positive denominator.
// Thin value wrapper over GMP; every arithmetic result is canonicalized.
class Rational {
public:
    Rational() : v_(0) {}
    Rational(long num) : v_(num) {}  // NOLINT: implicit by design
    Rational(long num, long den) {
        if (den == 0) throw std::invalid_argument("Rational: zero denominator");
        v_ = mpq_class(num, den);
        v_.canonicalize();
    }

    // Accepts "p/q" or "p"; rejects anything else.
    static Rational from_string(std::string_view s);

    std::string to_string() const { return v_.get_str(); }

    bool is_zero() const { return sgn(v_) == 0; }
    int sign() const { return sgn(v_); }

    const mpz_class& numerator() const { return v_.get_num(); }
    const mpz_class& denominator() const { return v_.get_den(); }

    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) throw std::invalid_argument("Rational: division by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    friend Rational operator-(const Rational& a) { Rational r; r.v_ = -a.v_; return r; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        int c = cmp(a.v_, b.v_);
        return c < 0 ? std::strong_ordering::less
             : c > 0 ? std::strong_ordering::greater
                     : std::strong_ordering::equal;
    }

private:
    mpq_class v_;
};

inline Rational Rational::from_string(std::string_view s) {
    if (s.empty()) throw std::invalid_argument("Rational: empty string");
    std::string str(s);
    auto slash = str.find('/');
    if (slash == 0 || slash == str.size() - 1)
        throw std::invalid_argument("Rational: malformed '" + str + "'");
    mpq_class v;
    if (v.set_str(str, 10) != 0)
        throw std::invalid_argument("Rational: malformed '" + str + "'");
    if (sgn(v.get_den()) == 0)
        throw std::invalid_argument("Rational: zero denominator in '" + str + "'");
    v.canonicalize();
    Rational r;
    r.v_ = std::move(v);
    return r;
}

}  // namespace housealloc
