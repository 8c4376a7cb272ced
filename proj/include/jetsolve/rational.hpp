#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>

namespace jetsolve {

using Integer = mpz_class;
using Rational = mpq_class;

Rational make_rational(long num, long den = 1);

bool is_integer(const Rational& r);

std::string to_string(const Rational& r);

/// Integer power, negative exponents allowed for nonzero bases.
Rational rational_pow(const Rational& base, long exponent);

/// Exact `q`-th root of a rational, if one exists in Q (real branch).
std::optional<Rational> exact_root(const Rational& r, unsigned long q);

/// Small exact fraction used for monomial exponents.
struct Frac {
    std::int64_t num = 0;
    std::int64_t den = 1;

    constexpr Frac() = default;
    constexpr Frac(std::int64_t n) : num(n), den(1) {}  // NOLINT(google-explicit-constructor)
    Frac(std::int64_t n, std::int64_t d);

    static Frac from_rational(const Rational& r);
    [[nodiscard]] Rational to_rational() const;

    [[nodiscard]] bool is_integer() const { return den == 1; }
    [[nodiscard]] bool is_zero() const { return num == 0; }
    [[nodiscard]] std::int64_t floor() const;

    friend Frac operator+(Frac a, Frac b);
    friend Frac operator-(Frac a, Frac b);
    friend Frac operator*(Frac a, Frac b);
    friend Frac operator-(Frac a) { return Frac{-a.num, a.den}; }
    friend bool operator==(Frac a, Frac b) { return a.num == b.num && a.den == b.den; }
    friend bool operator<(Frac a, Frac b);
    friend bool operator>(Frac a, Frac b) { return b < a; }
    friend bool operator<=(Frac a, Frac b) { return !(b < a); }
};

std::int64_t lcm64(std::int64_t a, std::int64_t b);

}  // namespace jetsolve
