#pragma once

#include "jetsolve/rational.hpp"

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace jetsolve {

/// Sparse monomial: (generator id, positive exponent) pairs sorted by id.
using Monomial = std::vector<std::pair<int, Frac>>;

/// Lexicographic order; smaller generator ids are more significant.
int compare_monomials(const Monomial& a, const Monomial& b);
struct MonomialLess {
    bool operator()(const Monomial& a, const Monomial& b) const { return compare_monomials(a, b) < 0; }
};

Monomial mono_mul(const Monomial& a, const Monomial& b);
/// a / b if every exponent of b is at most the matching exponent of a.
std::optional<Monomial> mono_div(const Monomial& a, const Monomial& b);
/// Componentwise minimum of exponents.
Monomial mono_gcd(const Monomial& a, const Monomial& b);
Frac mono_exponent(const Monomial& m, int id);

/// Multivariate polynomial over Q with rational (non-negative) exponents.
class Poly {
public:
    using Terms = std::map<Monomial, Rational, MonomialLess>;

    Poly() = default;
    explicit Poly(const Rational& c);
    static Poly generator(int id, Frac exponent = Frac(1));
    static Poly monomial(const Monomial& m, const Rational& c = Rational(1));

    [[nodiscard]] const Terms& terms() const { return terms_; }
    [[nodiscard]] bool is_zero() const { return terms_.empty(); }
    [[nodiscard]] bool is_constant() const;
    [[nodiscard]] Rational constant_value() const;
    [[nodiscard]] std::size_t size() const { return terms_.size(); }
    [[nodiscard]] const Monomial& leading_monomial() const;
    [[nodiscard]] const Rational& leading_coefficient() const;
    [[nodiscard]] std::set<int> generators() const;
    [[nodiscard]] bool contains(int id) const;

    void add_term(const Monomial& m, const Rational& c);

    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    [[nodiscard]] Poly scaled(const Rational& c) const;
    [[nodiscard]] Poly times_monomial(const Monomial& m, const Rational& c = Rational(1)) const;

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a) { return a.scaled(Rational(-1)); }
    friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

private:
    Terms terms_;
};

Poly pow(const Poly& p, unsigned long n);

/// Exact quotient a / b, or nullopt when b does not divide a.
std::optional<Poly> divide_exact(const Poly& a, const Poly& b);

/// Positive rational c such that p / c has coprime integer coefficients.
Rational rational_content(const Poly& p);
/// Componentwise minimum exponent over all terms.
Monomial monomial_content(const Poly& p);
/// p scaled to coprime integer coefficients with a positive leading coefficient.
Poly primitive_normalized(const Poly& p);

/// Greatest common divisor, normalized by primitive_normalized; gcd(0, 0) = 0.
Poly gcd(const Poly& a, const Poly& b);

/// Coefficients of p as a polynomial in generator `id` (after scaling exponents by
/// `scale`, which must make them integral): result[k] is the coefficient of id^(k/scale).
std::vector<Poly> coefficients_in(const Poly& p, int id, std::int64_t scale = 1);
/// Inverse of coefficients_in.
Poly from_coefficients(const std::vector<Poly>& coeffs, int id, std::int64_t scale = 1);
/// Least common denominator of the exponents of `id` in p.
std::int64_t exponent_denominator(const Poly& p, int id);

}  // namespace jetsolve
