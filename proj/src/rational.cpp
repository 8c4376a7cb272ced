#include "jetsolve/rational.hpp"

#include <numeric>
#include <stdexcept>

namespace jetsolve {

Rational make_rational(long num, long den) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

bool is_integer(const Rational& r) { return r.get_den() == 1; }

std::string to_string(const Rational& r) { return r.get_str(); }

Rational rational_pow(const Rational& base, long exponent) {
    if (exponent == 0) return Rational(1);
    if (exponent < 0) {
        if (base == 0) throw std::domain_error("division by zero in rational power");
        return rational_pow(Rational(1) / base, -exponent);
    }
    Integer num, den;
    mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(exponent));
    mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(exponent));
    Rational r(num, den);
    r.canonicalize();
    return r;
}

namespace {

std::optional<Integer> exact_integer_root(const Integer& value, unsigned long q) {
    Integer root;
    if (mpz_root(root.get_mpz_t(), value.get_mpz_t(), q) != 0) return root;
    return std::nullopt;
}

}  // namespace

std::optional<Rational> exact_root(const Rational& r, unsigned long q) {
    if (q == 1) return r;
    if (r < 0 && q % 2 == 0) return std::nullopt;
    const bool negative = r < 0;
    Integer num = abs(r.get_num());
    auto nr = exact_integer_root(num, q);
    if (!nr) return std::nullopt;
    auto dr = exact_integer_root(r.get_den(), q);
    if (!dr) return std::nullopt;
    Rational out(negative ? Integer(-*nr) : *nr, *dr);
    out.canonicalize();
    return out;
}

Frac::Frac(std::int64_t n, std::int64_t d) {
    if (d == 0) throw std::domain_error("zero denominator in exponent");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
    num = g == 0 ? 0 : n / g;
    den = g == 0 ? 1 : d / g;
}

Frac Frac::from_rational(const Rational& r) {
    if (!r.get_num().fits_slong_p() || !r.get_den().fits_slong_p())
        throw std::overflow_error("exponent does not fit a machine fraction: " + r.get_str());
    return Frac(r.get_num().get_si(), r.get_den().get_si());
}

Rational Frac::to_rational() const { return make_rational(static_cast<long>(num), static_cast<long>(den)); }

std::int64_t Frac::floor() const {
    if (num >= 0) return num / den;
    return -((-num + den - 1) / den);
}

Frac operator+(Frac a, Frac b) {
    const std::int64_t l = lcm64(a.den, b.den);
    return Frac(a.num * (l / a.den) + b.num * (l / b.den), l);
}

Frac operator-(Frac a, Frac b) { return a + (-b); }

Frac operator*(Frac a, Frac b) { return Frac(a.num * b.num, a.den * b.den); }

bool operator<(Frac a, Frac b) { return a.num * b.den < b.num * a.den; }

std::int64_t lcm64(std::int64_t a, std::int64_t b) {
    if (a == 0 || b == 0) return 0;
    return (a / std::gcd(a, b)) * b;
}

}  // namespace jetsolve
