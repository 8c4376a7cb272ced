#pragma once

#include "jetsolve/expr.hpp"
#include "jetsolve/poly.hpp"

#include <cstdint>
#include <string>

namespace jetsolve {

/// Generators of the rational normal form. Radical generators (non-monomial or
/// multi-generator bases raised to a fractional power) get negative ids; their
/// exponent inside a monomial is always kept in (0, 1).
enum class AtomKind : unsigned char { Symbol, Exp, Log, Sin, Cos, Radical };

struct AtomInfo {
    AtomKind kind = AtomKind::Symbol;
    Expr expr;  // Symbol: the symbol; functions: the kernel at power 1; Radical: the base
    Poly base;  // Radical only
};

/// Thread-safe lookups into the process-wide generator table.
const AtomInfo& atom_info(int id);
int symbol_atom(const Symbol& s);
Expr atom_expr(int id, Frac exponent = Frac(1));

/// P/Q with gcd(P, Q) = 1 and Q's leading coefficient equal to 1.
struct Rnf {
    Poly num;
    Poly den = Poly(Rational(1));

    [[nodiscard]] bool is_zero() const { return num.is_zero(); }
};

Rnf to_rnf(const Expr& e);
Expr to_expr(const Rnf& r);
Expr poly_to_expr(const Poly& p);
/// Rational normal form rendered back as an expression (expanded numerator and
/// denominator with monomial and numeric content factored out).
Expr simplify(const Expr& e);

Rnf rnf_add(const Rnf& a, const Rnf& b);
Rnf rnf_sub(const Rnf& a, const Rnf& b);
Rnf rnf_mul(const Rnf& a, const Rnf& b);
Rnf rnf_div(const Rnf& a, const Rnf& b);
Rnf rnf_pow(const Rnf& a, long n);
/// Cancels the gcd and makes the denominator monic.
Rnf rnf_normalize(Poly num, Poly den);

enum class ZeroVerdict : unsigned char { Zero, ProbablyZero, Nonzero, Indeterminate };
const char* verdict_name(ZeroVerdict v);

struct ZeroTestOptions {
    int samples = 8;
    double tolerance = 1e-9;
    std::uint64_t seed = 0x5eed;
    bool numeric_only = false;
    int max_attempts = 400;
};

struct ZeroTestResult {
    ZeroVerdict verdict = ZeroVerdict::Indeterminate;
    int points = 0;
    double max_relative = 0;  // largest |value| / scale seen
    std::string note;

    [[nodiscard]] bool positive() const { return verdict == ZeroVerdict::Zero || verdict == ZeroVerdict::ProbablyZero; }
};

/// Process-wide defaults (the CLI's --numeric-only flips numeric_only).
ZeroTestOptions default_zero_test_options();
void set_default_zero_test_options(const ZeroTestOptions& options);

/// Exact when the normal form's numerator vanishes; otherwise sampled at random
/// rational points from [-10,-1/2] U [1/2,10], avoiding singular points.
ZeroTestResult zero_test(const Expr& e, const ZeroTestOptions& options);
ZeroTestResult zero_test(const Expr& e);

/// Structural identity after normalization: simplify(a - b) == 0 exactly.
bool exactly_equal(const Expr& a, const Expr& b);

/// Real power with the sign conventions of `eval`; nullopt outside the domain.
std::optional<double> real_pow(double base, const Rational& exponent);

}  // namespace jetsolve
