#include "jetsolve/rnf.hpp"

#include <cmath>
#include <deque>
#include <mutex>
#include <random>
#include <unordered_map>

namespace jetsolve {

namespace {

struct AtomKey {
    AtomKind kind;
    Expr expr;
};

struct AtomKeyLess {
    bool operator()(const AtomKey& a, const AtomKey& b) const {
        if (a.kind != b.kind) return a.kind < b.kind;
        return compare(a.expr, b.expr) < 0;
    }
};

struct AtomTable {
    std::mutex mu;
    std::deque<AtomInfo> regular;   // id = index
    std::deque<AtomInfo> radicals;  // id = -(index + 1)
    std::map<AtomKey, int, AtomKeyLess> index;
};

AtomTable& atoms() {
    static AtomTable table;
    return table;
}

int intern(AtomKind kind, const Expr& expr, const Poly& base = Poly()) {
    AtomTable& t = atoms();
    std::lock_guard<std::mutex> lock(t.mu);
    AtomKey key{kind, expr};
    if (auto it = t.index.find(key); it != t.index.end()) return it->second;
    int id;
    if (kind == AtomKind::Radical) {
        t.radicals.push_back(AtomInfo{kind, expr, base});
        id = -static_cast<int>(t.radicals.size());
    } else {
        t.regular.push_back(AtomInfo{kind, expr, Poly()});
        id = static_cast<int>(t.regular.size()) - 1;
    }
    t.index.emplace(std::move(key), id);
    return id;
}

struct RnfCache {
    std::mutex mu;
    std::unordered_map<Expr, Rnf, ExprHash> map;
};

RnfCache& rnf_cache() {
    static RnfCache cache;
    return cache;
}

const Rnf& one_rnf() {
    static const Rnf one{Poly(Rational(1)), Poly(Rational(1))};
    return one;
}

bool has_reducible_radical(const Poly& p) {
    for (const auto& [m, _] : p.terms())
        for (const auto& [id, e] : m)
            if (id < 0 && !(e < Frac(1))) return true;
    return false;
}

// Radical generators carry exponents in (0, 1); larger exponents release powers of the base.
Poly reduce_radicals(const Poly& p) {
    if (!has_reducible_radical(p)) return p;
    Poly out;
    for (const auto& [m, c] : p.terms()) {
        Monomial keep;
        Poly factor(Rational(1));
        for (const auto& [id, e] : m) {
            if (id < 0 && !(e < Frac(1))) {
                const std::int64_t k = e.floor();
                const Frac rem = e - Frac(k);
                if (!rem.is_zero()) keep.emplace_back(id, rem);
                factor = factor * pow(atom_info(id).base, static_cast<unsigned long>(k));
            } else {
                keep.emplace_back(id, e);
            }
        }
        out += factor.times_monomial(keep, c);
    }
    return reduce_radicals(out);
}

Rnf from_poly(Poly p) { return Rnf{std::move(p), Poly(Rational(1))}; }

Expr monomial_expr(const Monomial& m) {
    std::vector<Expr> factors;
    factors.reserve(m.size());
    for (const auto& [id, e] : m) factors.push_back(atom_expr(id, e));
    return make_mul(std::move(factors));
}

Expr plain_sum(const Poly& p) {
    std::vector<Expr> terms;
    terms.reserve(p.size());
    for (const auto& [m, c] : p.terms()) terms.push_back(make_mul({Expr(c), monomial_expr(m)}));
    return make_add(std::move(terms));
}

Rnf radical_atom(const Poly& base, const Rational& f) {
    const int id = intern(AtomKind::Radical, plain_sum(base), base);
    return from_poly(Poly::generator(id, Frac::from_rational(f)));
}

Rnf rad_const(const Rational& c, const Rational& f) {
    if (c > 0) {
        if (auto root = exact_root(c, f.get_den().get_ui())) return from_poly(Poly(rational_pow(*root, f.get_num().get_si())));
        return radical_atom(Poly(c), f);
    }
    if (mpz_odd_p(f.get_den_mpz_t()) != 0) {
        Rnf r = rad_const(-c, f);
        if (mpz_odd_p(f.get_num_mpz_t()) != 0) r.num = -r.num;
        return r;
    }
    return radical_atom(Poly(c), f);
}

bool is_exp_atom(int id) { return id >= 0 && atom_info(id).kind == AtomKind::Exp; }

// N^f for a nonzero polynomial N and 0 < f < 1.
Rnf rad(const Poly& n, const Rational& f) {
    if (n.is_constant()) return rad_const(n.constant_value(), f);
    const Rational k = rational_content(n);
    const Poly n1 = n.scaled(1 / k);
    const Monomial mc = monomial_content(n1);
    Monomial exps;
    Monomial others;
    for (const auto& [id, e] : mc) (is_exp_atom(id) ? exps : others).emplace_back(id, e);

    Rnf out = rad_const(k, f);
    if (!exps.empty()) {
        Monomial scaled;
        for (const auto& [id, e] : exps) scaled.emplace_back(id, e * Frac::from_rational(f));
        out = rnf_mul(out, from_poly(Poly::monomial(scaled)));
    }
    const Poly inner = exps.empty() ? n1 : *divide_exact(n1, Poly::monomial(exps));
    if (inner.is_constant()) return rnf_mul(out, rad_const(inner.constant_value(), f));
    if (inner.size() == 1) {
        const auto& [m, c] = *inner.terms().begin();
        if (c > 0 && m.size() == 1 && (m.front().second.num % 2 != 0)) {
            Monomial single{{m.front().first, m.front().second * Frac::from_rational(f)}};
            return rnf_mul(out, from_poly(Poly::monomial(single)));
        }
    }
    return rnf_mul(out, radical_atom(inner, f));
}

// N^(-f) = N^(1-f) / N, keeping radicals in the numerator.
Rnf rad_inverse(const Poly& n, const Rational& f) {
    Rnf r = rad(n, 1 - f);
    return rnf_div(r, from_poly(n));
}

Rnf rnf_pow_rational(const Rnf& r, const Rational& q) {
    if (is_integer(q)) {
        if (!q.get_num().fits_slong_p()) throw std::overflow_error("exponent too large");
        return rnf_pow(r, q.get_num().get_si());
    }
    if (r.is_zero()) {
        if (q > 0) return Rnf{};
        throw std::domain_error("division by zero");
    }
    Integer fl;
    mpz_fdiv_q(fl.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    const Rational f = q - Rational(fl);
    Rnf out = rnf_pow(r, fl.get_si());
    out = rnf_mul(out, rad(r.num, f));
    if (!(r.den.is_constant() && r.den.constant_value() == 1)) out = rnf_mul(out, rad_inverse(r.den, f));
    return out;
}

Rnf compute_rnf(const Expr& e);

Rnf rnf_exp(const Expr& arg) {
    const Rnf r = to_rnf(arg);
    Rnf out = one_rnf();
    for (const auto& [m, c] : r.num.terms()) {
        Rnf piece = rnf_normalize(Poly::monomial(m), r.den);
        const Rational lead = piece.num.leading_coefficient();
        piece.num = piece.num.scaled(1 / lead);
        const Rational power = c * lead;
        const Expr kernel = make_func(FuncKind::Exp, to_expr(piece));
        if (!kernel.is_func(FuncKind::Exp)) {
            out = rnf_mul(out, rnf_pow_rational(to_rnf(kernel), power));
            continue;
        }
        Frac fe;
        try {
            fe = Frac::from_rational(power);
        } catch (const std::overflow_error&) {
            const int whole = intern(AtomKind::Exp, make_func(FuncKind::Exp, arg));
            return from_poly(Poly::generator(whole));
        }
        const int id = intern(AtomKind::Exp, kernel);
        if (fe > Frac(0)) {
            out = rnf_mul(out, from_poly(Poly::generator(id, fe)));
        } else {
            out = rnf_mul(out, Rnf{Poly(Rational(1)), Poly::generator(id, -fe)});
        }
    }
    return out;
}

AtomKind kind_of(FuncKind f) {
    switch (f) {
        case FuncKind::Exp: return AtomKind::Exp;
        case FuncKind::Log: return AtomKind::Log;
        case FuncKind::Sin: return AtomKind::Sin;
        case FuncKind::Cos: return AtomKind::Cos;
    }
    return AtomKind::Log;
}

Rnf compute_rnf(const Expr& e) {
    switch (e.kind()) {
        case ExprKind::Number: return from_poly(Poly(e.number()));
        case ExprKind::Symbol: return from_poly(Poly::generator(symbol_atom(e.symbol())));
        case ExprKind::Add: {
            Rnf acc;
            for (const auto& t : e.operands()) acc = rnf_add(acc, to_rnf(t));
            return acc;
        }
        case ExprKind::Mul: {
            Rnf acc = one_rnf();
            for (const auto& f : e.operands()) acc = rnf_mul(acc, to_rnf(f));
            return acc;
        }
        case ExprKind::Pow: return rnf_pow_rational(to_rnf(e.base()), e.exponent());
        case ExprKind::Func: {
            if (e.func() == FuncKind::Exp) return rnf_exp(e.arg());
            const Expr canonical = make_func(e.func(), simplify(e.arg()));
            if (!canonical.is_func(e.func())) return to_rnf(canonical);
            return from_poly(Poly::generator(intern(kind_of(e.func()), canonical)));
        }
    }
    return Rnf{};
}

}  // namespace

const AtomInfo& atom_info(int id) {
    AtomTable& t = atoms();
    std::lock_guard<std::mutex> lock(t.mu);
    if (id < 0) return t.radicals.at(static_cast<std::size_t>(-id - 1));
    return t.regular.at(static_cast<std::size_t>(id));
}

int symbol_atom(const Symbol& s) { return intern(AtomKind::Symbol, Expr(s)); }

Expr atom_expr(int id, Frac exponent) {
    const AtomInfo& info = atom_info(id);
    return make_pow(info.expr, exponent.to_rational());
}

Rnf rnf_normalize(Poly num, Poly den) {
    if (den.is_zero()) throw std::domain_error("division by zero");
    if (num.is_zero()) return Rnf{};
    if (!den.is_constant() && !num.is_constant()) {
        const Poly g = gcd(num, den);
        if (!g.is_constant()) {
            num = *divide_exact(num, g);
            den = *divide_exact(den, g);
        }
    }
    const Rational lc = den.leading_coefficient();
    if (lc != 1) {
        num = num.scaled(1 / lc);
        den = den.scaled(1 / lc);
    }
    return Rnf{std::move(num), std::move(den)};
}

Rnf rnf_add(const Rnf& a, const Rnf& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const bool unit_a = a.den.is_constant();
    const bool unit_b = b.den.is_constant();
    if (unit_a && unit_b) {
        Poly n = a.num.scaled(1 / a.den.constant_value()) + b.num.scaled(1 / b.den.constant_value());
        return Rnf{std::move(n), Poly(Rational(1))};
    }
    const Poly g = gcd(a.den, b.den);
    const Poly ca = *divide_exact(a.den, g);
    const Poly cb = *divide_exact(b.den, g);
    Poly n = reduce_radicals(a.num * cb + b.num * ca);
    Poly d = reduce_radicals(a.den * cb);
    return rnf_normalize(std::move(n), std::move(d));
}

Rnf rnf_sub(const Rnf& a, const Rnf& b) { return rnf_add(a, Rnf{-b.num, b.den}); }

Rnf rnf_mul(const Rnf& a, const Rnf& b) {
    if (a.is_zero() || b.is_zero()) return Rnf{};
    if (a.den.is_constant() && b.den.is_constant() && (a.num.is_constant() || b.num.is_constant())) {
        Poly n = reduce_radicals(a.num * b.num);
        const Rational d = a.den.constant_value() * b.den.constant_value();
        return Rnf{n.scaled(1 / d), Poly(Rational(1))};
    }
    Poly n = reduce_radicals(a.num * b.num);
    Poly d = reduce_radicals(a.den * b.den);
    return rnf_normalize(std::move(n), std::move(d));
}

Rnf rnf_div(const Rnf& a, const Rnf& b) {
    if (b.is_zero()) throw std::domain_error("division by zero");
    return rnf_mul(a, Rnf{b.den, b.num});
}

Rnf rnf_pow(const Rnf& a, long n) {
    if (n == 0) return one_rnf();
    if (n == 1) return a;
    if (n < 0) {
        if (a.is_zero()) throw std::domain_error("division by zero");
        return rnf_pow(rnf_normalize(a.den, a.num), -n);
    }
    const auto k = static_cast<unsigned long>(n);
    return rnf_normalize(reduce_radicals(pow(a.num, k)), reduce_radicals(pow(a.den, k)));
}

Rnf to_rnf(const Expr& e) {
    if (e.is_number()) return from_poly(Poly(e.number()));
    RnfCache& cache = rnf_cache();
    {
        std::lock_guard<std::mutex> lock(cache.mu);
        if (auto it = cache.map.find(e); it != cache.map.end()) return it->second;
    }
    Rnf r = compute_rnf(e);
    std::lock_guard<std::mutex> lock(cache.mu);
    if (cache.map.size() > 200000) cache.map.clear();
    cache.map.emplace(e, r);
    return r;
}

Expr poly_to_expr(const Poly& p) {
    if (p.is_zero()) return Expr(0);
    const Monomial mc = monomial_content(p);
    std::vector<Expr> terms;
    terms.reserve(p.size());
    for (const auto& [m, c] : p.terms()) terms.push_back(make_mul({Expr(c), monomial_expr(*mono_div(m, mc))}));
    return make_mul({monomial_expr(mc), make_add(std::move(terms))});
}

Expr to_expr(const Rnf& r) {
    if (r.is_zero()) return Expr(0);
    if (r.den.is_constant()) return make_mul({Expr(1 / r.den.constant_value()), poly_to_expr(r.num)});
    return make_mul({poly_to_expr(r.num), make_pow(poly_to_expr(r.den), Rational(-1))});
}

Expr simplify(const Expr& e) { return to_expr(to_rnf(e)); }

bool exactly_equal(const Expr& a, const Expr& b) {
    if (a == b) return true;
    return to_rnf(a - b).is_zero();
}

const char* verdict_name(ZeroVerdict v) {
    switch (v) {
        case ZeroVerdict::Zero: return "zero";
        case ZeroVerdict::ProbablyZero: return "probably-zero";
        case ZeroVerdict::Nonzero: return "nonzero";
        case ZeroVerdict::Indeterminate: return "indeterminate";
    }
    return "?";
}

std::optional<double> real_pow(double base, const Rational& exponent) {
    if (base == 0 && exponent < 0) return std::nullopt;
    if (is_integer(exponent)) return std::pow(base, exponent.get_d());
    if (base < 0) {
        if (mpz_even_p(exponent.get_den_mpz_t()) != 0) return std::nullopt;
        const double mag = std::pow(-base, exponent.get_d());
        return mpz_odd_p(exponent.get_num_mpz_t()) != 0 ? -mag : mag;
    }
    return std::pow(base, exponent.get_d());
}

namespace {

std::mutex& defaults_mutex() {
    static std::mutex mu;
    return mu;
}

ZeroTestOptions& defaults_storage() {
    static ZeroTestOptions options;
    return options;
}

double sample_coordinate(std::mt19937_64& rng) {
    const int q = std::uniform_int_distribution<int>(1, 8)(rng);
    const int p = std::uniform_int_distribution<int>((q + 1) / 2, 10 * q)(rng);
    const double v = static_cast<double>(p) / q;
    return std::bernoulli_distribution(0.5)(rng) ? v : -v;
}

struct PolyEvaluator {
    std::vector<std::pair<std::pair<int, Frac>, Expr>> factors;  // distinct generator powers

    explicit PolyEvaluator(const std::vector<const Poly*>& polys) {
        std::map<std::pair<int, std::pair<std::int64_t, std::int64_t>>, bool> seen;
        for (const Poly* p : polys)
            for (const auto& [m, _] : p->terms())
                for (const auto& [id, e] : m) {
                    auto key = std::make_pair(id, std::make_pair(e.num, e.den));
                    if (seen.emplace(key, true).second) factors.push_back({{id, e}, atom_expr(id, e)});
                }
    }

    // Returns false when some generator is undefined at the point.
    bool bind(const Point& point, std::map<std::pair<int, std::pair<std::int64_t, std::int64_t>>, double>& values) const {
        values.clear();
        for (const auto& [ge, expr] : factors) {
            double v;
            try {
                v = eval(expr, point);
            } catch (const EvalError&) {
                return false;
            }
            values[{ge.first, {ge.second.num, ge.second.den}}] = v;
        }
        return true;
    }

    static std::pair<double, double> value_and_scale(
        const Poly& p, const std::map<std::pair<int, std::pair<std::int64_t, std::int64_t>>, double>& values) {
        double sum = 0;
        double scale = 0;
        for (const auto& [m, c] : p.terms()) {
            double t = c.get_d();
            for (const auto& [id, e] : m) t *= values.at({id, {e.num, e.den}});
            sum += t;
            scale = std::max(scale, std::fabs(t));
        }
        return {sum, scale};
    }
};

ZeroTestResult numeric_only_test(const Expr& e, const ZeroTestOptions& options) {
    ZeroTestResult result;
    std::mt19937_64 rng(options.seed ^ (e.hash() * 0x9e3779b97f4a7c15ULL));
    const SymbolSet syms = free_symbols(e);
    int attempts = 0;
    while (result.points < options.samples && attempts < options.max_attempts) {
        ++attempts;
        Point p;
        for (const auto& s : syms) p[s] = sample_coordinate(rng);
        double value;
        double scale = 0;
        try {
            value = eval(e, p);
            if (e.is_add()) {
                for (const auto& t : e.operands()) scale = std::max(scale, std::fabs(eval(t, p)));
            } else {
                scale = std::fabs(value);
            }
        } catch (const EvalError&) {
            continue;
        }
        ++result.points;
        if (scale == 0) continue;
        const double rel = std::fabs(value) / scale;
        result.max_relative = std::max(result.max_relative, rel);
        if (rel > options.tolerance) {
            result.verdict = ZeroVerdict::Nonzero;
            return result;
        }
    }
    result.verdict = result.points == 0 ? ZeroVerdict::Indeterminate : ZeroVerdict::ProbablyZero;
    if (result.points == 0) result.note = "every sample point was singular";
    return result;
}

}  // namespace

ZeroTestOptions default_zero_test_options() {
    std::lock_guard<std::mutex> lock(defaults_mutex());
    return defaults_storage();
}

void set_default_zero_test_options(const ZeroTestOptions& options) {
    std::lock_guard<std::mutex> lock(defaults_mutex());
    defaults_storage() = options;
}

ZeroTestResult zero_test(const Expr& e) { return zero_test(e, default_zero_test_options()); }

ZeroTestResult zero_test(const Expr& e, const ZeroTestOptions& options) {
    if (e.is_number()) {
        ZeroTestResult r;
        r.verdict = e.is_zero() ? ZeroVerdict::Zero : ZeroVerdict::Nonzero;
        r.max_relative = e.is_zero() ? 0 : 1;
        return r;
    }
    if (options.numeric_only) return numeric_only_test(e, options);

    const Rnf r = to_rnf(e);
    ZeroTestResult result;
    if (r.num.is_zero()) {
        result.verdict = ZeroVerdict::Zero;
        return result;
    }
    if (r.num.is_constant()) {
        result.verdict = ZeroVerdict::Nonzero;
        result.max_relative = 1;
        return result;
    }

    std::mt19937_64 rng(options.seed ^ (e.hash() * 0x9e3779b97f4a7c15ULL));
    const SymbolSet syms = free_symbols(e);
    const PolyEvaluator evaluator({&r.num, &r.den});
    std::map<std::pair<int, std::pair<std::int64_t, std::int64_t>>, double> values;
    int attempts = 0;
    while (result.points < options.samples && attempts < options.max_attempts) {
        ++attempts;
        Point p;
        for (const auto& s : syms) p[s] = sample_coordinate(rng);
        if (!evaluator.bind(p, values)) continue;
        const auto [den, den_scale] = PolyEvaluator::value_and_scale(r.den, values);
        if (!std::isfinite(den) || std::fabs(den) <= 1e-12 * den_scale) continue;
        const auto [num, num_scale] = PolyEvaluator::value_and_scale(r.num, values);
        if (!std::isfinite(num) || !std::isfinite(num_scale)) continue;
        ++result.points;
        if (num_scale == 0) continue;
        const double rel = std::fabs(num) / num_scale;
        result.max_relative = std::max(result.max_relative, rel);
        if (rel > options.tolerance) {
            result.verdict = ZeroVerdict::Nonzero;
            return result;
        }
    }
    if (result.points == 0) {
        result.verdict = ZeroVerdict::Indeterminate;
        result.note = "every sample point was singular";
    } else {
        result.verdict = ZeroVerdict::ProbablyZero;
        if (result.points < options.samples)
            result.note = "only " + std::to_string(result.points) + " regular sample points";
    }
    return result;
}

}  // namespace jetsolve
