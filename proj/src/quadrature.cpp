#include "jetsolve/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace jetsolve {

namespace {

// ---------------------------------------------------------------------------
// Univariate polynomials in w with coefficients in the field of w-free normal forms.

using UPoly = std::vector<Rnf>;

Rnf rnf_const(const Rational& c) { return Rnf{Poly(c), Poly(Rational(1))}; }
Rnf rnf_of(const Poly& p) { return Rnf{p, Poly(Rational(1))}; }

void trim(UPoly& p) {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
}

int degree(const UPoly& p) { return static_cast<int>(p.size()) - 1; }

UPoly from_poly(const Poly& p, int id) {
    UPoly out;
    for (const auto& c : coefficients_in(p, id)) out.push_back(rnf_of(c));
    trim(out);
    return out;
}

UPoly sub(const UPoly& a, const UPoly& b) {
    UPoly out(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < out.size(); ++i) {
        const Rnf x = i < a.size() ? a[i] : Rnf{};
        const Rnf y = i < b.size() ? b[i] : Rnf{};
        out[i] = rnf_sub(x, y);
    }
    trim(out);
    return out;
}

UPoly mul(const UPoly& a, const UPoly& b) {
    if (a.empty() || b.empty()) return {};
    UPoly out(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] = rnf_add(out[i + j], rnf_mul(a[i], b[j]));
    trim(out);
    return out;
}

UPoly scale(const UPoly& a, const Rnf& c) {
    UPoly out;
    for (const auto& x : a) out.push_back(rnf_mul(x, c));
    trim(out);
    return out;
}

UPoly derivative(const UPoly& a) {
    UPoly out;
    for (std::size_t i = 1; i < a.size(); ++i) out.push_back(rnf_mul(a[i], rnf_const(Rational(static_cast<long>(i)))));
    trim(out);
    return out;
}

std::pair<UPoly, UPoly> divmod(UPoly a, const UPoly& b) {
    const int db = degree(b);
    if (db < 0) throw std::domain_error("polynomial division by zero");
    UPoly q(std::max(0, degree(a) - db + 1));
    while (degree(a) >= db) {
        const int shift = degree(a) - db;
        const Rnf f = rnf_div(a.back(), b.back());
        q[static_cast<std::size_t>(shift)] = f;
        for (int i = 0; i <= db; ++i) {
            auto& slot = a[static_cast<std::size_t>(i + shift)];
            slot = rnf_sub(slot, rnf_mul(f, b[static_cast<std::size_t>(i)]));
        }
        a.back() = Rnf{};
        trim(a);
    }
    trim(q);
    return {q, a};
}

UPoly monic(const UPoly& a) { return a.empty() ? a : scale(a, rnf_div(rnf_const(Rational(1)), a.back())); }

UPoly ugcd(UPoly a, UPoly b) {
    while (!b.empty()) {
        UPoly r = divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return monic(a);
}

Rnf evaluate(const UPoly& p, const Rnf& r) {
    Rnf acc;
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = rnf_add(rnf_mul(acc, r), *it);
    return acc;
}

// p(r + s) as a polynomial in s.
UPoly shift(const UPoly& p, const Rnf& r) {
    UPoly acc;
    const UPoly lin{r, rnf_const(Rational(1))};
    for (auto it = p.rbegin(); it != p.rend(); ++it) {
        acc = mul(acc, lin);
        if (acc.empty()) acc.push_back(Rnf{});
        acc[0] = rnf_add(acc[0], *it);
        trim(acc);
    }
    return acc;
}

// Yun's decomposition of a monic Q into coprime squarefree factors (all multiplicities).
std::vector<UPoly> squarefree_factors(const UPoly& Q) {
    std::vector<UPoly> out;
    const UPoly dQ = derivative(Q);
    const UPoly a0 = ugcd(Q, dQ);
    UPoly b = divmod(Q, a0).first;
    UPoly c = divmod(dQ, a0).first;
    UPoly d = sub(c, derivative(b));
    while (degree(b) >= 1) {
        const UPoly a = ugcd(b, d);
        if (degree(a) >= 1) out.push_back(a);
        b = divmod(b, a).first;
        c = divmod(d, a).first;
        d = sub(c, derivative(b));
    }
    return out;
}

// Exact square root of a polynomial, by successive leading terms.
std::optional<Poly> poly_sqrt(const Poly& p) {
    if (p.is_zero()) return Poly();
    const auto& lm = p.leading_monomial();
    const auto root = exact_root(p.leading_coefficient(), 2);
    if (!root || p.leading_coefficient() < 0) return std::nullopt;
    Monomial half;
    for (const auto& [id, e] : lm) half.emplace_back(id, e * Frac(1, 2));
    Poly s = Poly::monomial(half, *root);
    const Monomial s_lead = half;
    const Rational s_coeff = *root;
    for (std::size_t guard = 0; guard < 4 * p.size() + 4; ++guard) {
        const Poly r = p - s * s;
        if (r.is_zero()) return s;
        auto q = mono_div(r.leading_monomial(), s_lead);
        if (!q || compare_monomials(*q, s.terms().begin()->first) >= 0) return std::nullopt;
        s.add_term(*q, r.leading_coefficient() / (2 * s_coeff));
    }
    return std::nullopt;
}

std::optional<Rnf> rnf_sqrt(const Rnf& r) {
    auto n = poly_sqrt(r.num);
    if (!n) return std::nullopt;
    auto d = poly_sqrt(r.den);
    if (!d) return std::nullopt;
    return rnf_normalize(*n, *d);
}

Expr upoly_expr(const UPoly& p, const Symbol& w) {
    std::vector<Expr> terms;
    for (std::size_t i = 0; i < p.size(); ++i) terms.push_back(to_expr(p[i]) * pow(Expr(w), static_cast<long>(i)));
    return make_add(std::move(terms));
}

// ---------------------------------------------------------------------------
// Logarithms with oriented arguments.

int sign_of(const Rational& r) { return r > 0 ? 1 : (r < 0 ? -1 : 0); }

// Leading coefficient sign of the part of p free of generator id (or of the
// coefficient of id when that part is empty).
int orientation_sign(const Poly& p, int id, bool prefer_variable) {
    Poly free_part;
    Poly with_var;
    for (const auto& [m, c] : p.terms()) (mono_exponent(m, id).is_zero() ? free_part : with_var).add_term(m, c);
    const Poly& ref = (prefer_variable || free_part.is_zero()) ? with_var : free_part;
    return ref.is_zero() ? 1 : sign_of(ref.leading_coefficient());
}

struct LogTerm {
    Expr coefficient;
    Expr argument;
};

// Groups logs whose coefficients agree up to sign into a single product/quotient.
Expr combine_logs(const std::vector<LogTerm>& logs) {
    struct Group {
        Expr coefficient;
        std::vector<Expr> num;
        std::vector<Expr> den;
    };
    std::vector<Group> groups;
    for (const auto& l : logs) {
        bool placed = false;
        for (auto& g : groups) {
            if (exactly_equal(l.coefficient, g.coefficient)) {
                g.num.push_back(l.argument);
                placed = true;
            } else if (exactly_equal(l.coefficient, -g.coefficient)) {
                g.den.push_back(l.argument);
                placed = true;
            }
            if (placed) break;
        }
        if (!placed) groups.push_back(Group{l.coefficient, {l.argument}, {}});
    }
    std::vector<Expr> terms;
    for (const auto& g : groups) {
        Expr arg = make_mul(g.num);
        if (!g.den.empty()) arg = arg / make_mul(g.den);
        terms.push_back(g.coefficient * log(arg));
    }
    return make_add(std::move(terms));
}

// ---------------------------------------------------------------------------
// Antiderivative classes.

bool atom_depends(int id, int w_id, const Symbol& w) {
    if (id == w_id) return true;
    return depends_on(atom_info(id).expr, w);
}

bool poly_free_of(const Poly& p, int w_id, const Symbol& w) {
    for (int id : p.generators())
        if (atom_depends(id, w_id, w)) return false;
    return true;
}

std::optional<Antiderivative> rational_class(const Rnf& f, const Symbol& w) {
    const int id = symbol_atom(w);
    for (const Poly* p : {&f.num, &f.den}) {
        for (int g : p->generators())
            if (g != id && atom_depends(g, id, w)) return std::nullopt;
        if (exponent_denominator(*p, id) != 1) return std::nullopt;
    }
    Antiderivative out;
    UPoly P = from_poly(f.num, id);
    UPoly Q = from_poly(f.den, id);
    const Rnf lc = Q.back();
    P = scale(P, rnf_div(rnf_const(Rational(1)), lc));
    Q = monic(Q);
    auto [poly_part, rem] = divmod(P, Q);

    std::vector<Expr> rational_terms;
    for (std::size_t k = 0; k < poly_part.size(); ++k)
        rational_terms.push_back(to_expr(poly_part[k]) * pow(Expr(w), static_cast<long>(k + 1)) /
                                 Expr(static_cast<long>(k + 1)));
    std::vector<LogTerm> logs;
    if (!rem.empty()) {
        std::vector<Rnf> roots;
        for (const UPoly& factor : squarefree_factors(Q)) {
            if (degree(factor) == 1) {
                roots.push_back(rnf_sub(Rnf{}, factor[0]));
            } else if (degree(factor) == 2) {
                const Rnf& b = factor[1];
                const Rnf& c = factor[0];
                const Rnf disc = rnf_sub(rnf_mul(b, b), rnf_mul(rnf_const(Rational(4)), c));
                auto s = rnf_sqrt(disc);
                if (!s) {
                    out.failure = "quadratic factor " + to_string(upoly_expr(factor, w)) + " does not split";
                    return out;
                }
                const Rnf half = rnf_const(Rational(1, 2));
                roots.push_back(rnf_mul(half, rnf_add(rnf_sub(Rnf{}, b), *s)));
                roots.push_back(rnf_mul(half, rnf_sub(rnf_sub(Rnf{}, b), *s)));
            } else {
                out.failure = "denominator factor " + to_string(upoly_expr(factor, w)) + " of degree " +
                              std::to_string(degree(factor)) + " does not split";
                return out;
            }
        }
        for (const auto& r : roots) {
            UPoly rest = Q;
            int m = 0;
            const UPoly lin{rnf_sub(Rnf{}, r), rnf_const(Rational(1))};
            while (degree(rest) >= 1 && evaluate(rest, r).is_zero()) {
                rest = divmod(rest, lin).first;
                ++m;
            }
            // Laurent coefficients of rem/Q at w = r from the series of rem/rest.
            const UPoly T = shift(rem, r);
            const UPoly R = shift(rest, r);
            std::vector<Rnf> g_series;
            for (int j = 0; j < m; ++j) {
                Rnf acc = static_cast<std::size_t>(j) < T.size() ? T[static_cast<std::size_t>(j)] : Rnf{};
                for (int i = 0; i < j; ++i) {
                    const std::size_t k = static_cast<std::size_t>(j - i);
                    if (k < R.size()) acc = rnf_sub(acc, rnf_mul(g_series[static_cast<std::size_t>(i)], R[k]));
                }
                g_series.push_back(rnf_div(acc, R[0]));
            }
            const Expr root = to_expr(r);
            for (int l = 2; l <= m; ++l) {
                const Rnf& A = g_series[static_cast<std::size_t>(m - l)];
                if (A.is_zero()) continue;
                rational_terms.push_back(-to_expr(A) / (Expr(static_cast<long>(l - 1)) *
                                                        pow(Expr(w) - root, static_cast<long>(l - 1))));
            }
            const Rnf& A1 = g_series[static_cast<std::size_t>(m - 1)];
            if (A1.is_zero()) continue;
            Poly S = r.den * Poly::generator(id) - r.num;
            S = primitive_normalized(S);
            const bool independent = w.role() == SymbolRole::IndependentX || w.role() == SymbolRole::IndependentT;
            if (orientation_sign(S, id, independent) < 0) S = -S;
            const Expr arg = poly_to_expr(S);
            logs.push_back(LogTerm{simplify(to_expr(A1)), arg});
            out.side_conditions.push_back(to_string(arg) + " > 0");
        }
    }
    out.ok = true;
    out.value = simplify(make_add(std::move(rational_terms))) + combine_logs(logs);
    return out;
}

// Sums of K * w^p * exp(a*w + b) over a w-free denominator.
std::optional<Antiderivative> exp_power_class(const Rnf& f, const Symbol& w) {
    const int id = symbol_atom(w);
    if (!poly_free_of(f.den, id, w)) return std::nullopt;
    std::vector<Expr> terms;
    Antiderivative out;
    for (const auto& [m, c] : f.num.terms()) {
        Frac p(0);
        std::vector<Expr> rate_terms;
        for (const auto& [g, e] : m) {
            if (g == id) {
                p = e;
                continue;
            }
            if (!atom_depends(g, id, w)) continue;
            const AtomInfo& info = atom_info(g);
            if (info.kind != AtomKind::Exp) return std::nullopt;
            rate_terms.push_back(Expr(e.to_rational()) * diff(info.expr.arg(), w));
        }
        const Expr rate = simplify(make_add(rate_terms));
        if (depends_on(rate, w)) return std::nullopt;
        const Expr term = to_expr(rnf_of(Poly::monomial(m, c)));
        const Expr rest = simplify(term / pow(Expr(w), p.to_rational()));
        if (rate.is_zero()) {
            if (p == Frac(-1)) {
                terms.push_back(rest * log(Expr(w)));
                out.side_conditions.push_back(w.display() + " > 0");
            } else {
                const Rational q = p.to_rational() + 1;
                terms.push_back(rest * pow(Expr(w), q) / Expr(q));
            }
            continue;
        }
        if (!p.is_integer() || p.num < 0) return std::nullopt;
        // ∫ w^n e^{aw} = e^{aw} Σ_j (-1)^j n!/(n-j)! w^{n-j} / a^{j+1}
        const long n = p.num;
        std::vector<Expr> series;
        Rational falling(1);
        for (long j = 0; j <= n; ++j) {
            const Rational sgn = (j % 2 == 0) ? Rational(1) : Rational(-1);
            series.push_back(Expr(sgn * falling) * pow(Expr(w), n - j) / pow(rate, j + 1));
            falling *= Rational(n - j);
        }
        terms.push_back(rest * make_add(series));
    }
    out.ok = true;
    out.value = simplify(make_add(terms) / to_expr(rnf_of(f.den)));
    return out;
}

// f = k * g'/g with g the denominator, or f = k * g * g' with g the numerator.
std::optional<Antiderivative> log_derivative_class(const Rnf& f, const Symbol& w) {
    for (const Poly* p : {&f.den, &f.num}) {
        const Expr g = poly_to_expr(*p);
        if (!depends_on(g, w)) continue;
        const Expr dg = diff(g, w);
        if (simplify(dg).is_zero()) continue;
        const Expr ratio = simplify(p == &f.den ? to_expr(f) * g / dg : to_expr(f) / (g * dg));
        if (depends_on(ratio, w)) continue;
        Antiderivative out;
        out.ok = true;
        if (p == &f.den) {
            out.value = ratio * log(g);
            out.side_conditions.push_back(to_string(g) + " > 0");
        } else {
            out.value = ratio * pow(g, 2L) / Expr(2);
        }
        return out;
    }
    return std::nullopt;
}

}  // namespace

Antiderivative antiderivative(const Expr& f, const Symbol& w) {
    const Expr fs = simplify(f);
    if (fs.is_zero()) return Antiderivative{true, Expr(), {}, {}};
    if (!depends_on(fs, w)) return Antiderivative{true, fs * Expr(w), {}, {}};
    const Rnf r = to_rnf(fs);
    std::string failure;
    if (auto a = rational_class(r, w)) {
        if (a->ok) return *a;
        failure = a->failure;
    }
    if (auto a = exp_power_class(r, w)) return *a;
    if (auto a = log_derivative_class(r, w)) return *a;
    Antiderivative out;
    out.failure = "no antiderivative for (" + to_string(fs) + ") d" + w.display() +
                  (failure.empty() ? "" : ": " + failure);
    return out;
}

// ---------------------------------------------------------------------------
// Numeric potentials.

namespace {

struct Gauss {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.
const Gauss& gauss_rule() {
    static const Gauss rule = [] {
        constexpr int n = 16;
        Gauss g;
        for (int i = 1; i <= n; ++i) {
            double x = std::cos(M_PI * (i - 0.25) / (n + 0.5));
            double dp = 0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1;
                double p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1);
                const double dx = p1 / dp;
                x -= dx;
                if (std::fabs(dx) < 1e-16) break;
            }
            g.nodes.push_back(x);
            g.weights.push_back(2 / ((1 - x * x) * dp * dp));
        }
        return g;
    }();
    return rule;
}

double segment_integral(const Expr& f, Point p, const Symbol& s, double a, double b) {
    constexpr int panels = 24;
    const Gauss& g = gauss_rule();
    double total = 0;
    const double h = (b - a) / panels;
    for (int k = 0; k < panels; ++k) {
        const double lo = a + k * h;
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            p[s] = lo + 0.5 * h * (g.nodes[i] + 1);
            total += 0.5 * h * g.weights[i] * eval(f, p);
        }
    }
    return total;
}

}  // namespace

NumericPotential::NumericPotential(Form omega) : omega_(std::move(omega)) {
    // Base point: every coordinate 1, nudged off singular points.
    SymbolSet others;
    for (const auto& [idx, c] : omega_.terms())
        for (const auto& s : free_symbols(c)) others.insert(s);
    for (int attempt = 0; attempt < 20; ++attempt) {
        Point p;
        for (const auto& s : others) p[s] = 1.0;
        for (std::size_t i = 0; i < omega_.coords().size(); ++i)
            p[omega_.coords()[i]] = 1.0 + 0.137 * attempt * static_cast<double>(i + 1);
        bool fine = true;
        for (const auto& [idx, c] : omega_.terms()) {
            try {
                if (!std::isfinite(eval(c, p))) fine = false;
            } catch (const EvalError&) {
                fine = false;
            } catch (const std::domain_error&) {
                fine = false;
            }
        }
        if (fine || attempt == 19) {
            for (const auto& s : omega_.coords()) base_[s] = p[s];
            return;
        }
    }
}

double NumericPotential::operator()(const Point& p) const {
    Point cur = p;
    for (const auto& [s, v] : base_) cur[s] = v;
    double total = 0;
    for (std::size_t i = 0; i < omega_.coords().size(); ++i) {
        const Symbol& s = omega_.coords()[i];
        const auto target = p.find(s);
        if (target == p.end()) throw EvalError("unbound coordinate " + s.display());
        const Expr c = omega_.coefficient(s);
        if (!c.is_zero()) total += segment_integral(c, cur, s, base_.at(s), target->second);
        cur[s] = target->second;
    }
    return total;
}

const char* potential_kind_name(PotentialKind k) {
    switch (k) {
        case PotentialKind::Symbolic: return "symbolic";
        case PotentialKind::Numeric: return "numeric";
        case PotentialKind::NotClosed: return "not-closed";
    }
    return "?";
}

namespace {

bool has_log(const Expr& e) {
    bool found = false;
    visit(e, [&](const Expr& n) { found = found || n.is_func(FuncKind::Log); });
    return found;
}

// Normal form for the log-free terms, logs kept as written.
Expr tidy(const Expr& F) {
    std::vector<Expr> plain;
    std::vector<Expr> logs;
    for (const auto& t : F.is_add() ? F.operands() : std::vector<Expr>{F}) (has_log(t) ? logs : plain).push_back(t);
    logs.insert(logs.begin(), simplify(make_add(plain)));
    return make_add(std::move(logs));
}

}  // namespace

Potential integrate_closed(const Form& omega) {
    Potential out;
    if (omega.degree() != 1) throw std::invalid_argument("integrate_closed needs a one-form");
    out.closed = closed_mod(omega, {});
    if (!out.closed.closed) {
        out.kind = PotentialKind::NotClosed;
        if (out.closed.witness) {
            std::ostringstream os;
            os << "d(omega) has nonzero coefficient " << to_string(out.closed.witness->second);
            out.failure = os.str();
        } else {
            out.failure = "closedness undecided";
        }
        return out;
    }
    const auto& coords = omega.coords();
    Expr F;
    std::string failure;
    for (std::size_t j = 0; j < coords.size() && failure.empty(); ++j) {
        const Expr residual = simplify(omega.coefficient(coords[j]) - diff(F, coords[j]));
        for (std::size_t k = 0; k < j; ++k)
            if (depends_on(residual, coords[k]) && !zero_test(diff(residual, coords[k])).positive())
                failure = "residual coefficient of d" + coords[j].display() + " depends on " + coords[k].display();
        if (!failure.empty()) break;
        const Antiderivative a = antiderivative(residual, coords[j]);
        if (!a.ok) {
            failure = a.failure;
            break;
        }
        F += a.value;
        for (const auto& sc : a.side_conditions)
            if (std::find(out.side_conditions.begin(), out.side_conditions.end(), sc) == out.side_conditions.end())
                out.side_conditions.push_back(sc);
    }
    if (failure.empty()) {
        out.reconstructed = true;
        for (const auto& s : coords) {
            if (!zero_test(diff(F, s) - omega.coefficient(s)).positive()) {
                out.reconstructed = false;
                failure = "dF differs from omega in the d" + s.display() + " coefficient";
                break;
            }
        }
    }
    if (!failure.empty()) {
        out.kind = PotentialKind::Numeric;
        out.numeric = NumericPotential(omega);
        out.failure = failure;
        out.side_conditions.clear();
        return out;
    }
    out.kind = PotentialKind::Symbolic;
    out.F = tidy(F);
    return out;
}

// ---------------------------------------------------------------------------
// Level sets.

namespace {

std::vector<Expr> terms_of(const Expr& e) { return e.is_add() ? e.operands() : std::vector<Expr>{e}; }

Expr scale_terms(const Expr& e, const Expr& factor) {
    std::vector<Expr> out;
    for (const auto& t : terms_of(e)) out.push_back(t * factor);
    return make_add(std::move(out));
}

struct Solver {
    Symbol c;
    std::set<std::string> reserved;
    std::vector<DerivedConstant> derived;
    std::vector<std::string> side_conditions;

    Symbol fresh_constant() {
        const std::string& name = c.name();
        std::string base = (!name.empty() && name[0] == 'c') ? "k" + name.substr(1) : "k_" + name;
        std::string candidate = base;
        while (reserved.count(candidate) != 0) candidate = "k" + candidate;
        reserved.insert(candidate);
        return Symbol::level_constant(candidate);
    }

    // exp(rhs), splitting off q*log(A) terms as A^q and q*c as a power of a new constant.
    Expr exponential(const Expr& rhs) {
        std::vector<Expr> factors;
        std::vector<Expr> exponent;
        Rational qc(0);
        for (const auto& t : terms_of(rhs)) {
            auto [q, rest] = split_coefficient(t);
            if (rest.is_func(FuncKind::Log)) {
                factors.push_back(pow(rest.arg(), q));
            } else if (rest.is_symbol() && rest.symbol() == c) {
                qc += q;
            } else {
                exponent.push_back(t);
            }
        }
        const Expr remaining = make_add(exponent);
        if (qc != 0) {
            if (depends_on(remaining, c)) {
                exponent.push_back(Expr(qc) * Expr(c));
            } else {
                const Symbol k = fresh_constant();
                const int s = qc > 0 ? 1 : -1;
                const Rational unit = Rational(s) / Rational(qc.get_den());
                derived.push_back(DerivedConstant{k, exp(Expr(unit) * Expr(c))});
                Integer n = qc.get_num();
                if (n < 0) n = -n;
                factors.push_back(pow(Expr(k), n.get_si()));
            }
        }
        if (!exponent.empty()) factors.push_back(exp(make_add(exponent)));
        return make_mul(factors);
    }

    // (αw + β)/(γw + δ) = rhs.
    static std::optional<Expr> mobius(const Expr& lhs, const Expr& rhs, const Symbol& w) {
        const Rnf r = to_rnf(lhs);
        const int id = symbol_atom(w);
        for (const Poly* p : {&r.num, &r.den}) {
            for (int g : p->generators())
                if (g != id && depends_on(atom_info(g).expr, w)) return std::nullopt;
            if (exponent_denominator(*p, id) != 1) return std::nullopt;
        }
        const auto num = coefficients_in(r.num, id);
        const auto den = coefficients_in(r.den, id);
        if (num.size() > 2 || den.size() > 2 || (num.size() < 2 && den.size() < 2)) return std::nullopt;
        auto at = [](const std::vector<Poly>& v, std::size_t k) { return k < v.size() ? poly_to_expr(v[k]) : Expr(); };
        const Expr alpha = at(num, 1), beta = at(num, 0), gamma = at(den, 1), delta = at(den, 0);
        return (delta * rhs - beta) / (alpha - gamma * rhs);
    }

    std::optional<Expr> isolate(Expr lhs, Expr rhs, const Symbol& w, std::string& why) {
        for (int guard = 0; guard < 64; ++guard) {
            if (lhs.is_symbol() && lhs.symbol() == w) return rhs;
            if (auto m = mobius(lhs, rhs, w)) return m;
            switch (lhs.kind()) {
                case ExprKind::Add:
                case ExprKind::Mul: {
                    std::vector<Expr> with;
                    std::vector<Expr> without;
                    for (const auto& o : lhs.operands()) (depends_on(o, w) ? with : without).push_back(o);
                    if (with.size() != 1) {
                        why = w.display() + " occurs in several " + (lhs.is_add() ? "terms" : "factors") + " of " +
                              to_string(lhs);
                        return std::nullopt;
                    }
                    if (lhs.is_add()) {
                        std::vector<Expr> moved = terms_of(rhs);
                        for (const auto& o : without) moved.push_back(-o);
                        rhs = make_add(moved);
                    } else {
                        rhs = scale_terms(rhs, Expr(1) / make_mul(without));
                    }
                    lhs = with.front();
                    break;
                }
                case ExprKind::Pow: {
                    const Rational q = lhs.exponent();
                    if (mpz_even_p(q.get_num_mpz_t()) != 0)
                        side_conditions.push_back(to_string(lhs.base()) + " > 0");
                    rhs = pow(rhs, Rational(1) / q);
                    lhs = lhs.base();
                    break;
                }
                case ExprKind::Func: {
                    if (lhs.func() == FuncKind::Exp) {
                        side_conditions.push_back(to_string(rhs) + " > 0");
                        rhs = log(rhs);
                    } else if (lhs.func() == FuncKind::Log) {
                        side_conditions.push_back(to_string(lhs.arg()) + " > 0");
                        rhs = exponential(rhs);
                    } else {
                        why = "cannot invert " + to_string(lhs);
                        return std::nullopt;
                    }
                    lhs = lhs.arg();
                    break;
                }
                default: why = "cannot isolate " + w.display() + " in " + to_string(lhs); return std::nullopt;
            }
        }
        why = "isolation did not terminate";
        return std::nullopt;
    }
};

bool affine_in(const Expr& F, const Symbol& w) {
    const Expr d = simplify(diff(F, w));
    return !d.is_zero() && !depends_on(d, w);
}

}  // namespace

LevelSolution solve_level_set(const Expr& F, const Symbol& c, const std::vector<Symbol>& chart,
                              const std::set<std::string>& reserved_names) {
    LevelSolution out;
    std::vector<Symbol> affine;
    std::vector<Symbol> other;
    for (const auto& s : chart) {
        if (!s.is_jet() || !depends_on(F, s)) continue;
        (affine_in(F, s) ? affine : other).push_back(s);
    }
    auto by_order = [](const Symbol& a, const Symbol& b) {
        if (a.order() != b.order()) return a.order() > b.order();
        return a.dependent() > b.dependent();
    };
    std::stable_sort(affine.begin(), affine.end(), by_order);
    std::stable_sort(other.begin(), other.end(), by_order);
    std::vector<Symbol> candidates = affine;
    candidates.insert(candidates.end(), other.begin(), other.end());
    if (candidates.empty()) {
        out.failure = "level set of " + to_string(F) + " involves no jet coordinate";
        return out;
    }
    std::vector<std::string> reasons;
    for (const auto& w : candidates) {
        Solver solver{c, reserved_names, {}, {}};
        std::string why;
        auto value = solver.isolate(F, Expr(c), w, why);
        if (!value) {
            reasons.push_back(why);
            continue;
        }
        out.ok = true;
        out.coordinate = w;
        out.value = *value;
        out.derived = solver.derived;
        out.side_conditions = solver.side_conditions;
        for (const auto& s : candidates)
            if (s != w) out.alternatives.push_back(s);
        return out;
    }
    out.failure = "no isolatable coordinate in " + to_string(F) + " = " + c.display();
    for (const auto& r : reasons) out.failure += "; " + r;
    return out;
}

// ---------------------------------------------------------------------------
// Descent.

const char* chain_status_name(ChainStatus s) {
    switch (s) {
        case ChainStatus::Complete: return "complete";
        case ChainStatus::Failed: return "failed";
        case ChainStatus::Blocked: return "blocked";
    }
    return "?";
}

namespace {

// ι*Ω on the level set parametrized by `coords`, with the other chart coordinates
// given by `rules` (already expressed in `coords` and constants).
Form pull_back(const Form& full, const Substitution& rules, const std::vector<Symbol>& coords) {
    Form out(coords, 1);
    std::map<Symbol, Expr, SymbolLess> restricted;
    for (const auto& [w, phi] : rules) restricted[w] = substitute(full.coefficient(w), rules);
    for (const auto& xi : coords) {
        std::vector<Expr> terms{substitute(full.coefficient(xi), rules)};
        for (const auto& [w, phi] : rules) {
            const Expr d = diff(phi, xi);
            if (!d.is_zero()) terms.push_back(restricted[w] * d);
        }
        out.set(xi, simplify(make_add(std::move(terms))));
    }
    return out;
}

Expr restricted_derivative(const VectorField& D, const Substitution& rules, const std::vector<Symbol>& coords,
                           const Expr& F) {
    std::vector<Expr> terms;
    for (const auto& xi : coords) {
        const Expr comp = D.component(xi);
        if (comp.is_zero()) continue;
        terms.push_back(substitute(comp, rules) * diff(F, xi));
    }
    return make_add(std::move(terms));
}

void add_unique(std::vector<std::string>& list, const std::string& s) {
    if (std::find(list.begin(), list.end(), s) == list.end()) list.push_back(s);
}

std::set<std::string> names_in_use(const FrameForms& frame, const DescendOptions& options) {
    std::set<std::string> names = options.reserved_names;
    for (const auto& s : frame.volume().coords()) names.insert(s.name());
    for (const auto& s : free_symbols(frame.delta())) names.insert(s.name());
    return names;
}

}  // namespace

ReductionChain descend(const SolvableStructure& S, const RestrictedPair& pair, const VolumeForm& volume,
                       const DescendOptions& options) {
    ReductionChain chain;
    chain.volume = volume;
    const FrameForms frame(S, pair, volume);
    chain.delta = frame.delta();
    chain.integrating_factor = frame.integrating_factor();
    std::set<std::string> reserved = names_in_use(frame, options);

    std::vector<Symbol> coords = volume.coords();
    Substitution& rules = chain.rules;
    for (int i = frame.count(); i >= 1; --i) {
        ReductionStep step;
        step.index = i;
        std::string cname = "c" + std::to_string(i);
        while (reserved.count(cname) != 0) cname = "c" + cname;
        reserved.insert(cname);
        step.constant = Symbol::level_constant(cname);
        step.coords = coords;
        step.omega = pull_back(frame.omega(i), rules, coords);
        step.closed = closed_mod(step.omega, {});
        if (!step.closed.closed) {
            step.failure = "Omega_" + std::to_string(i) + " is not closed on the level set";
            chain.failure = step.failure;
            chain.status = ChainStatus::Failed;
            chain.steps.push_back(std::move(step));
            return chain;
        }
        step.potential = integrate_closed(step.omega);
        if (!step.potential.symbolic()) {
            step.failure = "no symbolic potential for Omega_" + std::to_string(i) + ": " + step.potential.failure;
            chain.failure = step.failure;
            chain.status = ChainStatus::Blocked;
            chain.steps.push_back(std::move(step));
            return chain;
        }
        const Expr& F = step.potential.F;
        step.dx_check = zero_test(restricted_derivative(pair.Dx, rules, coords, F));
        step.dt_check = zero_test(restricted_derivative(pair.Dt, rules, coords, F));
        if (!step.first_integral()) {
            step.failure = "F_" + std::to_string(i) + " is not a first integral";
            chain.failure = step.failure;
            chain.status = ChainStatus::Failed;
            chain.steps.push_back(std::move(step));
            return chain;
        }
        for (const auto& sc : step.potential.side_conditions) add_unique(chain.side_conditions, sc);
        chain.constants.push_back(step.constant);

        LevelSolution level = solve_level_set(F, step.constant, coords, reserved);
        step.level = level;
        if (!level.ok) {
            step.failure = level.failure;
            chain.failure = level.failure;
            chain.status = ChainStatus::Blocked;
            chain.steps.push_back(std::move(step));
            return chain;
        }
        for (const auto& d : level.derived) {
            reserved.insert(d.symbol.name());
            chain.derived.push_back(d);
            chain.constants.push_back(d.symbol);
            add_unique(chain.side_conditions,
                       d.symbol.display() + " = " + to_string(d.definition));
        }
        for (const auto& sc : level.side_conditions) add_unique(chain.side_conditions, sc);

        const Expr value = simplify(level.value);
        const Substitution one{{level.coordinate, value}};
        for (auto& [w, phi] : rules) phi = simplify(substitute(phi, one));
        rules[level.coordinate] = value;
        coords.erase(std::find(coords.begin(), coords.end(), level.coordinate));
        chain.steps.push_back(std::move(step));
    }

    for (const auto& s : volume.coords()) {
        if (!s.is_jet() || s.order() != 0) continue;
        auto it = rules.find(s);
        if (it == rules.end()) {
            chain.status = ChainStatus::Blocked;
            chain.failure = s.display() + " was not eliminated";
            return chain;
        }
        chain.solution[s.dependent()] = it->second;
    }
    chain.status = ChainStatus::Complete;
    return chain;
}

ShortcutResult abelian_shortcut(const SolvableStructure& S, const RestrictedPair& pair, const VolumeForm& volume,
                                const DescendOptions& options) {
    ShortcutResult out;
    const FrameForms frame(S, pair, volume);
    out.all_closed = true;
    for (int i = 1; i <= frame.count(); ++i) {
        ShortcutForm f;
        f.index = i;
        f.omega = frame.omega(i);
        f.potential = integrate_closed(f.omega);
        if (f.potential.kind == PotentialKind::NotClosed) out.all_closed = false;
        out.forms.push_back(std::move(f));
    }
    if (!out.all_closed) out.fallback = descend(S, pair, volume, options);
    return out;
}

}  // namespace jetsolve
