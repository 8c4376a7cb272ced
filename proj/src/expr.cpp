#include "jetsolve/expr.hpp"

#include <algorithm>
#include <stdexcept>

namespace jetsolve {

struct Expr::Node {
    ExprKind kind = ExprKind::Number;
    Rational value;  // Number value, or Pow exponent
    Symbol sym;
    FuncKind func = FuncKind::Exp;
    std::vector<Expr> ops;  // Pow: {base}; Func: {arg}; Add/Mul: operands
    std::vector<Symbol> free;  // sorted, unique
    std::size_t hash = 0;
};

namespace {

std::size_t mix(std::size_t h, std::size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }

std::size_t hash_rational(const Rational& r) {
    std::size_t h = mpz_get_ui(r.get_num_mpz_t());
    h = mix(h, static_cast<std::size_t>(mpz_sgn(r.get_num_mpz_t()) + 1));
    h = mix(h, mpz_get_ui(r.get_den_mpz_t()));
    h = mix(h, mpz_size(r.get_num_mpz_t()));
    return h;
}

std::size_t hash_symbol(const Symbol& s) {
    std::size_t h = static_cast<std::size_t>(s.role()) * 1315423911ULL;
    if (s.is_jet()) return mix(mix(h, static_cast<std::size_t>(s.dependent())), static_cast<std::size_t>(s.order()));
    return mix(h, std::hash<std::string>{}(s.name()));
}

std::vector<Symbol> merge_free(const std::vector<Expr>& ops);

}  // namespace

struct ExprFactory {
    static Expr number(const Rational& v) {
        auto n = std::make_shared<Expr::Node>();
        n->kind = ExprKind::Number;
        n->value = v;
        n->hash = mix(1, hash_rational(v));
        return Expr(std::move(n));
    }
    static Expr symbol(const Symbol& s) {
        auto n = std::make_shared<Expr::Node>();
        n->kind = ExprKind::Symbol;
        n->sym = s;
        n->free = {s};
        n->hash = mix(2, hash_symbol(s));
        return Expr(std::move(n));
    }
    static Expr pow(const Expr& base, const Rational& e) {
        auto n = std::make_shared<Expr::Node>();
        n->kind = ExprKind::Pow;
        n->value = e;
        n->ops = {base};
        n->free = base.node_->free;
        n->hash = mix(mix(3, base.hash()), hash_rational(e));
        return Expr(std::move(n));
    }
    static Expr nary(ExprKind kind, std::vector<Expr> ops) {
        auto n = std::make_shared<Expr::Node>();
        n->kind = kind;
        std::size_t h = static_cast<std::size_t>(kind) + 11;
        for (const auto& op : ops) h = mix(h, op.hash());
        n->hash = h;
        n->free = merge_free(ops);
        n->ops = std::move(ops);
        return Expr(std::move(n));
    }
    static Expr func(FuncKind f, const Expr& arg) {
        auto n = std::make_shared<Expr::Node>();
        n->kind = ExprKind::Func;
        n->func = f;
        n->ops = {arg};
        n->free = arg.node_->free;
        n->hash = mix(mix(6, static_cast<std::size_t>(f)), arg.hash());
        return Expr(std::move(n));
    }
    static const std::vector<Symbol>& free(const Expr& e) { return e.node_->free; }
};

namespace {

std::vector<Symbol> merge_free(const std::vector<Expr>& ops) {
    std::vector<Symbol> out;
    for (const auto& op : ops) {
        const auto& f = ExprFactory::free(op);
        if (f.empty()) continue;
        std::vector<Symbol> merged;
        merged.reserve(out.size() + f.size());
        std::set_union(out.begin(), out.end(), f.begin(), f.end(), std::back_inserter(merged), SymbolLess{});
        out = std::move(merged);
    }
    return out;
}

const Expr& zero_expr() {
    static const Expr z = ExprFactory::number(Rational(0));
    return z;
}

const Expr& one_expr() {
    static const Expr o = ExprFactory::number(Rational(1));
    return o;
}

}  // namespace

const char* func_name(FuncKind f) {
    switch (f) {
        case FuncKind::Exp: return "exp";
        case FuncKind::Log: return "log";
        case FuncKind::Sin: return "sin";
        case FuncKind::Cos: return "cos";
    }
    return "?";
}

Expr::Expr() : Expr(zero_expr()) {}
Expr::Expr(int value) : Expr(value == 0 ? zero_expr() : value == 1 ? one_expr() : ExprFactory::number(Rational(value))) {}
Expr::Expr(long value) : Expr(value == 0 ? zero_expr() : value == 1 ? one_expr() : ExprFactory::number(Rational(value))) {}
Expr::Expr(const Rational& value) : Expr(ExprFactory::number(value)) {}
Expr::Expr(const Symbol& symbol) : Expr(ExprFactory::symbol(symbol)) {}

ExprKind Expr::kind() const { return node_->kind; }
bool Expr::is_func(FuncKind f) const { return node_->kind == ExprKind::Func && node_->func == f; }
bool Expr::is_zero() const { return node_->kind == ExprKind::Number && node_->value == 0; }
bool Expr::is_one() const { return node_->kind == ExprKind::Number && node_->value == 1; }

const Rational& Expr::number() const {
    if (node_->kind != ExprKind::Number) throw std::logic_error("not a number");
    return node_->value;
}
const Symbol& Expr::symbol() const {
    if (node_->kind != ExprKind::Symbol) throw std::logic_error("not a symbol");
    return node_->sym;
}
const Expr& Expr::base() const {
    if (node_->kind != ExprKind::Pow) throw std::logic_error("not a power");
    return node_->ops[0];
}
const Rational& Expr::exponent() const {
    if (node_->kind != ExprKind::Pow) throw std::logic_error("not a power");
    return node_->value;
}
const std::vector<Expr>& Expr::operands() const { return node_->ops; }
FuncKind Expr::func() const {
    if (node_->kind != ExprKind::Func) throw std::logic_error("not a function");
    return node_->func;
}
const Expr& Expr::arg() const {
    if (node_->kind != ExprKind::Func) throw std::logic_error("not a function");
    return node_->ops[0];
}
std::size_t Expr::hash() const { return node_->hash; }

int compare(const Expr& a, const Expr& b) {
    if (a.identity() == b.identity()) return 0;
    if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
    switch (a.kind()) {
        case ExprKind::Number: {
            const int c = cmp(a.number(), b.number());
            return c < 0 ? -1 : (c > 0 ? 1 : 0);
        }
        case ExprKind::Symbol: return compare(a.symbol(), b.symbol());
        case ExprKind::Pow: {
            if (int c = compare(a.base(), b.base()); c != 0) return c;
            const int c = cmp(a.exponent(), b.exponent());
            return c < 0 ? -1 : (c > 0 ? 1 : 0);
        }
        case ExprKind::Mul:
        case ExprKind::Add: {
            const auto& x = a.operands();
            const auto& y = b.operands();
            const std::size_t n = std::min(x.size(), y.size());
            for (std::size_t i = 0; i < n; ++i)
                if (int c = compare(x[i], y[i]); c != 0) return c;
            if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
            return 0;
        }
        case ExprKind::Func:
            if (a.func() != b.func()) return a.func() < b.func() ? -1 : 1;
            return compare(a.arg(), b.arg());
    }
    return 0;
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.identity() == b.identity()) return true;
    if (a.hash() != b.hash()) return false;
    return compare(a, b) == 0;
}

std::pair<Rational, Expr> split_coefficient(const Expr& e) {
    if (e.is_number()) return {e.number(), one_expr()};
    if (e.is_mul() && e.operands().front().is_number()) {
        const auto& ops = e.operands();
        if (ops.size() == 2) return {ops[0].number(), ops[1]};
        return {ops[0].number(), ExprFactory::nary(ExprKind::Mul, std::vector<Expr>(ops.begin() + 1, ops.end()))};
    }
    return {Rational(1), e};
}

namespace {

// Order of terms inside a sum: by the non-numeric part, then by coefficient.
bool term_less(const Expr& a, const Expr& b) {
    auto [ca, ra] = split_coefficient(a);
    auto [cb, rb] = split_coefficient(b);
    if (int c = compare(ra, rb); c != 0) return c < 0;
    return ca < cb;
}

Expr with_coefficient(const Rational& c, const Expr& rest) {
    if (c == 1) return rest;
    if (rest.is_number()) return Expr(c * rest.number());
    if (rest.is_mul()) {
        std::vector<Expr> ops;
        ops.reserve(rest.operands().size() + 1);
        ops.emplace_back(c);
        ops.insert(ops.end(), rest.operands().begin(), rest.operands().end());
        return ExprFactory::nary(ExprKind::Mul, std::move(ops));
    }
    return ExprFactory::nary(ExprKind::Mul, {Expr(c), rest});
}

bool odd_numerator(const Rational& q) { return mpz_odd_p(q.get_num_mpz_t()) != 0; }

// Rational content of a sum, signed so that the primitive part's first term is positive.
Rational add_content(const Expr& sum) {
    Integer g = 0;
    Integer l = 1;
    for (const auto& t : sum.operands()) {
        const Rational c = split_coefficient(t).first;
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num_mpz_t());
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
    }
    Rational content(g, l);
    content.canonicalize();
    if (split_coefficient(sum.operands().front()).first < 0) content = -content;
    return content;
}

Expr scale_add(const Expr& sum, const Rational& factor) {
    std::vector<Expr> terms;
    terms.reserve(sum.operands().size());
    for (const auto& t : sum.operands()) {
        auto [c, rest] = split_coefficient(t);
        terms.push_back(with_coefficient(c * factor, rest));
    }
    return ExprFactory::nary(ExprKind::Add, std::move(terms));
}

}  // namespace

Expr make_add(std::vector<Expr> terms) {
    Rational constant = 0;
    std::map<Expr, Rational, ExprLess> collected;
    auto absorb = [&](const Expr& t) {
        if (t.is_number()) {
            constant += t.number();
            return;
        }
        auto [c, rest] = split_coefficient(t);
        collected[rest] += c;
    };
    for (const auto& t : terms) {
        if (t.is_add()) {
            for (const auto& s : t.operands()) absorb(s);
        } else {
            absorb(t);
        }
    }
    std::vector<Expr> out;
    out.reserve(collected.size() + 1);
    for (const auto& [rest, c] : collected)
        if (c != 0) out.push_back(with_coefficient(c, rest));
    if (out.empty()) return Expr(constant);
    std::sort(out.begin(), out.end(), term_less);
    if (constant != 0) out.insert(out.begin(), Expr(constant));
    if (out.size() == 1) return out.front();
    return ExprFactory::nary(ExprKind::Add, std::move(out));
}

Expr make_mul(std::vector<Expr> factors) {
    for (;;) {
        Rational coef = 1;
        std::map<Expr, Rational, ExprLess> powers;
        std::vector<Expr> exp_args;
        bool zero = false;
        auto absorb = [&](const Expr& f) {
            switch (f.kind()) {
                case ExprKind::Number:
                    coef *= f.number();
                    if (coef == 0) zero = true;
                    break;
                case ExprKind::Pow:
                    if (f.base().is_add() && is_integer(f.exponent())) {
                        const Rational c = add_content(f.base());
                        if (c != 1) {
                            if (!f.exponent().get_num().fits_slong_p()) throw std::overflow_error("exponent too large");
                            coef *= rational_pow(c, f.exponent().get_num().get_si());
                            powers[scale_add(f.base(), 1 / c)] += f.exponent();
                            break;
                        }
                    }
                    powers[f.base()] += f.exponent();
                    break;
                case ExprKind::Add: {
                    const Rational c = add_content(f);
                    if (c != 1) {
                        coef *= c;
                        powers[scale_add(f, 1 / c)] += 1;
                    } else {
                        powers[f] += 1;
                    }
                    break;
                }
                case ExprKind::Func:
                    if (f.func() == FuncKind::Exp) {
                        exp_args.push_back(f.arg());
                        break;
                    }
                    powers[f] += 1;
                    break;
                default: powers[f] += 1; break;
            }
        };
        for (const auto& f : factors) {
            if (f.is_mul()) {
                for (const auto& g : f.operands()) absorb(g);
            } else {
                absorb(f);
            }
            if (zero) return Expr(0);
        }

        std::vector<Expr> out;
        std::vector<Expr> again;
        for (const auto& [b, e] : powers) {
            if (e == 0) continue;
            Expr p = make_pow(b, e);
            if (p.is_number() || p.is_mul() || p.is_func(FuncKind::Exp)) {
                again.push_back(p);
            } else {
                out.push_back(p);
            }
        }
        if (!exp_args.empty()) {
            Expr ex = make_func(FuncKind::Exp, make_add(exp_args));
            if (ex.is_func(FuncKind::Exp)) {
                out.push_back(ex);
            } else {
                again.push_back(ex);
            }
        }
        if (!again.empty()) {
            factors = std::move(out);
            factors.insert(factors.end(), again.begin(), again.end());
            factors.emplace_back(coef);
            continue;
        }
        if (out.empty()) return Expr(coef);
        if (out.size() == 1 && out.front().is_add()) return scale_add(out.front(), coef);
        std::sort(out.begin(), out.end(), ExprLess{});
        if (coef == 1 && out.size() == 1) return out.front();
        if (coef != 1) out.insert(out.begin(), Expr(coef));
        return ExprFactory::nary(ExprKind::Mul, std::move(out));
    }
}

Expr make_pow(const Expr& base, const Rational& exponent) {
    if (exponent == 0) return Expr(1);
    if (exponent == 1) return base;
    switch (base.kind()) {
        case ExprKind::Number: {
            const Rational& v = base.number();
            if (v == 0) {
                if (exponent > 0) return Expr(0);
                throw std::domain_error("division by zero");
            }
            if (v == 1) return Expr(1);
            if (is_integer(exponent)) {
                if (!exponent.get_num().fits_slong_p()) throw std::overflow_error("exponent too large");
                return Expr(rational_pow(v, exponent.get_num().get_si()));
            }
            if (!exponent.get_num().fits_slong_p() || !exponent.get_den().fits_ulong_p())
                throw std::overflow_error("exponent too large");
            if (auto root = exact_root(v, exponent.get_den().get_ui()))
                return Expr(rational_pow(*root, exponent.get_num().get_si()));
            Integer fl;
            mpz_fdiv_q(fl.get_mpz_t(), exponent.get_num_mpz_t(), exponent.get_den_mpz_t());
            const Rational frac = exponent - Rational(fl);
            if (fl == 0) return ExprFactory::pow(base, exponent);
            return make_mul({Expr(rational_pow(v, fl.get_si())), ExprFactory::pow(base, frac)});
        }
        case ExprKind::Pow:
            if (is_integer(exponent) || odd_numerator(base.exponent()))
                return make_pow(base.base(), base.exponent() * exponent);
            return ExprFactory::pow(base, exponent);
        case ExprKind::Mul: {
            if (is_integer(exponent)) {
                std::vector<Expr> fs;
                for (const auto& f : base.operands()) fs.push_back(make_pow(f, exponent));
                return make_mul(std::move(fs));
            }
            std::vector<Expr> pulled;
            std::vector<Expr> rest;
            for (const auto& f : base.operands()) {
                if ((f.is_number() && f.number() > 0) || f.is_func(FuncKind::Exp)) {
                    pulled.push_back(make_pow(f, exponent));
                } else {
                    rest.push_back(f);
                }
            }
            if (pulled.empty()) return ExprFactory::pow(base, exponent);
            if (!rest.empty()) pulled.push_back(make_pow(make_mul(rest), exponent));
            return make_mul(std::move(pulled));
        }
        case ExprKind::Func:
            if (base.func() == FuncKind::Exp) return make_func(FuncKind::Exp, make_mul({Expr(exponent), base.arg()}));
            return ExprFactory::pow(base, exponent);
        default: return ExprFactory::pow(base, exponent);
    }
}

Expr make_func(FuncKind f, const Expr& arg) {
    switch (f) {
        case FuncKind::Exp: {
            if (arg.is_zero()) return Expr(1);
            if (arg.is_func(FuncKind::Log)) return arg.arg();
            if (arg.is_mul()) {
                auto [c, rest] = split_coefficient(arg);
                if (rest.is_func(FuncKind::Log)) return make_pow(rest.arg(), c);
            }
            if (arg.is_add()) {
                std::vector<Expr> pulled;
                std::vector<Expr> keep;
                for (const auto& t : arg.operands()) {
                    auto [c, rest] = split_coefficient(t);
                    if (rest.is_func(FuncKind::Log)) {
                        pulled.push_back(make_pow(rest.arg(), c));
                    } else {
                        keep.push_back(t);
                    }
                }
                if (!pulled.empty()) {
                    pulled.push_back(make_func(FuncKind::Exp, make_add(std::move(keep))));
                    return make_mul(std::move(pulled));
                }
            }
            return ExprFactory::func(f, arg);
        }
        case FuncKind::Log:
            if (arg.is_one()) return Expr(0);
            if (arg.is_func(FuncKind::Exp)) return arg.arg();
            return ExprFactory::func(f, arg);
        case FuncKind::Sin:
            if (arg.is_zero()) return Expr(0);
            return ExprFactory::func(f, arg);
        case FuncKind::Cos:
            if (arg.is_zero()) return Expr(1);
            return ExprFactory::func(f, arg);
    }
    return ExprFactory::func(f, arg);
}

Expr exp(const Expr& a) { return make_func(FuncKind::Exp, a); }
Expr log(const Expr& a) { return make_func(FuncKind::Log, a); }
Expr sin(const Expr& a) { return make_func(FuncKind::Sin, a); }
Expr cos(const Expr& a) { return make_func(FuncKind::Cos, a); }
Expr sqrt(const Expr& a) { return make_pow(a, Rational(1, 2)); }
Expr pow(const Expr& a, const Rational& q) { return make_pow(a, q); }
Expr pow(const Expr& a, long q) { return make_pow(a, Rational(q)); }
Expr pow(const Expr& a, const Expr& b) {
    if (b.is_number()) return make_pow(a, b.number());
    return exp(b * log(a));
}

Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    return make_add({a, b});
}
Expr operator-(const Expr& a, const Expr& b) {
    if (b.is_zero()) return a;
    return make_add({a, make_mul({Expr(-1), b})});
}
Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_one()) return b;
    if (b.is_one()) return a;
    return make_mul({a, b});
}
Expr operator/(const Expr& a, const Expr& b) {
    if (b.is_zero()) throw std::domain_error("division by zero");
    return make_mul({a, make_pow(b, Rational(-1))});
}
Expr operator-(const Expr& a) { return make_mul({Expr(-1), a}); }
Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }

Expr normalize(const Expr& e) {
    switch (e.kind()) {
        case ExprKind::Number:
        case ExprKind::Symbol: return e;
        case ExprKind::Pow: return make_pow(normalize(e.base()), e.exponent());
        case ExprKind::Func: return make_func(e.func(), normalize(e.arg()));
        case ExprKind::Add:
        case ExprKind::Mul: {
            std::vector<Expr> ops;
            ops.reserve(e.operands().size());
            for (const auto& op : e.operands()) ops.push_back(normalize(op));
            return e.is_add() ? make_add(std::move(ops)) : make_mul(std::move(ops));
        }
    }
    return e;
}

SymbolSet free_symbols(const Expr& e) {
    const auto& f = ExprFactory::free(e);
    return SymbolSet(f.begin(), f.end());
}

bool depends_on(const Expr& e, const Symbol& s) {
    const auto& f = ExprFactory::free(e);
    return std::binary_search(f.begin(), f.end(), s, SymbolLess{});
}

void visit(const Expr& e, const std::function<void(const Expr&)>& fn) {
    fn(e);
    for (const auto& op : e.operands()) visit(op, fn);
}

std::size_t tree_size(const Expr& e) {
    std::size_t n = 1;
    for (const auto& op : e.operands()) n += tree_size(op);
    return n;
}

}  // namespace jetsolve
