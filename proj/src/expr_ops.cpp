#include "jetsolve/expr.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

namespace jetsolve {

Expr diff(const Expr& e, const Symbol& s) {
    if (!depends_on(e, s)) return Expr(0);
    switch (e.kind()) {
        case ExprKind::Number: return Expr(0);
        case ExprKind::Symbol: return Expr(1);
        case ExprKind::Add: {
            std::vector<Expr> terms;
            for (const auto& t : e.operands()) terms.push_back(diff(t, s));
            return make_add(std::move(terms));
        }
        case ExprKind::Mul: {
            const auto& ops = e.operands();
            std::vector<Expr> terms;
            for (std::size_t i = 0; i < ops.size(); ++i) {
                if (!depends_on(ops[i], s)) continue;
                std::vector<Expr> factors;
                factors.reserve(ops.size());
                for (std::size_t j = 0; j < ops.size(); ++j)
                    factors.push_back(j == i ? diff(ops[j], s) : ops[j]);
                terms.push_back(make_mul(std::move(factors)));
            }
            return make_add(std::move(terms));
        }
        case ExprKind::Pow: {
            const Rational& q = e.exponent();
            return make_mul({Expr(q), make_pow(e.base(), q - 1), diff(e.base(), s)});
        }
        case ExprKind::Func: {
            const Expr& a = e.arg();
            const Expr da = diff(a, s);
            switch (e.func()) {
                case FuncKind::Exp: return make_mul({e, da});
                case FuncKind::Log: return make_mul({da, make_pow(a, Rational(-1))});
                case FuncKind::Sin: return make_mul({cos(a), da});
                case FuncKind::Cos: return make_mul({Expr(-1), sin(a), da});
            }
        }
    }
    return Expr(0);
}

Expr substitute_once(const Expr& e, const Substitution& rules) {
    if (rules.empty()) return e;
    bool touches = false;
    for (const auto& [s, _] : rules) {
        if (depends_on(e, s)) {
            touches = true;
            break;
        }
    }
    if (!touches) return e;
    switch (e.kind()) {
        case ExprKind::Number: return e;
        case ExprKind::Symbol: return rules.at(e.symbol());
        case ExprKind::Pow: return make_pow(substitute_once(e.base(), rules), e.exponent());
        case ExprKind::Func: return make_func(e.func(), substitute_once(e.arg(), rules));
        case ExprKind::Add:
        case ExprKind::Mul: {
            std::vector<Expr> ops;
            ops.reserve(e.operands().size());
            for (const auto& op : e.operands()) ops.push_back(substitute_once(op, rules));
            return e.is_add() ? make_add(std::move(ops)) : make_mul(std::move(ops));
        }
    }
    return e;
}

namespace {

void check_acyclic(const Substitution& rules) {
    // 0 = unvisited, 1 = on stack, 2 = done
    std::map<Symbol, int, SymbolLess> state;
    std::vector<Symbol> stack;
    std::function<void(const Symbol&)> dfs = [&](const Symbol& s) {
        state[s] = 1;
        stack.push_back(s);
        for (const auto& t : free_symbols(rules.at(s))) {
            if (rules.count(t) == 0) continue;
            const int st = state[t];
            if (st == 1) {
                std::string chain;
                bool on = false;
                for (const auto& x : stack) {
                    if (x == t) on = true;
                    if (on) chain += x.display() + " -> ";
                }
                chain += t.display();
                throw SubstitutionCycle("cyclic substitution rules: " + chain);
            }
            if (st == 0) dfs(t);
        }
        stack.pop_back();
        state[s] = 2;
    };
    for (const auto& [s, _] : rules)
        if (state[s] == 0) dfs(s);
}

}  // namespace

Expr substitute(const Expr& e, const Substitution& rules) {
    Substitution effective;
    for (const auto& [s, r] : rules)
        if (!(r.is_symbol() && r.symbol() == s)) effective.emplace(s, r);
    if (effective.empty()) return normalize(e);
    check_acyclic(effective);
    Expr current = e;
    for (std::size_t pass = 0; pass <= effective.size() + 1; ++pass) {
        Expr next = substitute_once(current, effective);
        if (next == current) return normalize(current);
        current = std::move(next);
    }
    return normalize(current);
}

namespace {

std::string brief(const Expr& e) {
    std::string s = to_string(e);
    if (s.size() > 80) s = s.substr(0, 77) + "...";
    return s;
}

double checked(double v, const Expr& e) {
    if (!std::isfinite(v)) throw EvalError("non-finite value in " + brief(e));
    return v;
}

}  // namespace

double eval(const Expr& e, const Point& point) {
    switch (e.kind()) {
        case ExprKind::Number: return e.number().get_d();
        case ExprKind::Symbol: {
            auto it = point.find(e.symbol());
            if (it == point.end()) throw EvalError("unbound symbol: " + e.symbol().display());
            return it->second;
        }
        case ExprKind::Add: {
            double s = 0;
            for (const auto& t : e.operands()) s += eval(t, point);
            return checked(s, e);
        }
        case ExprKind::Mul: {
            double p = 1;
            for (const auto& f : e.operands()) p *= eval(f, point);
            return checked(p, e);
        }
        case ExprKind::Pow: {
            const double b = eval(e.base(), point);
            const Rational& q = e.exponent();
            if (b == 0 && q < 0) throw EvalError("division by zero in " + brief(e));
            if (is_integer(q)) return checked(std::pow(b, q.get_d()), e);
            if (b < 0) {
                if (mpz_even_p(q.get_den_mpz_t()) != 0) throw EvalError("even root of a negative value in " + brief(e));
                const double mag = std::pow(-b, q.get_d());
                return checked(mpz_odd_p(q.get_num_mpz_t()) != 0 ? -mag : mag, e);
            }
            return checked(std::pow(b, q.get_d()), e);
        }
        case ExprKind::Func: {
            const double a = eval(e.arg(), point);
            switch (e.func()) {
                case FuncKind::Exp: return checked(std::exp(a), e);
                case FuncKind::Log:
                    if (a <= 0) throw EvalError("log of a non-positive value in " + brief(e));
                    return std::log(a);
                case FuncKind::Sin: return std::sin(a);
                case FuncKind::Cos: return std::cos(a);
            }
        }
    }
    return 0;
}

namespace {

enum Prec { PrecAdd = 1, PrecMul = 2, PrecPow = 4, PrecAtom = 5 };

std::string print(const Expr& e, int parent);

std::string print_rational_exponent(const Rational& q) {
    if (is_integer(q) && q > 0) return q.get_str();
    return "(" + q.get_str() + ")";
}

// Product printer: coefficient, numerator factors, denominator factors.
std::string print_product(const Rational& coef, const std::vector<Expr>& factors, int parent) {
    std::vector<std::string> num;
    std::vector<std::string> den;
    for (const auto& f : factors) {
        if (f.is_pow() && f.exponent() < 0) {
            den.push_back(print(make_pow(f.base(), -f.exponent()), PrecMul + 1));
        } else {
            num.push_back(print(f, PrecMul));
        }
    }
    std::string out;
    const bool negative = coef < 0;
    const Rational mag = abs(coef);
    if (negative) out += "-";
    std::string body;
    if (mag != 1) {
        body = is_integer(mag) ? mag.get_str() : "(" + mag.get_str() + ")";
    }
    for (const auto& s : num) {
        if (!body.empty()) body += "*";
        body += s;
    }
    if (body.empty()) body = "1";
    if (!den.empty()) {
        body += "/";
        if (den.size() == 1) {
            body += den.front();
        } else {
            body += "(";
            for (std::size_t i = 0; i < den.size(); ++i) {
                if (i) body += "*";
                body += den[i];
            }
            body += ")";
        }
    }
    out += body;
    if (negative && parent > PrecAdd) return "(" + out + ")";
    return out;
}

std::string print(const Expr& e, int parent) {
    switch (e.kind()) {
        case ExprKind::Number: {
            const Rational& v = e.number();
            std::string s = v.get_str();
            if ((v < 0 && parent > PrecAdd) || (!is_integer(v) && parent > PrecAdd)) return "(" + s + ")";
            return s;
        }
        case ExprKind::Symbol: return e.symbol().display();
        case ExprKind::Func: return std::string(func_name(e.func())) + "(" + print(e.arg(), 0) + ")";
        case ExprKind::Pow: {
            if (e.exponent() < 0) return print_product(Rational(1), {e}, parent);
            std::string s = print(e.base(), PrecPow + 1) + "^" + print_rational_exponent(e.exponent());
            if (parent > PrecPow) return "(" + s + ")";
            return s;
        }
        case ExprKind::Mul: {
            auto [c, rest] = split_coefficient(e);
            std::vector<Expr> factors;
            if (rest.is_mul()) {
                factors = rest.operands();
            } else {
                factors.push_back(rest);
            }
            std::string s = print_product(c, factors, parent);
            if (parent > PrecMul && s.front() != '(') return "(" + s + ")";
            return s;
        }
        case ExprKind::Add: {
            std::vector<Expr> terms;
            Expr constant(0);
            for (const auto& t : e.operands()) {
                if (t.is_number()) {
                    constant = t;
                } else {
                    terms.push_back(t);
                }
            }
            if (!constant.is_zero()) terms.push_back(constant);
            std::string s;
            for (std::size_t i = 0; i < terms.size(); ++i) {
                auto [c, rest] = split_coefficient(terms[i]);
                if (i == 0) {
                    s += print(terms[i], PrecAdd);
                } else if (c < 0) {
                    s += " - " + print(make_mul({Expr(Rational(-c)), rest}), PrecAdd);
                } else {
                    s += " + " + print(terms[i], PrecAdd);
                }
            }
            if (parent > PrecAdd) return "(" + s + ")";
            return s;
        }
    }
    return "?";
}

}  // namespace

std::string to_string(const Expr& e) { return print(e, 0); }

std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << to_string(e); }

}  // namespace jetsolve
