#include <cstdint>
#include "jetsolve/poly.hpp"

#include <algorithm>
#include <climits>
#include <stdexcept>

namespace jetsolve {

int compare_monomials(const Monomial& a, const Monomial& b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        const int ia = i < a.size() ? a[i].first : INT_MAX;
        const int ib = j < b.size() ? b[j].first : INT_MAX;
        if (ia == ib) {
            if (a[i].second != b[j].second) return a[i].second < b[j].second ? -1 : 1;
            ++i;
            ++j;
        } else if (ia < ib) {
            return 1;
        } else {
            return -1;
        }
    }
    return 0;
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
    Monomial out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j >= b.size() || (i < a.size() && a[i].first < b[j].first)) {
            out.push_back(a[i++]);
        } else if (i >= a.size() || b[j].first < a[i].first) {
            out.push_back(b[j++]);
        } else {
            const Frac e = a[i].second + b[j].second;
            if (!e.is_zero()) out.emplace_back(a[i].first, e);
            ++i;
            ++j;
        }
    }
    return out;
}

std::optional<Monomial> mono_div(const Monomial& a, const Monomial& b) {
    Monomial out;
    std::size_t i = 0;
    for (const auto& [id, e] : b) {
        while (i < a.size() && a[i].first < id) out.push_back(a[i++]);
        if (i >= a.size() || a[i].first != id) return std::nullopt;
        if (a[i].second < e) return std::nullopt;
        const Frac d = a[i].second - e;
        if (!d.is_zero()) out.emplace_back(id, d);
        ++i;
    }
    while (i < a.size()) out.push_back(a[i++]);
    return out;
}

Monomial mono_gcd(const Monomial& a, const Monomial& b) {
    Monomial out;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first < b[j].first) {
            ++i;
        } else if (b[j].first < a[i].first) {
            ++j;
        } else {
            out.emplace_back(a[i].first, a[i].second < b[j].second ? a[i].second : b[j].second);
            ++i;
            ++j;
        }
    }
    return out;
}

Frac mono_exponent(const Monomial& m, int id) {
    for (const auto& [g, e] : m)
        if (g == id) return e;
    return Frac(0);
}

Poly::Poly(const Rational& c) {
    if (c != 0) terms_.emplace(Monomial{}, c);
}

Poly Poly::generator(int id, Frac exponent) {
    Poly p;
    if (exponent.is_zero()) {
        p.terms_.emplace(Monomial{}, Rational(1));
    } else {
        p.terms_.emplace(Monomial{{id, exponent}}, Rational(1));
    }
    return p;
}

Poly Poly::monomial(const Monomial& m, const Rational& c) {
    Poly p;
    if (c != 0) p.terms_.emplace(m, c);
    return p;
}

bool Poly::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty()); }

Rational Poly::constant_value() const {
    if (terms_.empty()) return Rational(0);
    if (!is_constant()) throw std::logic_error("polynomial is not constant");
    return terms_.begin()->second;
}

const Monomial& Poly::leading_monomial() const {
    if (terms_.empty()) throw std::logic_error("zero polynomial has no leading term");
    return terms_.rbegin()->first;
}

const Rational& Poly::leading_coefficient() const {
    if (terms_.empty()) throw std::logic_error("zero polynomial has no leading term");
    return terms_.rbegin()->second;
}

std::set<int> Poly::generators() const {
    std::set<int> out;
    for (const auto& [m, _] : terms_)
        for (const auto& [id, e] : m) out.insert(id);
    return out;
}

bool Poly::contains(int id) const {
    for (const auto& [m, _] : terms_)
        for (const auto& [g, e] : m)
            if (g == id) return true;
    return false;
}

void Poly::add_term(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Poly& Poly::operator+=(const Poly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

Poly Poly::scaled(const Rational& c) const {
    Poly out;
    if (c == 0) return out;
    for (const auto& [m, k] : terms_) out.terms_.emplace_hint(out.terms_.end(), m, k * c);
    return out;
}

Poly Poly::times_monomial(const Monomial& m, const Rational& c) const {
    Poly out;
    if (c == 0) return out;
    for (const auto& [mm, k] : terms_) out.terms_.emplace(mono_mul(mm, m), k * c);
    return out;
}

Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    if (a.is_constant()) return b.scaled(a.constant_value());
    if (b.is_constant()) return a.scaled(b.constant_value());
    Poly out;
    for (const auto& [ma, ca] : a.terms_)
        for (const auto& [mb, cb] : b.terms_) out.add_term(mono_mul(ma, mb), ca * cb);
    return out;
}

Poly pow(const Poly& p, unsigned long n) {
    Poly result(Rational(1));
    Poly base = p;
    while (n > 0) {
        if (n & 1UL) result = result * base;
        n >>= 1UL;
        if (n > 0) base = base * base;
    }
    return result;
}

std::optional<Poly> divide_exact(const Poly& a, const Poly& b) {
    if (b.is_zero()) throw std::domain_error("polynomial division by zero");
    if (b.is_constant()) return a.scaled(1 / b.constant_value());
    Poly q;
    Poly r = a;
    const Monomial& lb = b.leading_monomial();
    const Rational lcb = b.leading_coefficient();
    std::size_t steps = 0;
    while (!r.is_zero()) {
        if (++steps > 200000) return std::nullopt;
        auto t = mono_div(r.leading_monomial(), lb);
        if (!t) return std::nullopt;
        const Rational c = r.leading_coefficient() / lcb;
        q.add_term(*t, c);
        r -= b.times_monomial(*t, c);
    }
    return q;
}

Rational rational_content(const Poly& p) {
    if (p.is_zero()) return Rational(1);
    Integer g = 0;
    Integer l = 1;
    for (const auto& [m, c] : p.terms()) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num_mpz_t());
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
    }
    Rational r(g, l);
    r.canonicalize();
    return r;
}

Monomial monomial_content(const Poly& p) {
    if (p.is_zero()) return {};
    auto it = p.terms().begin();
    Monomial m = it->first;
    for (++it; it != p.terms().end() && !m.empty(); ++it) m = mono_gcd(m, it->first);
    return m;
}

Poly primitive_normalized(const Poly& p) {
    if (p.is_zero()) return p;
    Rational c = rational_content(p);
    if (p.leading_coefficient() < 0) c = -c;
    return p.scaled(1 / c);
}

std::int64_t exponent_denominator(const Poly& p, int id) {
    std::int64_t l = 1;
    for (const auto& [m, _] : p.terms())
        for (const auto& [g, e] : m)
            if (g == id) l = lcm64(l, e.den);
    return l;
}

std::vector<Poly> coefficients_in(const Poly& p, int id, std::int64_t scale) {
    std::vector<Poly> out;
    for (const auto& [m, c] : p.terms()) {
        Monomial rest;
        std::int64_t k = 0;
        for (const auto& [g, e] : m) {
            if (g == id) {
                const Frac s = e * Frac(scale);
                if (!s.is_integer()) throw std::logic_error("exponent scale does not clear denominators");
                k = s.num;
            } else {
                rest.emplace_back(g, e);
            }
        }
        if (static_cast<std::size_t>(k) >= out.size()) out.resize(static_cast<std::size_t>(k) + 1);
        out[static_cast<std::size_t>(k)].add_term(rest, c);
    }
    return out;
}

Poly from_coefficients(const std::vector<Poly>& coeffs, int id, std::int64_t scale) {
    Poly out;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        if (coeffs[k].is_zero()) continue;
        if (k == 0) {
            out += coeffs[k];
        } else {
            out += coeffs[k].times_monomial(Monomial{{id, Frac(static_cast<std::int64_t>(k), scale)}});
        }
    }
    return out;
}

namespace {

using Uni = std::vector<Poly>;

void trim(Uni& u) {
    while (!u.empty() && u.back().is_zero()) u.pop_back();
}

int degree(const Uni& u) { return static_cast<int>(u.size()) - 1; }

Poly gcd_rec(const Poly& a, const Poly& b);

Poly uni_content(const Uni& u) {
    Poly g;
    for (const auto& c : u) {
        if (c.is_zero()) continue;
        g = g.is_zero() ? primitive_normalized(c) : gcd_rec(g, c);
        if (g.is_constant()) return Poly(Rational(1));
    }
    return g.is_zero() ? Poly(Rational(1)) : g;
}

Uni uni_divide(const Uni& u, const Poly& c) {
    Uni out;
    out.reserve(u.size());
    for (const auto& k : u) {
        auto q = divide_exact(k, c);
        if (!q) throw std::logic_error("content does not divide coefficient");
        out.push_back(std::move(*q));
    }
    return out;
}

// Divides out the polynomial content and the rational content of all coefficients.
Uni uni_primitive(const Uni& u) {
    Uni out = uni_divide(u, uni_content(u));
    Rational c(0);
    for (const auto& k : out) {
        if (k.is_zero()) continue;
        const Rational kc = rational_content(k);
        c = c == 0 ? kc : Rational(gcd(c.get_num() * kc.get_den(), kc.get_num() * c.get_den()), c.get_den() * kc.get_den());
    }
    if (c != 0 && c != 1) {
        c.canonicalize();
        for (auto& k : out) k = k.scaled(Rational(1) / c);
    }
    return out;
}

Uni pseudo_remainder(Uni r, const Uni& b) {
    const int db = degree(b);
    const Poly& lcb = b.back();
    while (degree(r) >= db && !r.empty()) {
        const Poly lcr = r.back();
        const int shift = degree(r) - db;
        for (auto& k : r) k = k * lcb;
        for (int i = 0; i <= db; ++i) r[static_cast<std::size_t>(i + shift)] -= lcr * b[static_cast<std::size_t>(i)];
        r.pop_back();
        trim(r);
    }
    return r;
}

Poly gcd_rec(const Poly& a, const Poly& b) {
    if (a.is_zero()) return primitive_normalized(b);
    if (b.is_zero()) return primitive_normalized(a);
    if (a.is_constant() || b.is_constant()) return Poly(Rational(1));

    const std::set<int> va = a.generators();
    const std::set<int> vb = b.generators();
    // A generator present in only one operand: the gcd divides each of its coefficients.
    for (int pass = 0; pass < 2; ++pass) {
        const Poly& p = pass == 0 ? a : b;
        const Poly& q = pass == 0 ? b : a;
        const std::set<int>& vp = pass == 0 ? va : vb;
        const std::set<int>& vq = pass == 0 ? vb : va;
        for (int w : vp) {
            if (vq.count(w)) continue;
            Poly g = primitive_normalized(q);
            for (const auto& c : coefficients_in(p, w, exponent_denominator(p, w))) {
                if (c.is_zero()) continue;
                g = gcd_rec(g, c);
                if (g.is_constant()) return Poly(Rational(1));
            }
            return g;
        }
    }

    // Shared generators only; recurse on the one of smallest degree.
    int v = *va.begin();
    std::size_t best = SIZE_MAX;
    for (int w : va) {
        const std::int64_t sw = lcm64(exponent_denominator(a, w), exponent_denominator(b, w));
        const std::size_t d = std::max(coefficients_in(a, w, sw).size(), coefficients_in(b, w, sw).size());
        if (d < best) {
            best = d;
            v = w;
        }
    }
    const std::int64_t scale = lcm64(exponent_denominator(a, v), exponent_denominator(b, v));

    Uni ua = coefficients_in(a, v, scale);
    Uni ub = coefficients_in(b, v, scale);
    trim(ua);
    trim(ub);
    if (ua.size() == 1) return gcd_rec(a, uni_content(ub));
    if (ub.size() == 1) return gcd_rec(uni_content(ua), b);

    const Poly ca = uni_content(ua);
    const Poly cb = uni_content(ub);
    const Poly c = gcd_rec(ca, cb);
    Uni pa = uni_primitive(uni_divide(ua, ca));
    Uni pb = uni_primitive(uni_divide(ub, cb));
    if (degree(pa) < degree(pb)) std::swap(pa, pb);

    Uni g;
    for (;;) {
        Uni r = pseudo_remainder(pa, pb);
        if (r.empty()) {
            g = pb;
            break;
        }
        if (degree(r) == 0) {
            g = Uni{Poly(Rational(1))};
            break;
        }
        pa = std::move(pb);
        pb = uni_primitive(r);
    }
    g = uni_divide(g, uni_content(g));
    return primitive_normalized(from_coefficients(g, v, scale) * c);
}

}  // namespace

Poly gcd(const Poly& a, const Poly& b) {
    if (a.is_zero() && b.is_zero()) return Poly();
    if (a.is_zero()) return primitive_normalized(b);
    if (b.is_zero()) return primitive_normalized(a);
    const Monomial ma = monomial_content(a);
    const Monomial mb = monomial_content(b);
    const Monomial mg = mono_gcd(ma, mb);
    Poly a1 = a;
    Poly b1 = b;
    if (!ma.empty()) a1 = *divide_exact(a, Poly::monomial(ma));
    if (!mb.empty()) b1 = *divide_exact(b, Poly::monomial(mb));
    Poly g = gcd_rec(a1, b1);
    if (!mg.empty()) g = g.times_monomial(mg);
    return primitive_normalized(g);
}

}  // namespace jetsolve
