#pragma once

#include "jetsolve/constraint.hpp"

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace support {

using namespace jetsolve;

/// Evolution system plus constraints assembled from strings.
struct Setup {
    SymbolTable table;
    std::shared_ptr<const EvolutionSystem> sys;
    ConstraintSet cons;
    std::optional<Submanifold> H;

    Setup(std::vector<std::string> dependents, std::vector<std::string> params = {})
        : table("x", "t", std::move(dependents)) {
        for (const auto& p : params) table.add_parameter(p);
    }

    [[nodiscard]] Expr P(const std::string& text) const { return parse(text, table); }
    [[nodiscard]] Symbol S(const std::string& name) const { return *table.resolve(name); }

    Setup& evolve(const std::vector<std::string>& rhs, int truncation = -1) {
        std::vector<Expr> f;
        for (const auto& r : rhs) f.push_back(P(r));
        sys = std::make_shared<EvolutionSystem>(table, f, truncation);
        return *this;
    }

    /// `evolve` must not have fixed K when constraints follow; K is recomputed here.
    Setup& constrain(const std::vector<std::pair<int, std::string>>& orders_rhs) {
        int dep = 1;
        for (const auto& [n, g] : orders_rhs) cons.add(dep++, n, P(g));
        std::vector<Expr> f = sys->f();
        sys = std::make_shared<EvolutionSystem>(table, f, default_truncation(sys->order_bound(), cons));
        H.emplace(sys, cons);
        return *this;
    }

    [[nodiscard]] VectorField field(const std::vector<std::pair<std::string, std::string>>& comps) const {
        VectorField X;
        for (const auto& [c, v] : comps) X.set(S(c), P(v));
        return X;
    }
};

inline Setup burgers() {
    Setup s({"u"});
    s.evolve({"u_xx + u_x^2"}).constrain({{3, "-2*u_x*u_xx"}});
    return s;
}

inline Setup heat(int n) {
    Setup s({"u"});
    s.evolve({"u_xx"}).constrain({{n, "0"}});
    return s;
}

inline Setup modheat() {
    Setup s({"u"}, {"a", "b", "c"});
    s.evolve({"a*u_xx + (b*x + c)*u"}).constrain({{3, "3*u_x*u_xx/u - 2*u_x^3/u^2"}});
    return s;
}

inline Setup two_component() {
    Setup s({"u", "v"});
    s.evolve({"u_xx + (1/2)*v^2", "2*v_xx"}).constrain({{3, "-3*v*v_x"}, {3, "0"}});
    return s;
}

}  // namespace support

#include <random>

namespace support {

/// Random expressions over a fixed list of leaves.
struct RandomExpr {
    std::mt19937_64 rng;
    std::vector<Expr> leaves;

    RandomExpr(std::uint64_t seed, std::vector<Expr> leaves_) : rng(seed), leaves(std::move(leaves_)) {}

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

    Expr leaf() {
        if (pick(5) == 0) return Expr(make_rational(pick(7) - 3, 1 + pick(3)));
        return leaves[pick(static_cast<int>(leaves.size()))];
    }

    /// Rational functions with occasional exp/log kernels.
    Expr expr(int depth) {
        if (depth == 0) return leaf();
        switch (pick(7)) {
            case 0: return expr(depth - 1) + expr(depth - 1);
            case 1: return expr(depth - 1) * expr(depth - 1);
            case 2: return pow(expr(depth - 1), static_cast<long>(pick(3) + 1));
            case 3: return exp(expr(depth - 1) * Expr(make_rational(1, 4)));
            case 4: return log(Expr(2) + pow(expr(depth - 1), 2L));
            case 5: return Expr(make_rational(pick(5) - 2, 1)) * expr(depth - 1) - expr(depth - 1);
            default: return expr(depth - 1) / (Expr(2) + pow(expr(depth - 1), 2L));
        }
    }
};

}  // namespace support

#include "jetsolve/forms.hpp"

namespace support {

struct Frame {
    SolvableStructure S;
    RestrictedPair pair;
    VolumeForm volume;
};

inline std::vector<Symbol> coords(const Setup& s, const std::vector<std::string>& names) {
    std::vector<Symbol> out;
    for (const auto& n : names) out.push_back(s.S(n));
    return out;
}

inline Frame burgers_frame(const Setup& b) {
    return {{{"X1", "X2", "X3"},
             {b.field({{"x", "1"}}), b.field({{"u", "1"}}),
              b.field({{"t", "2*t"}, {"x", "x"}, {"u_x", "-u_x"}, {"u_xx", "-2*u_xx"}})}},
            restricted_pair(*b.H),
            VolumeForm(coords(b, {"t", "x", "u", "u_x", "u_xx"}))};
}

inline Frame modheat_frame(const Setup& m) {
    return {{{"X1", "X2", "X3"},
             {m.field({{"u", "u"}, {"u_x", "u_x"}, {"u_xx", "u_xx"}}), m.field({{"x", "1"}}), m.field({{"t", "1"}})}},
            restricted_pair(*m.H),
            VolumeForm(coords(m, {"t", "x", "u", "u_x", "u_xx"}))};
}

inline Frame two_component_frame(const Setup& s) {
    return {{{"X1", "X2", "X3", "X4", "X5", "X6"},
             {s.field({{"t", "1"}}), s.field({{"x", "1"}}), s.field({{"u", "1"}}), s.field({{"u_x", "1"}}),
              s.field({{"u_xx", "1"}}), s.field({{"v_xx", "1"}})}},
            restricted_pair(*s.H),
            VolumeForm(coords(s, {"t", "x", "u", "u_x", "u_xx", "v", "v_x", "v_xx"}))};
}

/// Prolonged generators u, u_x, ..., u_{n-1} on H_n, volume (t, x, u, ..., u_{n-1}).
inline Frame heat_frame(const Setup& h, int n) {
    Frame f{{}, restricted_pair(*h.H), {}};
    std::vector<Symbol> vol{h.S("t"), h.S("x")};
    for (int k = 0; k < n; ++k) {
        f.S.names.push_back("X" + std::to_string(k + 1));
        f.S.fields.push_back(prolong_vertical_field({Expr(h.table.jet(1, k))}, *h.H));
        vol.push_back(h.table.jet(1, k));
    }
    f.volume = VolumeForm(vol);
    return f;
}

}  // namespace support
