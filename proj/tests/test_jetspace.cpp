#include "doctest.h"
#include "support.hpp"

using namespace jetsolve;
using support::Setup;

namespace {

Setup plain(const std::string& f, std::vector<std::string> deps = {"u"}) {
    Setup s(std::move(deps));
    s.evolve({f}, 9);
    return s;
}

}  // namespace

TEST_CASE("bar_Dx on single expressions") {
    Setup s = plain("u_xx + u_x^2");
    const auto& sys = *s.sys;
    CHECK(bar_Dx(s.P("u_x"), sys) == s.P("u_xx"));
    CHECK(bar_Dx(s.P("u_xxx + 2*u_x*u_xx"), sys) == s.P("u_4 + 2*u_xx^2 + 2*u_x*u_xxx"));
    CHECK(bar_Dx(s.P("x*u"), sys) == s.P("u + x*u_x"));
    CHECK(bar_Dx(s.P("t"), sys).is_zero());
}

TEST_CASE("bar_Dt uses the evolution right-hand sides") {
    Setup s = plain("u_xx + u_x^2");
    CHECK(bar_Dt(s.P("u"), *s.sys) == s.P("u_xx + u_x^2"));
    CHECK(bar_Dt(s.P("x"), *s.sys).is_zero());
    CHECK(bar_Dt(s.P("t"), *s.sys).is_one());
    // Hand product rule: D_t u_x = D_x(u_xx + u_x^2).
    CHECK(bar_Dt(s.P("u_x"), *s.sys) == s.P("u_xxx + 2*u_x*u_xx"));

    Setup sys2({"u", "v"});
    sys2.evolve({"u_xx + (1/2)*v^2", "2*v_xx"}, 9);
    CHECK(bar_Dt(sys2.P("v"), *sys2.sys) == sys2.P("2*v_xx"));
    CHECK(bar_Dt(sys2.P("u*v"), *sys2.sys) == sys2.P("v*(u_xx + (1/2)*v^2) + 2*u*v_xx"));
}

TEST_CASE("prolongations are cached and agree with iterated bar_Dx") {
    Setup s = plain("u_xx + u_x^2");
    Expr p2 = s.sys->prolongation(1, 2);
    CHECK(p2 == bar_Dx(bar_Dx(s.P("u_xx + u_x^2"), *s.sys), *s.sys));
    CHECK(s.sys->prolongation(1, 2).identity() == p2.identity());
    CHECK(s.sys->order_bound() == 2);
}

TEST_CASE("commutator_check examples") {
    Setup b = plain("u_xx + u_x^2");
    CHECK(commutator_check(*b.sys, b.P("u")).verdict == ZeroVerdict::Zero);
    CHECK(commutator_check(*b.sys, b.P("x*t")).verdict == ZeroVerdict::Zero);
    Setup h = plain("u_xx");
    CHECK(commutator_check(*h.sys, h.P("u_x")).verdict == ZeroVerdict::Zero);
    CHECK(bar_Dt(bar_Dx(h.P("u_x"), *h.sys), *h.sys) == h.P("u_4"));
}

TEST_CASE("truncation overflow is loud") {
    Setup s({"u"});
    s.evolve({"u_xx"}, 4);
    CHECK(s.sys->truncation() == 4);
    CHECK_NOTHROW((void)bar_Dx(s.P("u_xxx"), *s.sys));
    CHECK_THROWS_AS((void)bar_Dx(s.P("u_4"), *s.sys), TruncationOverflow);
    CHECK_THROWS_AS((void)bar_Dt(s.P("u_xxx"), *s.sys), TruncationOverflow);
    CHECK_THROWS_AS((void)s.sys->prolongation(1, 3), TruncationOverflow);
    CHECK_THROWS_AS(EvolutionSystem(s.table, {s.P("u_xxx")}, 2), TruncationOverflow);
}

TEST_CASE("evolution equations reject level constants") {
    Setup s({"u"});
    s.table.add_level_constant("c1");
    CHECK_THROWS_AS(EvolutionSystem(s.table, {s.P("u_xx + c1")}), std::invalid_argument);
}

TEST_CASE("property: D_x and D_t commute on random corpora") {
    struct Case {
        std::vector<std::string> deps;
        std::vector<std::string> f;
        std::vector<std::string> leaves;
    };
    const std::vector<Case> cases = {
        {{"u"}, {"u_xx + u_x^2"}, {"x", "t", "u", "u_x", "u_xx"}},
        {{"u"}, {"u_xx"}, {"x", "u", "u_x"}},
        {{"u", "v"}, {"u_xx + (1/2)*v^2", "2*v_xx"}, {"u", "v", "u_x", "v_x", "t"}},
    };
    std::uint64_t seed = 21;
    for (const auto& c : cases) {
        Setup s(c.deps);
        s.evolve(c.f, 8);
        std::vector<Expr> leaves;
        for (const auto& l : c.leaves) leaves.push_back(s.P(l));
        support::RandomExpr gen(seed++, leaves);
        for (int i = 0; i < 25; ++i) {
            Expr e = gen.expr(2);
            auto verdict = commutator_check(*s.sys, e);
            CHECK_MESSAGE(verdict.positive(), to_string(e));
        }
    }
}

TEST_CASE("property: bar_Dx and bar_Dt are derivations") {
    Setup s = plain("u_xx + u_x^2");
    support::RandomExpr gen(5, {s.P("x"), s.P("t"), s.P("u"), s.P("u_x"), s.P("u_xx")});
    for (int i = 0; i < 40; ++i) {
        Expr a = gen.expr(2);
        Expr b = gen.expr(2);
        for (auto D : {&bar_Dx, &bar_Dt}) {
            Expr lhs = D(a * b, *s.sys);
            Expr rhs = D(a, *s.sys) * b + a * D(b, *s.sys);
            CHECK(zero_test(lhs - rhs).positive());
        }
    }
}

TEST_CASE("property: bar_Dt(u^i) equals f^i structurally") {
    Setup s({"u", "v"});
    s.evolve({"u_xx + (1/2)*v^2", "2*v_xx"}, 8);
    CHECK(bar_Dt(s.P("u"), *s.sys) == s.sys->f(1));
    CHECK(bar_Dt(s.P("v"), *s.sys) == s.sys->f(2));
}
