#include "doctest.h"
#include "support.hpp"

#include "jetsolve/quadrature.hpp"
#include "jetsolve/verifier.hpp"

#include <cmath>

using namespace jetsolve;
using support::Setup;

namespace {

// d/dw of the antiderivative reproduces the integrand.
bool integrates_to(const Expr& f, const Symbol& w) {
    const Antiderivative a = antiderivative(f, w);
    return a.ok && zero_test(diff(a.value, w) - f).positive();
}

// F and G differ by a constant on the coordinates of ω.
bool same_potential(const Expr& F, const Expr& G, const std::vector<Symbol>& coords) {
    for (const auto& s : coords)
        if (!zero_test(diff(F - G, s)).positive()) return false;
    return true;
}

Form one_form(const Setup& s, const std::vector<std::string>& coords,
              const std::vector<std::pair<std::string, std::string>>& comps) {
    Form w(support::coords(s, coords), 1);
    for (const auto& [c, v] : comps) w.set(s.S(c), s.P(v));
    return w;
}

}  // namespace

TEST_CASE("antiderivative classes") {
    Setup s({"u"}, {"k", "a"});
    const Symbol w = s.S("u_x");
    CHECK(integrates_to(s.P("3*u_x^2 - a*u_x + 1"), w));
    CHECK(integrates_to(s.P("1/(k^2 - u_x^2)"), w));
    CHECK(integrates_to(s.P("(u_x^3 + 2)/((u_x - k)^3*(u_x + 2*a))"), w));
    CHECK(integrates_to(s.P("u_x^2*exp(a*u_x + k)"), w));
    CHECK(integrates_to(s.P("u_x^(1/3)/(1 + k^2)"), w));
    CHECK(integrates_to(s.P("u_x/(u_xx + u_x^2)"), w));
    CHECK(integrates_to(s.P("exp(u_x)*(1 + exp(u_x))"), w));

    // The Burgers log quotient: -1/(k^2 - u_x^2) -> (1/(2k)) log((k - u_x)/(k + u_x)).
    const Antiderivative q = antiderivative(s.P("-1/(k^2 - u_x^2)"), w);
    REQUIRE(q.ok);
    CHECK(q.value == s.P("(1/2)*log((k - u_x)/(k + u_x))/k"));
    CHECK(q.side_conditions.size() == 2);

    const Antiderivative atan_like = antiderivative(s.P("1/(u_x^2 + 1)"), w);
    CHECK_FALSE(atan_like.ok);
    CHECK(atan_like.failure.find("does not split") != std::string::npos);
    CHECK_FALSE(antiderivative(s.P("exp(u_x^2)"), w).ok);
}

TEST_CASE("antiderivatives of random split rational functions") {
    Setup s({"u"}, {"k"});
    const Symbol w = s.S("u");
    support::RandomExpr gen(17, {s.P("u"), s.P("k"), s.P("x")});
    for (int trial = 0; trial < 30; ++trial) {
        // Denominator with known linear factors, random numerator.
        const Expr root1 = gen.leaf();
        const Expr root2 = gen.leaf();
        Expr num = Expr(1);
        for (int i = 0; i < 3; ++i) num = num * Expr(w) + gen.leaf();
        const Expr den = pow(Expr(w) - s.P("k"), 2L) * (Expr(w) - root1 - Expr(3)) * (Expr(w) + root2 + Expr(5));
        if (zero_test(den).positive()) continue;
        const Expr f = num / den;
        CHECK_MESSAGE(integrates_to(f, w), to_string(f));
    }
}

TEST_CASE("integrate_closed") {
    Setup b = support::burgers();
    SUBCASE("dx -> x") {
        Form dx = one_form(b, {"x", "u"}, {{"x", "1"}});
        const Potential p = integrate_closed(dx);
        REQUIRE(p.symbolic());
        CHECK(p.F == b.P("x"));
        CHECK(p.reconstructed);
    }
    SUBCASE("Burgers Omega_3") {
        auto bf = support::burgers_frame(b);
        FrameForms F(bf.S, bf.pair, bf.volume);
        const Potential p = integrate_closed(F.omega(3));
        REQUIRE(p.symbolic());
        CHECK(p.F == b.P("-(1/2)*log(u_xx + u_x^2)"));
        CHECK(same_potential(p.F, -b.P("(1/2)*log(u_xx + u_x^2)"), bf.volume.coords()));
    }
    SUBCASE("not closed") {
        Form w = one_form(b, {"x", "u"}, {{"u", "x"}});
        const Potential p = integrate_closed(w);
        CHECK(p.kind == PotentialKind::NotClosed);
        CHECK_FALSE(p.failure.empty());
    }
    SUBCASE("numeric fallback against atan") {
        Form w = one_form(b, {"u", "x"}, {{"u", "1/(u^2 + 1)"}, {"x", "2*x"}});
        const Potential p = integrate_closed(w);
        REQUIRE(p.kind == PotentialKind::Numeric);
        CHECK(p.failure.find("does not split") != std::string::npos);
        const NumericPotential& N = *p.numeric;
        const double u0 = N.base().at(b.S("u"));
        const double x0 = N.base().at(b.S("x"));
        for (double u : {-1.5, 0.3, 2.0})
            for (double x : {0.2, 1.7}) {
                const double oracle = std::atan(u) - std::atan(u0) + x * x - x0 * x0;
                CHECK(std::fabs(N({{b.S("u"), u}, {b.S("x"), x}}) - oracle) < 1e-10);
            }
    }
}

TEST_CASE("numeric and symbolic potentials agree") {
    Setup s = support::two_component();
    Setup b = support::burgers();
    auto bf = support::burgers_frame(b);
    FrameForms F(bf.S, bf.pair, bf.volume);
    const Form w = F.omega(3);
    const Potential p = integrate_closed(w);
    REQUIRE(p.symbolic());
    const NumericPotential N(w);
    SamplePlan plan;
    plan.count = 20;
    plan.other = {0.5, 1.5};
    SymbolSet syms(bf.volume.coords().begin(), bf.volume.coords().end());
    const auto points = sample_points(syms, {p.F}, plan);
    REQUIRE(points.size() == 20);
    Point base = N.base();
    const double offset = eval(p.F, base);
    for (const auto& pt : points) CHECK(std::fabs((eval(p.F, pt) - offset) - N(pt)) < 1e-8);
}

TEST_CASE("solve_level_set") {
    Setup b({"u"});
    const Symbol c3 = b.table.add_level_constant("c3");
    const Symbol c2 = b.table.add_level_constant("c2");
    const std::vector<Symbol> chart = support::coords(b, {"t", "x", "u", "u_x", "u_xx"});

    const LevelSolution s3 = solve_level_set(b.P("(1/2)*log(u_xx + u_x^2)"), c3, chart);
    REQUIRE(s3.ok);
    CHECK(s3.coordinate == b.S("u_xx"));
    REQUIRE(s3.derived.size() == 1);
    const Symbol k3 = s3.derived[0].symbol;
    CHECK(k3.name() == "k3");
    CHECK(s3.derived[0].definition == exp(Expr(c3)));
    CHECK(exactly_equal(s3.value, pow(Expr(k3), 2L) - b.P("u_x^2")));

    b.table.add_level_constant("k3");
    const LevelSolution s2 = solve_level_set(b.P("u - k3^2*t + (1/2)*log(k3^2 - u_x^2)"), c2, chart);
    REQUIRE(s2.ok);
    CHECK(s2.coordinate == b.S("u"));
    CHECK(exactly_equal(s2.value, b.P("k3^2*t - (1/2)*log(k3^2 - u_x^2) + c2")));
    CHECK(s2.alternatives == std::vector<Symbol>{b.S("u_x")});

    Setup s({"u", "v"});
    const Symbol c6 = s.table.add_level_constant("c6");
    const Symbol c2s = s.table.add_level_constant("c2");
    const LevelSolution sv = solve_level_set(s.P("v_x - c6*x"), c2s,
                                             support::coords(s, {"t", "x", "u", "v", "v_x"}));
    REQUIRE(sv.ok);
    CHECK(sv.coordinate == s.S("v_x"));
    CHECK(exactly_equal(sv.value, s.P("c6*x + c2")));
    (void)c6;

    // Möbius inversion, then a check of F(solution) = c.
    const LevelSolution sm = solve_level_set(b.P("(u_x + 2*t)/(3*u_x - x)"), c2, chart);
    REQUIRE(sm.ok);
    CHECK(exactly_equal(substitute(b.P("(u_x + 2*t)/(3*u_x - x)"), {{b.S("u_x"), sm.value}}), Expr(c2)));

    const LevelSolution bad = solve_level_set(b.P("sin(u) + u"), c2, chart);
    CHECK_FALSE(bad.ok);
    CHECK(bad.failure.find("no isolatable coordinate") != std::string::npos);
}

TEST_CASE("Burgers descent") {
    Setup b = support::burgers();
    auto bf = support::burgers_frame(b);
    const ReductionChain chain = descend(bf.S, bf.pair, bf.volume);
    REQUIRE(chain.complete());
    REQUIRE(chain.steps.size() == 3);
    for (const auto& st : chain.steps) CHECK(st.first_integral());
    CHECK(chain.steps[0].level->coordinate == b.S("u_xx"));
    CHECK(chain.steps[1].level->coordinate == b.S("u"));
    CHECK(chain.steps[2].level->coordinate == b.S("u_x"));
    CHECK(same_potential(chain.steps[0].potential.F, -b.P("(1/2)*log(u_xx + u_x^2)"), bf.volume.coords()));

    // Displayed F_1 = -x + (1/(2k))log((k + u_x)/(k - u_x)), ours has the opposite orientation.
    const Symbol k3 = chain.derived.at(0).symbol;
    Setup bk = support::burgers();
    bk.table.add_level_constant("k3");
    const Expr F1_displayed = bk.P("-x + (1/(2*k3))*log((k3 + u_x)/(k3 - u_x))");
    CHECK(same_potential(chain.steps[2].potential.F, -F1_displayed, chain.steps[2].coords));
    CHECK(k3 == bk.S("k3"));

    const Expr u = chain.solution.at(1);
    SamplePlan plan;
    const auto pde = residual(chain.solution, *b.sys, plan);
    CHECK(pde.pass);
    CHECK(pde.entries[0].symbolic.verdict == ZeroVerdict::Zero);
    CHECK(constraint_residual(chain.solution, b.cons, *b.sys, plan).pass);

    // Displayed family u = k^2 t - log(2k e^{k(x+c1)}/(e^{2k(x+c1)} + 1)) + c2, with c1 -> -c1.
    bk.table.add_level_constant("c1");
    bk.table.add_level_constant("c2");
    const Expr displayed = bk.P("k3^2*t - log(2*k3*exp(k3*(x + c1))/(exp(2*k3*(x + c1)) + 1)) + c2");
    const Symbol c1 = *bk.table.resolve("c1");
    for (const auto& p : sample_points(free_symbols(u), {u}, plan)) {
        Point q = p;
        q[c1] = -p.at(c1);
        CHECK(eval(u, p) == doctest::Approx(eval(displayed, q)).epsilon(1e-10));
    }
}

TEST_CASE("modified heat and two-component descents") {
    SamplePlan plan;
    SUBCASE("modified heat") {
        Setup m = support::modheat();
        auto mf = support::modheat_frame(m);
        const ReductionChain chain = descend(mf.S, mf.pair, mf.volume);
        REQUIRE(chain.complete());
        for (const auto& st : chain.steps) CHECK(st.first_integral());
        CHECK(chain.steps[0].level->coordinate == m.S("u_xx"));
        CHECK(chain.steps[1].level->coordinate == m.S("u_x"));
        CHECK(chain.steps[2].level->coordinate == m.S("u"));
        CHECK(residual(chain.solution, *m.sys, plan).pass);
        CHECK(constraint_residual(chain.solution, m.cons, *m.sys, plan).pass);
    }
    SUBCASE("two-component system") {
        Setup s = support::two_component();
        auto sf = support::two_component_frame(s);
        const ReductionChain chain = descend(sf.S, sf.pair, sf.volume);
        REQUIRE(chain.complete());
        for (const auto& st : chain.steps) CHECK(st.first_integral());
        // Displayed Ω_6 = dF_6 with F_6 = v_xx and F_2 = v_x - c6 x.
        CHECK(chain.steps[0].potential.F == s.P("v_xx"));
        s.table.add_level_constant("c6");
        CHECK(same_potential(chain.steps[4].potential.F, s.P("x - v_x/c6"), chain.steps[4].coords));
        // v = -c1 - 2c6(-x^2/4 - c2 x/(2c6) - t) after c1 -> 2 c1 c6, c2 -> -c2 c6.
        s.table.add_level_constant("c1");
        s.table.add_level_constant("c2");
        const Expr v_displayed = s.P("-c1 - 2*c6*(-x^2/4 - c2*x/(2*c6) - t)");
        const Expr relabeled = substitute_once(v_displayed, {{s.S("c1"), s.P("2*c1*c6")}, {s.S("c2"), s.P("-c2*c6")}});
        CHECK(exactly_equal(chain.solution.at(2), relabeled));
        CHECK(residual(chain.solution, *s.sys, plan).pass);
        CHECK(constraint_residual(chain.solution, s.cons, *s.sys, plan).pass);
    }
}

TEST_CASE("abelian shortcut") {
    SUBCASE("heat H_n") {
        for (int n = 3; n <= 5; ++n) {
            Setup h = support::heat(n);
            auto hf = support::heat_frame(h, n);
            const ShortcutResult r = abelian_shortcut(hf.S, hf.pair, hf.volume);
            CHECK(r.all_closed);
            CHECK_FALSE(r.fallback.has_value());
            CHECK(r.forms.size() == static_cast<std::size_t>(n));
            for (const auto& f : r.forms) {
                CHECK(f.potential.symbolic());
                CHECK(f.potential.reconstructed);
            }
        }
    }
    SUBCASE("H_1 with X_1 = d_u") {
        Setup h = support::heat(1);
        SolvableStructure S{{"X1"}, {h.field({{"u", "1"}})}};
        VolumeForm vol(support::coords(h, {"t", "x", "u"}));
        const ShortcutResult r = abelian_shortcut(S, restricted_pair(*h.H), vol);
        REQUIRE(r.forms.size() == 1);
        REQUIRE(r.forms[0].potential.symbolic());
        const Expr F = r.forms[0].potential.F;
        CHECK((F == h.P("u") || F == h.P("-u")));
    }
    SUBCASE("modified heat falls back") {
        Setup m = support::modheat();
        auto mf = support::modheat_frame(m);
        const ShortcutResult r = abelian_shortcut(mf.S, mf.pair, mf.volume);
        CHECK_FALSE(r.all_closed);
        CHECK(r.forms[1].potential.symbolic());
        CHECK(r.forms[2].potential.symbolic());
        CHECK(r.forms[0].potential.kind == PotentialKind::NotClosed);
        REQUIRE(r.fallback.has_value());
        CHECK(r.fallback->complete());
        // Displayed Ω_3 = dt - dv/(2av^2) integrates to t + 1/(2av), v = u_xx/u - u_x^2/u^2.
        CHECK(same_potential(r.forms[2].potential.F, m.P("t + 1/(2*a*(u_xx/u - u_x^2/u^2))"), mf.volume.coords()));
    }
}
