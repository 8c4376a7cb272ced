#include "doctest.h"
#include "support.hpp"

#include <algorithm>
#include <numeric>

using namespace jetsolve;
using support::Setup;

namespace {

bool field_is_zero(const VectorField& X) {
    for (const auto& [s, v] : X.components())
        if (!zero_test(v).positive()) return false;
    return true;
}

bool fields_equal(const VectorField& A, const VectorField& B) { return field_is_zero(A - B); }

// Leibniz formula: sum over permutations, independent of the Laplace implementation.
Expr leibniz(const std::vector<std::vector<Expr>>& m) {
    const int n = static_cast<int>(m.size());
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    Expr sum;
    do {
        int inversions = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) inversions += p[i] > p[j];
        Expr term(inversions % 2 ? -1 : 1);
        for (int i = 0; i < n; ++i) term = term * m[i][p[i]];
        sum = sum + term;
    } while (std::next_permutation(p.begin(), p.end()));
    return sum;
}

}  // namespace

TEST_CASE("lie_bracket examples") {
    Setup b = support::burgers();
    auto f = support::burgers_frame(b);
    CHECK(fields_equal(lie_bracket(f.S.fields[0], f.S.fields[2]), f.S.fields[0]));
    CHECK(lie_bracket(b.field({{"x", "1"}}), b.field({{"t", "1"}})).is_zero());

    Setup m = support::modheat();
    auto mf = support::modheat_frame(m);
    CHECK(fields_equal(lie_bracket(mf.S.fields[1], mf.pair.Dt), mf.S.fields[0].scaled(m.P("b"))));
}

TEST_CASE("determinant agrees with the Leibniz formula") {
    Setup s({"u"});
    s.evolve({"u_xx"});
    support::RandomExpr gen(3, {s.P("x"), s.P("u"), s.P("u_x")});
    for (int n = 1; n <= 4; ++n)
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<std::vector<Expr>> m(n, std::vector<Expr>(n));
            for (auto& row : m)
                for (auto& e : row) e = gen.pick(3) == 0 ? Expr() : gen.expr(1);
            CHECK(zero_test(determinant(m) - leibniz(m)).positive());
        }
}

TEST_CASE("in_span examples") {
    Setup m = support::modheat();
    auto mf = support::modheat_frame(m);
    const auto& chart = mf.volume.coords();
    auto v = in_span(mf.S.fields[0].scaled(m.P("b")), {mf.pair.Dx, mf.pair.Dt, mf.S.fields[0]}, chart);
    CHECK(v.in_span);

    Setup s({"u"});
    s.evolve({"u_xx"});
    const std::vector<Symbol> xt{s.S("x"), s.S("t"), s.S("u")};
    auto no = in_span(s.field({{"t", "1"}}), {s.field({{"x", "1"}})}, xt);
    CHECK_FALSE(no.in_span);
    REQUIRE(no.witness);
    CHECK(no.witness->verdict.verdict == ZeroVerdict::Nonzero);
    CHECK(in_span(s.field({{"x", "u_x"}}), {s.field({{"x", "1"}})}, xt).in_span);
    CHECK(in_span(VectorField(), {}, xt).in_span);
    CHECK_FALSE(in_span(s.field({{"u", "1"}}), {}, xt).in_span);
}

TEST_CASE("bundled structures are accepted") {
    Setup b = support::burgers();
    auto bf = support::burgers_frame(b);
    auto cert = verify_solvable_structure(bf.S, bf.pair, bf.volume.coords());
    CHECK(cert.accepted);
    CHECK(simplify(cert.delta) == simplify(b.P("2*u_xx*(u_xx + u_x^2)")));
    CHECK(cert.checks.size() == 9);

    Setup s = support::two_component();
    auto sf = support::two_component_frame(s);
    auto sc = verify_solvable_structure(sf.S, sf.pair, sf.volume.coords());
    CHECK(sc.accepted);
    CHECK(sc.delta == s.P("-2*v_xx^2"));

    Setup m = support::modheat();
    auto mf = support::modheat_frame(m);
    auto mc = verify_solvable_structure(mf.S, mf.pair, mf.volume.coords());
    CHECK(mc.accepted);
    // 1/M as displayed for the modified heat equation.
    CHECK(exactly_equal(mc.delta, m.P("2*a*(-u^3*u_xx^3 + 3*u^2*u_x^2*u_xx^2 - 3*u*u_x^4*u_xx + u_x^6)/u^3")));

    for (int n = 3; n <= 6; ++n) {
        Setup h = support::heat(n);
        auto hf = support::heat_frame(h, n);
        auto hc = verify_solvable_structure(hf.S, hf.pair, hf.volume.coords());
        CHECK(hc.accepted);
        // Anti-triangular Hankel block with u_{n-1} on the anti-diagonal.
        const Expr top(h.table.jet(1, n - 1));
        CHECK(exactly_equal(hc.delta * hc.delta, pow(top, 2L * n)));
    }
}

TEST_CASE("bracket table of the modified heat structure") {
    Setup m = support::modheat();
    auto mf = support::modheat_frame(m);
    auto cert = verify_solvable_structure(mf.S, mf.pair, mf.volume.coords());
    int nonzero = 0;
    for (const auto& c : cert.checks) {
        if (c.label == "[X2, Dt]") {
            CHECK(fields_equal(c.bracket, mf.S.fields[0].scaled(m.P("b"))));
            ++nonzero;
        } else {
            CHECK_MESSAGE(field_is_zero(c.bracket), c.label);
        }
    }
    CHECK(nonzero == 1);
    CHECK(cert.checks.size() == 9);
}

TEST_CASE("mutated and shuffled structures are rejected") {
    Setup b = support::burgers();
    auto bf = support::burgers_frame(b);
    auto mutated = bf.S;
    mutated.fields[2] = b.field({{"t", "2*t"}, {"x", "x"}, {"u_x", "u_x"}, {"u_xx", "-2*u_xx"}});
    auto cert = verify_solvable_structure(mutated, bf.pair, bf.volume.coords());
    CHECK_FALSE(cert.accepted);
    REQUIRE(cert.failure);
    CHECK(cert.failure->label == "[X3, Dx]");

    SolvableStructure shuffled{{"X3", "X1", "X2"}, {bf.S.fields[2], bf.S.fields[0], bf.S.fields[1]}};
    auto sc = verify_solvable_structure(shuffled, bf.pair, bf.volume.coords());
    CHECK_FALSE(sc.accepted);
    REQUIRE(sc.failure);
    CHECK(sc.failure->label == "[X1, X3]");
    CHECK(fields_equal(sc.failure->bracket, b.field({{"x", "1"}})));

    auto short_structure = bf.S;
    short_structure.fields.pop_back();
    short_structure.names.pop_back();
    CHECK_FALSE(verify_solvable_structure(short_structure, bf.pair, bf.volume.coords()).accepted);
}

TEST_CASE("is_abelian") {
    Setup m = support::modheat();
    auto mf = support::modheat_frame(m);
    auto r = is_abelian(mf.S, mf.pair, mf.volume.coords());
    CHECK(r.algebra_abelian);
    CHECK_FALSE(r.abelian);
    CHECK(r.commutes_with_pair == std::vector<bool>{true, false, true});

    for (int n = 3; n <= 6; ++n) {
        Setup h = support::heat(n);
        auto hf = support::heat_frame(h, n);
        CHECK(is_abelian(hf.S, hf.pair, hf.volume.coords()).abelian);
    }

    Setup s({"u"});
    s.evolve({"u_xx"}).constrain({{1, "0"}});
    SolvableStructure pair_xs{{}, {s.field({{"x", "1"}}), s.field({{"x", "x"}})}};
    CHECK_FALSE(is_abelian(pair_xs, restricted_pair(*s.H), s.H->chart()).abelian);
}

TEST_CASE("property: brackets are antisymmetric and satisfy Jacobi") {
    Setup s({"u"});
    s.evolve({"u_xx"});
    support::RandomExpr gen(17, {s.P("x"), s.P("u"), s.P("u_x")});
    const std::vector<std::string> coords{"x", "u", "u_x"};
    auto random_field = [&] {
        VectorField X;
        for (const auto& c : coords)
            if (gen.pick(3)) X.set(s.S(c), gen.expr(1));
        return X;
    };
    for (int i = 0; i < 15; ++i) {
        VectorField A = random_field(), B = random_field(), C = random_field();
        CHECK(field_is_zero(lie_bracket(A, B) + lie_bracket(B, A)));
        VectorField jacobi = lie_bracket(A, lie_bracket(B, C)) + lie_bracket(B, lie_bracket(C, A)) +
                             lie_bracket(C, lie_bracket(A, B));
        CHECK(field_is_zero(jacobi));
    }
}

TEST_CASE("property: in_span is invariant under recombination of generators") {
    Setup b = support::burgers();
    auto bf = support::burgers_frame(b);
    const auto& chart = bf.volume.coords();
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> coef(-3, 3);
    const std::vector<VectorField> base{bf.pair.Dx, bf.pair.Dt, bf.S.fields[0]};
    const std::vector<VectorField> probes{lie_bracket(bf.S.fields[2], bf.pair.Dx), bf.S.fields[1],
                                          bf.S.fields[0].scaled(b.P("u_x")), bf.S.fields[2]};
    for (int trial = 0; trial < 6; ++trial) {
        std::vector<std::vector<int>> a(3, std::vector<int>(3));
        int det = 0;
        while (det == 0) {
            for (auto& row : a)
                for (auto& v : row) v = coef(rng);
            det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                  a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
        }
        std::vector<VectorField> mixed(3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) mixed[i] = mixed[i] + base[j].scaled(Expr(a[i][j]));
        for (const auto& Z : probes) CHECK(in_span(Z, base, chart).in_span == in_span(Z, mixed, chart).in_span);
    }
}
