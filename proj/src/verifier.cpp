#include "jetsolve/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace jetsolve {

Range SamplePlan::range_for(const Symbol& s) const {
    auto it = ranges.find(s.name());
    if (it == ranges.end()) it = ranges.find(s.display());
    if (it != ranges.end()) return it->second;
    if (s.role() == SymbolRole::IndependentX || s.role() == SymbolRole::IndependentT) return independent;
    return other;
}

namespace {

bool finite_at(const Expr& e, const Point& p, double* value = nullptr) {
    try {
        const double v = eval(e, p);
        if (value != nullptr) *value = v;
        return std::isfinite(v);
    } catch (const EvalError&) {
        return false;
    } catch (const std::domain_error&) {
        return false;
    }
}

}  // namespace

std::vector<Point> sample_points(const SymbolSet& symbols, const std::vector<Expr>& guards, const SamplePlan& plan) {
    std::mt19937_64 rng(plan.seed);
    std::vector<Point> out;
    const long cap = static_cast<long>(plan.count) * plan.retry_factor;
    for (long draw = 0; draw < cap && static_cast<int>(out.size()) < plan.count; ++draw) {
        Point p;
        for (const auto& s : symbols) {
            const Range r = plan.range_for(s);
            p[s] = std::uniform_real_distribution<double>(r.first, r.second)(rng);
        }
        if (std::all_of(guards.begin(), guards.end(), [&](const Expr& g) { return finite_at(g, p); }))
            out.push_back(std::move(p));
    }
    return out;
}

namespace {

Expr x_derivative(const Expr& e, const Symbol& x, int r) {
    Expr d = e;
    for (int k = 0; k < r; ++k) d = diff(d, x);
    return d;
}

// Jets of `e` replaced by x-derivatives of the solution.
Expr on_solution(const Expr& e, const Solution& sol, const Symbol& x) {
    Substitution rules;
    for (const auto& s : free_symbols(e)) {
        if (!s.is_jet()) continue;
        auto it = sol.find(s.dependent());
        if (it == sol.end()) throw std::invalid_argument("solution lacks dependent " + s.base_name());
        rules[s] = x_derivative(it->second, x, s.order());
    }
    return substitute_once(e, rules);
}

SymbolSet symbols_of(const std::vector<Expr>& exprs) {
    SymbolSet out;
    for (const auto& e : exprs)
        for (const auto& s : free_symbols(e)) out.insert(s);
    return out;
}

// Fourth-order central difference.
double central_difference(const Expr& e, Point p, const Symbol& s) {
    const double h = 1e-3 * std::max(1.0, std::fabs(p[s]));
    const double x0 = p[s];
    auto at = [&](double dx) {
        p[s] = x0 + dx;
        return eval(e, p);
    };
    return (8 * (at(h) - at(-h)) - (at(2 * h) - at(-2 * h))) / (12 * h);
}

ResidualEntry measure(const std::string& label, const Expr& lhs, const Expr& rhs, const std::vector<Expr>& sol_exprs,
                      const Symbol& x, const Symbol& t, const SamplePlan& plan) {
    ResidualEntry entry;
    entry.label = label;
    entry.expr = lhs - rhs;
    entry.symbolic = zero_test(entry.expr);
    std::vector<Expr> guards = sol_exprs;
    guards.push_back(lhs);
    guards.push_back(rhs);
    const auto points = sample_points(symbols_of(guards), guards, plan);
    entry.samples = static_cast<int>(points.size());
    std::vector<std::pair<Expr, Symbol>> firsts;
    for (const auto& s : sol_exprs) {
        firsts.emplace_back(s, x);
        firsts.emplace_back(s, t);
    }
    for (const auto& p : points) {
        const double l = eval(lhs, p);
        const double r = eval(rhs, p);
        const double d = std::fabs(l - r);
        entry.max_abs = std::max(entry.max_abs, d);
        entry.max_rel = std::max(entry.max_rel, d / std::max(1.0, std::fabs(l) + std::fabs(r)));
        for (const auto& [e, s] : firsts) {
            double exact = 0;
            if (!finite_at(diff(e, s), p, &exact)) continue;
            try {
                const double fd = central_difference(e, p, s);
                entry.fd_max = std::max(entry.fd_max, std::fabs(fd - exact) / std::max(1.0, std::fabs(exact)));
            } catch (const EvalError&) {
            } catch (const std::domain_error&) {
            }
        }
    }
    if (entry.samples < plan.count)
        entry.note = "only " + std::to_string(entry.samples) + " of " + std::to_string(plan.count) +
                     " points inside the domain";
    entry.pass = entry.samples == plan.count && entry.max_rel <= plan.tau_rel &&
                 entry.symbolic.verdict != ZeroVerdict::Nonzero;
    return entry;
}

std::vector<Expr> values(const Solution& sol) {
    std::vector<Expr> out;
    for (const auto& [i, e] : sol) out.push_back(e);
    return out;
}

}  // namespace

ResidualReport residual(const Solution& sol, const EvolutionSystem& sys, const SamplePlan& plan) {
    ResidualReport report;
    report.pass = true;
    const auto exprs = values(sol);
    for (int i = 1; i <= sys.m(); ++i) {
        auto it = sol.find(i);
        if (it == sol.end()) throw std::invalid_argument("solution lacks dependent " + sys.jet(i, 0).display());
        const Expr lhs = diff(it->second, sys.t());
        const Expr rhs = on_solution(sys.f(i), sol, sys.x());
        auto entry = measure(sys.jet(i, 0).display() + "_t = f", lhs, rhs, exprs, sys.x(), sys.t(), plan);
        report.pass = report.pass && entry.pass;
        report.entries.push_back(std::move(entry));
    }
    return report;
}

ResidualReport constraint_residual(const Solution& sol, const ConstraintSet& cons, const EvolutionSystem& sys,
                                   const SamplePlan& plan) {
    ResidualReport report;
    report.pass = true;
    const auto exprs = values(sol);
    for (const auto& c : cons.items()) {
        auto it = sol.find(c.dependent);
        if (it == sol.end())
            throw std::invalid_argument("solution lacks dependent " + sys.jet(c.dependent, 0).display());
        const Expr lhs = x_derivative(it->second, sys.x(), c.order);
        const Expr rhs = on_solution(c.rhs, sol, sys.x());
        auto entry = measure(sys.jet(c.dependent, c.order).display() + " = g", lhs, rhs, exprs, sys.x(), sys.t(), plan);
        report.pass = report.pass && entry.pass;
        report.entries.push_back(std::move(entry));
    }
    return report;
}

SpotReport spot_check(const Expr& identity, const SamplePlan& plan) {
    SpotReport out;
    const auto points = sample_points(free_symbols(identity), {identity}, plan);
    out.samples = static_cast<int>(points.size());
    out.min_abs = points.empty() ? 0 : std::numeric_limits<double>::infinity();
    for (const auto& p : points) {
        const double v = std::fabs(eval(identity, p));
        out.min_abs = std::min(out.min_abs, v);
        out.max_abs = std::max(out.max_abs, v);
    }
    if (out.samples < plan.count)
        out.note = "only " + std::to_string(out.samples) + " of " + std::to_string(plan.count) + " points usable";
    out.zero = out.samples > 0 && out.max_abs <= plan.tau_abs;
    return out;
}

}  // namespace jetsolve
