#include "jetsolve/constraint.hpp"

#include <algorithm>

namespace jetsolve {

void ConstraintSet::add(int dependent, int order, const Expr& rhs) {
    if (order < 1) throw ConstraintError("constraint order must be at least 1");
    for (const auto& c : items_)
        if (c.dependent == dependent)
            throw ConstraintError("two constraints for dependent " + std::to_string(dependent));
    items_.push_back({dependent, order, rhs});
    std::sort(items_.begin(), items_.end(), [](const auto& a, const auto& b) { return a.dependent < b.dependent; });
}

const Constraint& ConstraintSet::for_dependent(int dependent) const {
    for (const auto& c : items_)
        if (c.dependent == dependent) return c;
    throw ConstraintError("no constraint for dependent " + std::to_string(dependent));
}

int ConstraintSet::max_order() const {
    int n = 0;
    for (const auto& c : items_) n = std::max(n, c.order);
    return n;
}

Expr ConstraintSet::defining_expr(int dependent, const SymbolTable& table) const {
    const auto& c = for_dependent(dependent);
    return Expr(table.jet(dependent, c.order)) - c.rhs;
}

void ConstraintSet::validate(const SymbolTable& table) const {
    for (int i = 1; i <= table.dependent_count(); ++i) (void)for_dependent(i);
    if (static_cast<int>(items_.size()) != table.dependent_count())
        throw ConstraintError("constraint for an undeclared dependent variable");
    for (const auto& c : items_) {
        for (const auto& s : free_symbols(c.rhs)) {
            if (s.role() == SymbolRole::LevelConstant)
                throw ConstraintError("level constant " + s.name() + " in a constraint");
            if (!s.is_jet()) continue;
            const int n = for_dependent(s.dependent()).order;
            if (s.order() >= n)
                throw ConstraintError("constraint for " + table.jet(c.dependent, c.order).display() +
                                      " depends on " + s.display() + ", whose order is not below " +
                                      std::to_string(n));
        }
    }
}

int default_truncation(int order_bound, const ConstraintSet& cons) { return order_bound + cons.max_order() + 4; }

Submanifold::Submanifold(std::shared_ptr<const EvolutionSystem> sys, ConstraintSet cons)
    : sys_(std::move(sys)), cons_(std::move(cons)) {
    const auto& table = sys_->table();
    cons_.validate(table);
    const int K = sys_->truncation();
    chart_ = {sys_->x(), sys_->t()};
    for (const auto& c : cons_.items()) {
        if (c.order > K)
            throw TruncationOverflow("constraint order " + std::to_string(c.order) + " exceeds K=" +
                                     std::to_string(K));
        for (int r = 0; r < c.order; ++r) chart_.push_back(table.jet(c.dependent, r));
    }
    // The invariant keeps every g^i on the chart, so the first layer is already closed.
    Substitution base;
    for (const auto& c : cons_.items()) base[table.jet(c.dependent, c.order)] = simplify(c.rhs);
    elim_ = base;
    for (const auto& c : cons_.items()) {
        Expr current = base.at(table.jet(c.dependent, c.order));
        for (int k = c.order; k < K; ++k) {
            current = simplify(substitute(bar_Dx(current, *sys_), base));
            elim_[table.jet(c.dependent, k + 1)] = current;
        }
    }
}

bool Submanifold::in_chart(const Symbol& s) const {
    return std::find(chart_.begin(), chart_.end(), s) != chart_.end();
}

Expr Submanifold::restrict_raw(const Expr& e) const {
    sys_->require_order(e, sys_->truncation(), "restrict");
    return substitute(e, elim_);
}

Expr Submanifold::restrict(const Expr& e) const { return simplify(restrict_raw(e)); }

Expr Submanifold::tilde_Dx(const Expr& e) const { return restrict(bar_Dx(e, *sys_)); }

Submanifold build_submanifold(std::shared_ptr<const EvolutionSystem> sys, const ConstraintSet& cons) {
    return Submanifold(std::move(sys), cons);
}

RestrictedPair restricted_pair(const Submanifold& H) {
    const auto& sys = H.system();
    RestrictedPair pair;
    pair.Dx.set(sys.x(), Expr(1));
    pair.Dt.set(sys.t(), Expr(1));
    for (const auto& s : H.chart()) {
        if (!s.is_jet()) continue;
        pair.Dx.set(s, H.restrict(Expr(s.shifted(1))));
        pair.Dt.set(s, H.restrict(sys.prolongation(s.dependent(), s.order())));
    }
    return pair;
}

CompatibilityReport check_compatibility(const Submanifold& H, int cross_check_depth) {
    const auto& sys = H.system();
    CompatibilityReport report;
    report.compatible = true;
    for (const auto& c : H.constraints().items()) {
        Expr L = H.constraints().defining_expr(c.dependent, sys.table());
        CompatibilityEntry entry{c.dependent, 0, H.restrict(bar_Dt(L, sys)), {}};
        entry.verdict = zero_test(entry.expr);
        if (entry.verdict.verdict == ZeroVerdict::Indeterminate)
            report.notes.push_back("indeterminate zero test for dependent " + std::to_string(c.dependent) + ": " +
                                   entry.verdict.note);
        report.compatible = report.compatible && entry.verdict.positive();
        report.entries.push_back(entry);

        ZeroTestOptions numeric = default_zero_test_options();
        numeric.numeric_only = true;
        Expr shifted = L;
        for (int r = 1; r <= cross_check_depth; ++r) {
            try {
                shifted = bar_Dx(shifted, sys);
                CompatibilityEntry check{c.dependent, r, H.restrict_raw(bar_Dt(shifted, sys)), {}};
                check.verdict = zero_test(check.expr, numeric);
                report.cross_checks.push_back(check);
            } catch (const TruncationOverflow& e) {
                report.notes.push_back(std::string("cross-check skipped: ") + e.what());
                break;
            }
        }
    }
    return report;
}

VectorField prolong_vertical_field(const std::vector<Expr>& phi, const Submanifold& H) {
    const auto& sys = H.system();
    if (static_cast<int>(phi.size()) != sys.m())
        throw std::invalid_argument("one generator per dependent variable expected");
    VectorField X;
    for (const auto& c : H.constraints().items()) {
        Expr component = H.restrict(phi[c.dependent - 1]);
        for (int r = 0; r < c.order; ++r) {
            X.set(sys.jet(c.dependent, r), component);
            if (r + 1 < c.order) component = H.tilde_Dx(component);
        }
    }
    return X;
}

}  // namespace jetsolve
