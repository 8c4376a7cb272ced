#pragma once

#include "jetsolve/jetspace.hpp"
#include "jetsolve/vector_field.hpp"

#include <memory>
#include <string>
#include <vector>

namespace jetsolve {

/// u^i_{n_i} = g^i.
struct Constraint {
    int dependent = 1;
    int order = 1;
    Expr rhs;
};

class ConstraintError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConstraintSet {
public:
    void add(int dependent, int order, const Expr& rhs);

    [[nodiscard]] const std::vector<Constraint>& items() const { return items_; }
    [[nodiscard]] const Constraint& for_dependent(int dependent) const;
    [[nodiscard]] int max_order() const;
    /// L^i = u^i_{n_i} - g^i.
    [[nodiscard]] Expr defining_expr(int dependent, const SymbolTable& table) const;

    /// One constraint per dependent of `table`, and no g^j mentions u^i_n with n >= n_i.
    void validate(const SymbolTable& table) const;

private:
    std::vector<Constraint> items_;  // sorted by dependent
};

/// order_bound + max constraint order + 4.
int default_truncation(int order_bound, const ConstraintSet& cons);

/// Chart (x, t, u^i_0 .. u^i_{n_i - 1}) on H with elimination rules u^i_k -> chart
/// expression for n_i <= k <= K.
class Submanifold {
public:
    Submanifold(std::shared_ptr<const EvolutionSystem> sys, ConstraintSet cons);

    [[nodiscard]] const EvolutionSystem& system() const { return *sys_; }
    [[nodiscard]] std::shared_ptr<const EvolutionSystem> system_ptr() const { return sys_; }
    [[nodiscard]] const ConstraintSet& constraints() const { return cons_; }
    [[nodiscard]] const std::vector<Symbol>& chart() const { return chart_; }
    [[nodiscard]] int dim() const { return static_cast<int>(chart_.size()); }
    [[nodiscard]] const Substitution& elim() const { return elim_; }
    [[nodiscard]] bool in_chart(const Symbol& s) const;

    /// Replaces every u^i_k with k >= n_i via elim and normalizes to the rational normal form.
    [[nodiscard]] Expr restrict(const Expr& e) const;
    /// As restrict, without the final rational normalization.
    [[nodiscard]] Expr restrict_raw(const Expr& e) const;
    /// D̃_x of a chart expression: restrict(D̄_x e).
    [[nodiscard]] Expr tilde_Dx(const Expr& e) const;

private:
    std::shared_ptr<const EvolutionSystem> sys_;
    ConstraintSet cons_;
    std::vector<Symbol> chart_;
    Substitution elim_;
};

Submanifold build_submanifold(std::shared_ptr<const EvolutionSystem> sys, const ConstraintSet& cons);

struct RestrictedPair {
    VectorField Dx;
    VectorField Dt;
};

RestrictedPair restricted_pair(const Submanifold& H);

struct CompatibilityEntry {
    int dependent = 1;
    int r = 0;  // D̄_t D̄_x^r L^i
    Expr expr;
    ZeroTestResult verdict;
};

struct CompatibilityReport {
    bool compatible = false;
    std::vector<CompatibilityEntry> entries;       // r = 0, decisive
    std::vector<CompatibilityEntry> cross_checks;  // r = 1, 2, sampled only
    std::vector<std::string> notes;
};

CompatibilityReport check_compatibility(const Submanifold& H, int cross_check_depth = 2);

/// Evolutionary field with generators phi^i, prolonged by D̃_x along the chart of H.
VectorField prolong_vertical_field(const std::vector<Expr>& phi, const Submanifold& H);

}  // namespace jetsolve
