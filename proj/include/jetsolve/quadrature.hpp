#pragma once

#include "jetsolve/forms.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace jetsolve {

struct Antiderivative {
    bool ok = false;
    Expr value;
    std::vector<std::string> side_conditions;  // e.g. "k3 - u_x > 0" for each log argument
    std::string failure;
};

/// ∫ f dw with every other symbol held constant. Supported classes: rational
/// functions of w whose denominator splits into linear factors over the
/// coefficient field (quadratics through a square discriminant), sums of
/// w^p * exp(a*w + b), and g'/g.
Antiderivative antiderivative(const Expr& f, const Symbol& w);

/// Path integral of a closed one-form along coordinate axes from a base point.
class NumericPotential {
public:
    NumericPotential() = default;
    explicit NumericPotential(Form omega);

    [[nodiscard]] const Form& form() const { return omega_; }
    [[nodiscard]] const Point& base() const { return base_; }
    /// `p` binds the chart coordinates and every other symbol of ω.
    [[nodiscard]] double operator()(const Point& p) const;

private:
    Form omega_;
    Point base_;
};

enum class PotentialKind : unsigned char { Symbolic, Numeric, NotClosed };
const char* potential_kind_name(PotentialKind k);

struct Potential {
    PotentialKind kind = PotentialKind::NotClosed;
    Expr F;  // symbolic only
    std::optional<NumericPotential> numeric;
    ClosedVerdict closed;
    bool reconstructed = false;  // dF = ω checked coefficientwise
    std::vector<std::string> side_conditions;
    std::string failure;  // offending integrand for Numeric, witness for NotClosed

    [[nodiscard]] bool symbolic() const { return kind == PotentialKind::Symbolic; }
};

/// F with dF = ω by sequential antidifferentiation along the coordinates of ω.
Potential integrate_closed(const Form& omega);

struct DerivedConstant {
    Symbol symbol;
    Expr definition;  // symbol = definition, e.g. k3 = exp(-c3)
};

struct LevelSolution {
    bool ok = false;
    Symbol coordinate;
    Expr value;
    std::vector<Symbol> alternatives;  // other coordinates F could be solved for
    std::vector<DerivedConstant> derived;
    std::vector<std::string> side_conditions;
    std::string failure;
};

/// Solves F = c for one jet coordinate of `chart`. Coordinates in which F is
/// affine come first, then the rest by decreasing order; the first one that
/// can be isolated wins.
LevelSolution solve_level_set(const Expr& F, const Symbol& c, const std::vector<Symbol>& chart,
                              const std::set<std::string>& reserved_names = {});

struct ReductionStep {
    int index = 0;
    Symbol constant;
    Form omega;                   // Ω_i pulled back to the current level set
    std::vector<Symbol> coords;   // coordinates of the level set
    ClosedVerdict closed;
    Potential potential;
    ZeroTestResult dx_check;      // D~x(F) on the level set
    ZeroTestResult dt_check;
    std::optional<LevelSolution> level;
    std::string failure;

    [[nodiscard]] bool first_integral() const { return dx_check.positive() && dt_check.positive(); }
};

enum class ChainStatus : unsigned char { Complete, Failed, Blocked };
const char* chain_status_name(ChainStatus s);

struct DescendOptions {
    std::set<std::string> reserved_names;  // names the new constants must avoid
};

struct ReductionChain {
    ChainStatus status = ChainStatus::Failed;
    VolumeForm volume;
    Expr delta;
    Expr integrating_factor;
    std::vector<ReductionStep> steps;  // i = N, ..., 1
    Substitution rules;                // coordinate -> Expr in (x, t, constants)
    std::vector<Symbol> constants;     // c_i and derived constants
    std::vector<DerivedConstant> derived;
    std::vector<std::string> side_conditions;
    std::map<int, Expr> solution;      // dependent index -> u^i(x, t, constants)
    std::string failure;

    [[nodiscard]] bool complete() const { return status == ChainStatus::Complete; }
};

/// Integrates Ω_N, solves its level set, pulls Ω_{N-1} back to it, and so on down
/// to Ω_1; the resolved rules for the order-zero jets form the solution family.
ReductionChain descend(const SolvableStructure& S, const RestrictedPair& pair, const VolumeForm& volume,
                       const DescendOptions& options = {});

struct ShortcutForm {
    int index = 0;
    Form omega;
    Potential potential;
};

struct ShortcutResult {
    bool all_closed = false;
    std::vector<ShortcutForm> forms;
    std::optional<ReductionChain> fallback;  // ordered descent when some Ω_i is not closed
};

/// Abelian case: every Ω_i = M β_i is integrated on its own.
ShortcutResult abelian_shortcut(const SolvableStructure& S, const RestrictedPair& pair, const VolumeForm& volume,
                                const DescendOptions& options = {});

}  // namespace jetsolve
