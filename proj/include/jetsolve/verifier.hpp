#pragma once

#include "jetsolve/constraint.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace jetsolve {

using Range = std::pair<double, double>;

struct SamplePlan {
    int count = 100;
    Range independent{0.1, 3.0};  // x and t
    Range other{0.5, 2.0};        // parameters, level constants and jet coordinates
    std::map<std::string, Range> ranges;  // per-name overrides
    double tau_abs = 1e-9;
    double tau_rel = 1e-9;
    std::uint64_t seed = 0x5eed;
    int retry_factor = 50;  // at most count * retry_factor draws

    [[nodiscard]] Range range_for(const Symbol& s) const;
};

/// Draws `plan.count` points binding `symbols`, rejecting points where any of
/// `guards` fails to evaluate to a finite number.
std::vector<Point> sample_points(const SymbolSet& symbols, const std::vector<Expr>& guards, const SamplePlan& plan);

using Solution = std::map<int, Expr>;  // dependent index -> u^i(x, t, constants)

struct ResidualEntry {
    std::string label;
    Expr expr;                 // lhs - rhs before normalization
    ZeroTestResult symbolic;
    int samples = 0;
    double max_abs = 0;
    double max_rel = 0;        // |lhs - rhs| / max(1, |lhs| + |rhs|)
    double fd_max = 0;         // symbolic vs central-difference first derivatives
    bool pass = false;
    std::string note;
};

struct ResidualReport {
    bool pass = false;
    std::vector<ResidualEntry> entries;
};

/// u^i_t - f^i with every jet replaced by the x-derivatives of the solution.
ResidualReport residual(const Solution& sol, const EvolutionSystem& sys, const SamplePlan& plan);
/// u^i_{n_i} - g^i on the solution.
ResidualReport constraint_residual(const Solution& sol, const ConstraintSet& cons, const EvolutionSystem& sys,
                                   const SamplePlan& plan);

struct SpotReport {
    int samples = 0;
    double min_abs = 0;
    double max_abs = 0;
    bool zero = false;  // max_abs <= tau_abs
    std::string note;
};

/// Magnitudes of `identity` at fresh sample points.
SpotReport spot_check(const Expr& identity, const SamplePlan& plan);

}  // namespace jetsolve
