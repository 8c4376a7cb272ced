#pragma once

#include "jetsolve/forms.hpp"
#include "jetsolve/verifier.hpp"

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace jetsolve {

class ProblemError : public std::runtime_error {
public:
    ProblemError(const std::string& source, int line, int column, const std::string& message);
    [[nodiscard]] int line() const { return line_; }
    [[nodiscard]] int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// A named field of the symmetry list: explicit components, or evolutionary
/// generators (one per dependent) prolonged onto H when the problem is built.
struct FieldSpec {
    std::string name;
    std::vector<std::pair<Symbol, Expr>> components;
    std::vector<std::pair<int, Expr>> generators;  // dependent index -> φ

    [[nodiscard]] bool evolutionary() const { return !generators.empty(); }
};

struct Problem {
    std::string source;
    SymbolTable table;
    std::vector<Expr> evolution;  // one right-hand side per dependent
    ConstraintSet constraints;
    std::vector<FieldSpec> symmetries;
    std::vector<Symbol> volume;  // empty: t, x, then the chart jets
    std::optional<int> truncation;
    SamplePlan plan;
};

/// `[section]` headers, `key = "text"` entries, fields as `X1 = { x = "1" }`.
/// A `[template]` section declares integers usable as `{n - 1}` anywhere below and
/// in `... for k = 1..n` line repetitions; `overrides` replaces its values.
Problem parse_problem(const std::string& text, const std::string& source = "<input>",
                      const std::map<std::string, long>& overrides = {});
Problem load_problem(const std::string& path, const std::map<std::string, long>& overrides = {});

/// Expanded, canonical text; parse_problem(print_problem(p)) is structurally equal to p.
std::string print_problem(const Problem& p);
bool structurally_equal(const Problem& a, const Problem& b);

/// Everything the pipeline needs, built from a Problem.
struct Instance {
    std::shared_ptr<const EvolutionSystem> system;
    std::optional<Submanifold> H;
    RestrictedPair pair;
    SolvableStructure structure;
    VolumeForm volume;
};

Instance build_instance(const Problem& p, std::optional<int> truncation = std::nullopt);

}  // namespace jetsolve
