#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace jetsolve {

/// Role of a symbol; the enumerator order is the canonical sort order of symbols.
enum class SymbolRole : unsigned char {
    Parameter,
    LevelConstant,
    IndependentX,
    IndependentT,
    Jet,
};

/// A named coordinate or constant. Jet symbols `u^i_r` carry a 1-based dependent
/// index i and an x-order r; their canonical name is `u<i>_<r>` and `display()`
/// returns the surface alias (`u`, `u_x`, `u_xx`, `u_xxx`, `u_4`, ...).
class Symbol {
public:
    Symbol() = default;

    static Symbol independent_x(std::string name);
    static Symbol independent_t(std::string name);
    static Symbol jet(int dependent, int order, std::string base_name);
    static Symbol parameter(std::string name);
    static Symbol level_constant(std::string name);

    [[nodiscard]] const std::string& name() const;
    [[nodiscard]] const std::string& display() const;
    [[nodiscard]] SymbolRole role() const;
    [[nodiscard]] int dependent() const;
    [[nodiscard]] int order() const;
    [[nodiscard]] const std::string& base_name() const;
    [[nodiscard]] bool is_jet() const { return role() == SymbolRole::Jet; }

    /// Jet symbol of the same dependent variable with x-order shifted by `by`.
    [[nodiscard]] Symbol shifted(int by) const;

private:
    struct Data {
        std::string name;
        std::string display;
        std::string base;
        SymbolRole role = SymbolRole::Parameter;
        int dependent = 0;
        int order = 0;
    };
    std::shared_ptr<const Data> data_;

    explicit Symbol(Data d);
};

/// Total order: role, dependent index, x-order, then natural order of names.
int compare(const Symbol& a, const Symbol& b);
bool operator==(const Symbol& a, const Symbol& b);
inline bool operator!=(const Symbol& a, const Symbol& b) { return !(a == b); }
inline bool operator<(const Symbol& a, const Symbol& b) { return compare(a, b) < 0; }

/// Natural string comparison (digit runs compared numerically), so `c2 < c10`.
int natural_compare(const std::string& a, const std::string& b);

/// Alias for the x-derivative of order `order` of a dependent named `base`.
std::string jet_alias(const std::string& base, int order);

/// Name resolution for the expression grammar. Independent variables, dependent
/// variables (with jet aliases), parameters and level constants are registered here.
class SymbolTable {
public:
    SymbolTable() = default;
    SymbolTable(std::string x_name, std::string t_name, std::vector<std::string> dependents);

    void set_independent(std::string x_name, std::string t_name);
    int add_dependent(const std::string& name);
    Symbol add_parameter(const std::string& name);
    Symbol add_level_constant(const std::string& name);

    [[nodiscard]] Symbol x() const;
    [[nodiscard]] Symbol t() const;
    [[nodiscard]] Symbol jet(int dependent, int order) const;
    [[nodiscard]] int dependent_count() const { return static_cast<int>(dependents_.size()); }
    [[nodiscard]] const std::vector<std::string>& dependents() const { return dependents_; }
    [[nodiscard]] std::optional<int> dependent_index(const std::string& name) const;
    [[nodiscard]] const std::vector<Symbol>& parameters() const { return parameters_; }
    [[nodiscard]] bool has_name(const std::string& name) const;

    /// Resolves an identifier: x, t, jet aliases (`u`, `u_x`, `u_4`, `u1_2`),
    /// parameters and level constants.
    [[nodiscard]] std::optional<Symbol> resolve(const std::string& name) const;

private:
    std::string x_name_ = "x";
    std::string t_name_ = "t";
    std::vector<std::string> dependents_;
    std::vector<Symbol> parameters_;
    std::map<std::string, Symbol> named_;
};

}  // namespace jetsolve
