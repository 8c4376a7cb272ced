#pragma once

#include "jetsolve/expr.hpp"

#include <map>
#include <string>
#include <vector>

namespace jetsolve {

/// Vector field on a chart: coordinate -> coefficient, missing entries mean 0.
class VectorField {
public:
    using Components = std::map<Symbol, Expr, SymbolLess>;

    VectorField() = default;
    explicit VectorField(const Components& components);

    [[nodiscard]] const Components& components() const { return components_; }
    [[nodiscard]] Expr component(const Symbol& s) const;
    void set(const Symbol& s, const Expr& value);
    [[nodiscard]] bool is_zero() const { return components_.empty(); }

    /// Derivation X(f) = sum_s X^s df/ds.
    [[nodiscard]] Expr apply(const Expr& f) const;
    [[nodiscard]] VectorField scaled(const Expr& factor) const;
    [[nodiscard]] VectorField map(const std::function<Expr(const Expr&)>& fn) const;

    friend VectorField operator+(const VectorField& a, const VectorField& b);
    friend VectorField operator-(const VectorField& a, const VectorField& b);

private:
    Components components_;
};

/// `{ u = "u", u_x = "u_x" }`, coordinates in canonical order.
std::string to_string(const VectorField& X);

/// Plain-text rendering such as `u*d_u + u_x*d_u_x`.
std::string to_operator_string(const VectorField& X);

}  // namespace jetsolve
