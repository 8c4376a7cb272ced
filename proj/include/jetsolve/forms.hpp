#pragma once

#include "jetsolve/structure.hpp"

#include <map>
#include <string>
#include <vector>

namespace jetsolve {

/// Ordered chart coordinates; Ω = dξ_1 ∧ ... ∧ dξ_r.
class VolumeForm {
public:
    VolumeForm() = default;
    explicit VolumeForm(std::vector<Symbol> coords);

    [[nodiscard]] const std::vector<Symbol>& coords() const { return coords_; }
    [[nodiscard]] int dim() const { return static_cast<int>(coords_.size()); }
    [[nodiscard]] int index(const Symbol& s) const;  // -1 when absent

private:
    std::vector<Symbol> coords_;
};

/// Differential form of fixed degree over a coordinate list: increasing index
/// tuples -> coefficient. Degree 1 is a OneForm, degree 2 a TwoForm.
class Form {
public:
    using Index = std::vector<int>;

    Form() = default;
    Form(std::vector<Symbol> coords, int degree);

    [[nodiscard]] const std::vector<Symbol>& coords() const { return coords_; }
    [[nodiscard]] int degree() const { return degree_; }
    [[nodiscard]] const std::map<Index, Expr>& terms() const { return terms_; }
    [[nodiscard]] Expr coefficient(const Index& idx) const;
    /// Coefficient of dξ for a one-form.
    [[nodiscard]] Expr coefficient(const Symbol& s) const;
    void set(const Index& idx, const Expr& value);
    void set(const Symbol& s, const Expr& value);
    [[nodiscard]] bool is_zero() const { return terms_.empty(); }

    /// ω(X) for a one-form.
    [[nodiscard]] Expr pair(const VectorField& X) const;
    [[nodiscard]] Form map(const std::function<Expr(const Expr&)>& fn) const;

private:
    std::vector<Symbol> coords_;
    int degree_ = 0;
    std::map<Index, Expr> terms_;
};

using OneForm = Form;
using TwoForm = Form;

/// `a*dx + b*du` / `c*dx^du`.
std::string to_string(const Form& f);

/// d of a k-form; coefficients in rational normal form.
Form exterior_derivative(const Form& w);
Form wedge(const Form& a, const Form& b);

struct ClosedVerdict {
    bool closed = false;
    bool indeterminate = false;
    int degree = 0;  // degree of the tested form
    int coefficients_tested = 0;
    std::optional<std::pair<Form::Index, Expr>> witness;
    ZeroTestResult witness_verdict;
};

/// dω ∧ ω_{i+1} ∧ ... ∧ ω_N = 0 coefficientwise; plain closedness when `higher` is empty.
ClosedVerdict closed_mod(const Form& omega, const std::vector<Form>& higher);

/// Frame data: rows (X_1..X_N, D~x, D~t) in volume order.
class FrameForms {
public:
    FrameForms(const SolvableStructure& S, const RestrictedPair& pair, const VolumeForm& volume);

    [[nodiscard]] const VolumeForm& volume() const { return volume_; }
    [[nodiscard]] int count() const { return n_fields_; }
    /// Δ = det(frame), in rational normal form.
    [[nodiscard]] const Expr& delta() const { return delta_; }
    /// M = 1/Δ.
    [[nodiscard]] Expr integrating_factor() const;
    /// Cofactor form: β_i(Y) = det(frame with row i replaced by Y), 1-based i.
    [[nodiscard]] Form beta(int i) const;
    /// Ω_i = M β_i, normalized.
    [[nodiscard]] Form omega(int i) const;

private:
    VolumeForm volume_;
    int n_fields_ = 0;
    std::vector<std::vector<Rnf>> rows_;
    Rnf delta_rnf_;
    Expr delta_;
};

Expr denominator(const SolvableStructure& S, const RestrictedPair& pair, const VolumeForm& volume);
Form beta(int i, const SolvableStructure& S, const RestrictedPair& pair, const VolumeForm& volume);

}  // namespace jetsolve
