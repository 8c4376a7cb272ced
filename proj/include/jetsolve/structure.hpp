#pragma once

#include "jetsolve/constraint.hpp"
#include "jetsolve/vector_field.hpp"

#include <optional>
#include <string>
#include <vector>

namespace jetsolve {

/// Componentwise X(Y^k) - Y(X^k), each component in rational normal form.
VectorField lie_bracket(const VectorField& X, const VectorField& Y);

/// Determinant of a square matrix by Laplace expansion with memoized minors,
/// carried out in the rational normal form.
Expr determinant(const std::vector<std::vector<Expr>>& rows);
Rnf determinant_rnf(const std::vector<std::vector<Rnf>>& rows);

/// Components of X in the given coordinate order.
std::vector<Expr> component_row(const VectorField& X, const std::vector<Symbol>& coords);

struct MinorRecord {
    std::vector<int> columns;
    Expr value;
    ZeroTestResult verdict;
};

struct SpanVerdict {
    bool in_span = false;
    bool indeterminate = false;
    std::optional<MinorRecord> basis_minor;  // nonzero k x k minor of the generators
    std::vector<MinorRecord> minors;         // (k+1) x (k+1) minors tested
    std::optional<MinorRecord> witness;      // first nonvanishing one
    std::string note;
};

/// Z lies in the module spanned by gens (function coefficients) iff every
/// (k+1) x (k+1) minor of [gens | Z] vanishes. With a k x k minor of gens that is
/// nonzero on an open dense set, the minors bordering it decide the question.
SpanVerdict in_span(const VectorField& Z, const std::vector<VectorField>& gens, const std::vector<Symbol>& coords);

struct SolvableStructure {
    std::vector<std::string> names;
    std::vector<VectorField> fields;
};

struct BracketCheck {
    std::string label;  // e.g. "[X3, Dx]"
    int h = 0;          // 1-based index of the field being checked
    VectorField bracket;
    SpanVerdict span;
};

struct StructureCertificate {
    bool accepted = false;
    bool length_ok = false;
    std::vector<BracketCheck> checks;
    std::optional<BracketCheck> failure;
    Expr delta;
    ZeroTestResult delta_verdict;
    bool nontrivial = false;
    std::string excluded_locus;  // "delta = 0"
    std::vector<std::string> notes;
};

/// Frame matrix rows (X_1, ..., X_N, D~x, D~t) in the coordinate order of `volume`.
std::vector<std::vector<Expr>> frame_rows(const SolvableStructure& S, const RestrictedPair& pair,
                                          const std::vector<Symbol>& volume);

StructureCertificate verify_solvable_structure(const SolvableStructure& S, const RestrictedPair& pair,
                                               const std::vector<Symbol>& volume);

struct AbelianReport {
    bool abelian = false;
    bool algebra_abelian = false;          // all [X_i, X_j] = 0
    std::vector<bool> commutes_with_pair;  // [X_h, D~x], [X_h, D~t] in span(D~x, D~t)
};

AbelianReport is_abelian(const SolvableStructure& S, const RestrictedPair& pair, const std::vector<Symbol>& chart);

}  // namespace jetsolve
