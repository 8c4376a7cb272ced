#include "jetsolve/structure.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <unordered_map>

namespace jetsolve {

VectorField lie_bracket(const VectorField& X, const VectorField& Y) {
    SymbolSet coords;
    for (const auto& [s, v] : X.components()) coords.insert(s);
    for (const auto& [s, v] : Y.components()) coords.insert(s);
    VectorField out;
    for (const auto& s : coords) out.set(s, simplify(X.apply(Y.component(s)) - Y.apply(X.component(s))));
    return out;
}

Rnf determinant_rnf(const std::vector<std::vector<Rnf>>& rows) {
    const int n = static_cast<int>(rows.size());
    if (n == 0) return Rnf{Poly(Rational(1))};
    if (n > 30) throw std::invalid_argument("determinant too large");
    for (const auto& r : rows)
        if (static_cast<int>(r.size()) != n) throw std::invalid_argument("determinant of a non-square matrix");
    std::unordered_map<std::uint32_t, Rnf> memo;
    // Minor on rows [k, n) and the columns not in `used`, k = popcount(used).
    std::function<Rnf(std::uint32_t)> minor = [&](std::uint32_t used) -> Rnf {
        const int k = std::popcount(used);
        if (k == n) return Rnf{Poly(Rational(1))};
        if (auto it = memo.find(used); it != memo.end()) return it->second;
        Rnf acc{Poly()};
        int position = 0;
        for (int c = 0; c < n; ++c) {
            if (used & (1U << c)) continue;
            const Rnf& entry = rows[k][c];
            if (!entry.is_zero()) {
                Rnf term = rnf_mul(entry, minor(used | (1U << c)));
                acc = position % 2 == 0 ? rnf_add(acc, term) : rnf_sub(acc, term);
            }
            ++position;
        }
        memo.emplace(used, acc);
        return acc;
    };
    return minor(0);
}

Expr determinant(const std::vector<std::vector<Expr>>& rows) {
    std::vector<std::vector<Rnf>> m;
    m.reserve(rows.size());
    for (const auto& r : rows) {
        std::vector<Rnf> row;
        row.reserve(r.size());
        for (const auto& e : r) row.push_back(to_rnf(e));
        m.push_back(std::move(row));
    }
    return to_expr(determinant_rnf(m));
}

std::vector<Expr> component_row(const VectorField& X, const std::vector<Symbol>& coords) {
    std::vector<Expr> row;
    row.reserve(coords.size());
    for (const auto& s : coords) row.push_back(X.component(s));
    return row;
}

namespace {

MinorRecord minor_of(const std::vector<std::vector<Expr>>& rows, const std::vector<int>& columns) {
    std::vector<std::vector<Expr>> sub;
    for (const auto& r : rows) {
        std::vector<Expr> row;
        for (int c : columns) row.push_back(r[static_cast<std::size_t>(c)]);
        sub.push_back(std::move(row));
    }
    MinorRecord rec{columns, determinant(sub), {}};
    rec.verdict = zero_test(rec.value);
    return rec;
}

bool next_combination(std::vector<int>& comb, int n) {
    const int k = static_cast<int>(comb.size());
    for (int i = k - 1; i >= 0; --i) {
        if (comb[i] < n - k + i) {
            ++comb[i];
            for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
            return true;
        }
    }
    return false;
}

}  // namespace

SpanVerdict in_span(const VectorField& Z, const std::vector<VectorField>& gens, const std::vector<Symbol>& coords) {
    SpanVerdict out;
    const int n = static_cast<int>(coords.size());
    const int k = static_cast<int>(gens.size());
    if (Z.is_zero()) {
        out.in_span = true;
        out.note = "zero field";
        return out;
    }
    if (k >= n) {
        out.in_span = true;
        out.note = "generators span every direction";
        return out;
    }
    std::vector<std::vector<Expr>> rows;
    for (const auto& g : gens) rows.push_back(component_row(g, coords));

    std::vector<int> basis;
    if (k > 0) {
        std::vector<int> comb(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) comb[i] = i;
        bool undecided = false;
        do {
            MinorRecord rec = minor_of(rows, comb);
            if (rec.verdict.verdict == ZeroVerdict::Nonzero) {
                out.basis_minor = rec;
                basis = comb;
                break;
            }
            if (rec.verdict.verdict == ZeroVerdict::Indeterminate) undecided = true;
        } while (next_combination(comb, n));
        if (basis.empty()) {
            out.indeterminate = true;
            out.note = undecided ? "generator minors indeterminate" : "generators are pointwise dependent";
            return out;
        }
    }

    rows.push_back(component_row(Z, coords));
    out.in_span = true;
    for (int c = 0; c < n; ++c) {
        if (std::find(basis.begin(), basis.end(), c) != basis.end()) continue;
        std::vector<int> cols = basis;
        cols.insert(std::upper_bound(cols.begin(), cols.end(), c), c);
        MinorRecord rec = minor_of(rows, cols);
        out.minors.push_back(rec);
        if (rec.verdict.verdict == ZeroVerdict::Nonzero) {
            out.in_span = false;
            out.witness = rec;
            return out;
        }
        if (rec.verdict.verdict == ZeroVerdict::Indeterminate) {
            out.in_span = false;
            out.indeterminate = true;
            out.note = "indeterminate minor";
            out.witness = rec;
            return out;
        }
    }
    return out;
}

std::vector<std::vector<Expr>> frame_rows(const SolvableStructure& S, const RestrictedPair& pair,
                                          const std::vector<Symbol>& volume) {
    std::vector<std::vector<Expr>> rows;
    for (const auto& X : S.fields) rows.push_back(component_row(X, volume));
    rows.push_back(component_row(pair.Dx, volume));
    rows.push_back(component_row(pair.Dt, volume));
    return rows;
}

StructureCertificate verify_solvable_structure(const SolvableStructure& S, const RestrictedPair& pair,
                                               const std::vector<Symbol>& volume) {
    StructureCertificate cert;
    const int N = static_cast<int>(S.fields.size());
    cert.length_ok = N + 2 == static_cast<int>(volume.size());
    if (!cert.length_ok)
        cert.notes.push_back("structure has " + std::to_string(N) + " fields; the chart needs " +
                             std::to_string(static_cast<int>(volume.size()) - 2));

    auto name = [&](int i) { return i < static_cast<int>(S.names.size()) ? S.names[i] : "X" + std::to_string(i + 1); };
    for (int h = 0; h < N && !cert.failure; ++h) {
        std::vector<VectorField> span{pair.Dx, pair.Dt};
        for (int j = 0; j < h; ++j) span.push_back(S.fields[j]);
        std::vector<std::pair<std::string, VectorField>> partners{{"Dx", pair.Dx}, {"Dt", pair.Dt}};
        for (int j = 0; j < h; ++j) partners.emplace_back(name(j), S.fields[j]);
        for (const auto& [pname, P] : partners) {
            BracketCheck check{"[" + name(h) + ", " + pname + "]", h + 1, lie_bracket(S.fields[h], P), {}};
            check.span = in_span(check.bracket, span, volume);
            cert.checks.push_back(check);
            if (!check.span.in_span) {
                cert.failure = check;
                break;
            }
        }
    }

    if (cert.length_ok) {
        cert.delta = determinant(frame_rows(S, pair, volume));
        cert.delta_verdict = zero_test(cert.delta);
        cert.nontrivial = cert.delta_verdict.verdict == ZeroVerdict::Nonzero;
        cert.excluded_locus = to_string(cert.delta) + " = 0";
        if (!cert.nontrivial) cert.notes.push_back("frame determinant vanishes identically");
    }
    cert.accepted = cert.length_ok && !cert.failure && cert.nontrivial;
    return cert;
}

AbelianReport is_abelian(const SolvableStructure& S, const RestrictedPair& pair, const std::vector<Symbol>& chart) {
    AbelianReport report;
    report.algebra_abelian = true;
    const auto& X = S.fields;
    for (std::size_t i = 0; i < X.size(); ++i)
        for (std::size_t j = i + 1; j < X.size(); ++j) {
            const VectorField b = lie_bracket(X[i], X[j]);
            bool zero = true;
            for (const auto& [s, v] : b.components()) zero = zero && zero_test(v).positive();
            report.algebra_abelian = report.algebra_abelian && zero;
        }
    const std::vector<VectorField> pair_span{pair.Dx, pair.Dt};
    for (const auto& Xh : X) {
        const bool ok = in_span(lie_bracket(Xh, pair.Dx), pair_span, chart).in_span &&
                        in_span(lie_bracket(Xh, pair.Dt), pair_span, chart).in_span;
        report.commutes_with_pair.push_back(ok);
    }
    report.abelian = report.algebra_abelian;
    for (bool b : report.commutes_with_pair) report.abelian = report.abelian && b;
    return report;
}

}  // namespace jetsolve
