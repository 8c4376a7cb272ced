#include "jetsolve/forms.hpp"

#include <algorithm>

namespace jetsolve {

VolumeForm::VolumeForm(std::vector<Symbol> coords) : coords_(std::move(coords)) {
    for (std::size_t i = 0; i < coords_.size(); ++i)
        for (std::size_t j = i + 1; j < coords_.size(); ++j)
            if (coords_[i] == coords_[j]) throw std::invalid_argument("repeated coordinate " + coords_[i].display());
}

int VolumeForm::index(const Symbol& s) const {
    auto it = std::find(coords_.begin(), coords_.end(), s);
    return it == coords_.end() ? -1 : static_cast<int>(it - coords_.begin());
}

Form::Form(std::vector<Symbol> coords, int degree) : coords_(std::move(coords)), degree_(degree) {}

Expr Form::coefficient(const Index& idx) const {
    auto it = terms_.find(idx);
    return it == terms_.end() ? Expr() : it->second;
}

Expr Form::coefficient(const Symbol& s) const {
    auto it = std::find(coords_.begin(), coords_.end(), s);
    if (it == coords_.end()) return Expr();
    return coefficient(Index{static_cast<int>(it - coords_.begin())});
}

void Form::set(const Index& idx, const Expr& value) {
    if (static_cast<int>(idx.size()) != degree_) throw std::invalid_argument("form index of the wrong degree");
    if (value.is_zero())
        terms_.erase(idx);
    else
        terms_[idx] = value;
}

void Form::set(const Symbol& s, const Expr& value) {
    auto it = std::find(coords_.begin(), coords_.end(), s);
    if (it == coords_.end()) throw std::invalid_argument("coordinate " + s.display() + " not in the form's chart");
    set(Index{static_cast<int>(it - coords_.begin())}, value);
}

Expr Form::pair(const VectorField& X) const {
    if (degree_ != 1) throw std::invalid_argument("pairing needs a one-form");
    std::vector<Expr> terms;
    for (const auto& [idx, c] : terms_) terms.push_back(c * X.component(coords_[idx[0]]));
    return make_add(std::move(terms));
}

Form Form::map(const std::function<Expr(const Expr&)>& fn) const {
    Form out(coords_, degree_);
    for (const auto& [idx, c] : terms_) out.set(idx, fn(c));
    return out;
}

std::string to_string(const Form& f) {
    if (f.is_zero()) return "0";
    std::string out;
    for (const auto& [idx, c] : f.terms()) {
        std::string basis;
        for (std::size_t k = 0; k < idx.size(); ++k)
            basis += (k ? "^d" : "d") + f.coords()[static_cast<std::size_t>(idx[k])].display();
        std::string coef = to_string(c);
        std::string term;
        if (c.is_one())
            term = basis;
        else if (c.is_number() && c.number() == -1)
            term = "-" + basis;
        else if (c.is_add())
            term = "(" + coef + ")*" + basis;
        else
            term = coef + "*" + basis;
        if (out.empty())
            out = term;
        else if (term[0] == '-')
            out += " - " + term.substr(1);
        else
            out += " + " + term;
    }
    return out;
}

namespace {

// Inserts j into the increasing tuple idx; returns the sign of moving dξ_j from the
// front into place, or 0 if j already occurs.
int insert_sorted(Form::Index& idx, int j) {
    auto it = std::lower_bound(idx.begin(), idx.end(), j);
    if (it != idx.end() && *it == j) return 0;
    const auto before = it - idx.begin();
    idx.insert(it, j);
    return before % 2 == 0 ? 1 : -1;
}

}  // namespace

Form exterior_derivative(const Form& w) {
    std::map<Form::Index, Rnf> acc;
    for (const auto& [idx, c] : w.terms()) {
        for (int j = 0; j < static_cast<int>(w.coords().size()); ++j) {
            Expr d = diff(c, w.coords()[static_cast<std::size_t>(j)]);
            if (d.is_zero()) continue;
            Form::Index out = idx;
            const int sign = insert_sorted(out, j);
            if (sign == 0) continue;
            Rnf term = to_rnf(d);
            if (sign < 0) term.num = -term.num;
            auto it = acc.find(out);
            if (it == acc.end())
                acc.emplace(out, term);
            else
                it->second = rnf_add(it->second, term);
        }
    }
    Form out(w.coords(), w.degree() + 1);
    for (const auto& [idx, r] : acc) out.set(idx, to_expr(r));
    return out;
}

Form wedge(const Form& a, const Form& b) {
    if (a.coords() != b.coords()) throw std::invalid_argument("wedge of forms on different charts");
    std::map<Form::Index, Rnf> acc;
    for (const auto& [ia, ca] : a.terms()) {
        const Rnf ra = to_rnf(ca);
        for (const auto& [ib, cb] : b.terms()) {
            Form::Index out = ia;
            int sign = 1;
            // Move each dξ of b past the remaining tail of the merged tuple.
            bool vanished = false;
            for (int j : ib) {
                auto it = std::lower_bound(out.begin(), out.end(), j);
                if (it != out.end() && *it == j) {
                    vanished = true;
                    break;
                }
                const auto after = out.end() - it;
                if (after % 2 == 1) sign = -sign;
                out.insert(it, j);
            }
            if (vanished) continue;
            Rnf term = rnf_mul(ra, to_rnf(cb));
            if (sign < 0) term.num = -term.num;
            auto it = acc.find(out);
            if (it == acc.end())
                acc.emplace(out, term);
            else
                it->second = rnf_add(it->second, term);
        }
    }
    Form out(a.coords(), a.degree() + b.degree());
    for (const auto& [idx, r] : acc) out.set(idx, to_expr(r));
    return out;
}

ClosedVerdict closed_mod(const Form& omega, const std::vector<Form>& higher) {
    Form acc = exterior_derivative(omega);
    for (const auto& h : higher) acc = wedge(acc, h);
    ClosedVerdict out;
    out.degree = acc.degree();
    out.closed = true;
    for (const auto& [idx, c] : acc.terms()) {
        ++out.coefficients_tested;
        const ZeroTestResult z = zero_test(c);
        if (!z.positive()) {
            out.closed = false;
            out.indeterminate = z.verdict == ZeroVerdict::Indeterminate;
            out.witness = std::make_pair(idx, c);
            out.witness_verdict = z;
            break;
        }
    }
    return out;
}

FrameForms::FrameForms(const SolvableStructure& S, const RestrictedPair& pair, const VolumeForm& volume)
    : volume_(volume), n_fields_(static_cast<int>(S.fields.size())) {
    if (n_fields_ + 2 != volume.dim())
        throw std::invalid_argument("frame needs dim - 2 fields, got " + std::to_string(n_fields_));
    for (const auto& row : frame_rows(S, pair, volume.coords())) {
        std::vector<Rnf> r;
        for (const auto& e : row) r.push_back(to_rnf(e));
        rows_.push_back(std::move(r));
    }
    delta_rnf_ = determinant_rnf(rows_);
    delta_ = to_expr(delta_rnf_);
}

Expr FrameForms::integrating_factor() const {
    if (delta_rnf_.is_zero()) throw std::domain_error("frame determinant vanishes identically");
    return to_expr(rnf_div(Rnf{Poly(Rational(1))}, delta_rnf_));
}

Form FrameForms::beta(int i) const {
    if (i < 1 || i > n_fields_) throw std::out_of_range("beta index out of range");
    Form out(volume_.coords(), 1);
    const int r = volume_.dim();
    for (int j = 0; j < r; ++j) {
        auto rows = rows_;
        for (int c = 0; c < r; ++c) rows[i - 1][c] = Rnf{c == j ? Poly(Rational(1)) : Poly()};
        out.set(Form::Index{j}, to_expr(determinant_rnf(rows)));
    }
    return out;
}

Form FrameForms::omega(int i) const {
    const Form b = beta(i);
    Form out(volume_.coords(), 1);
    for (const auto& [idx, c] : b.terms()) out.set(idx, to_expr(rnf_div(to_rnf(c), delta_rnf_)));
    return out;
}

Expr denominator(const SolvableStructure& S, const RestrictedPair& pair, const VolumeForm& volume) {
    return FrameForms(S, pair, volume).delta();
}

Form beta(int i, const SolvableStructure& S, const RestrictedPair& pair, const VolumeForm& volume) {
    return FrameForms(S, pair, volume).beta(i);
}

}  // namespace jetsolve
