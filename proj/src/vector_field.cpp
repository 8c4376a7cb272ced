#include "jetsolve/vector_field.hpp"

namespace jetsolve {

VectorField::VectorField(const Components& components) {
    for (const auto& [s, v] : components) set(s, v);
}

Expr VectorField::component(const Symbol& s) const {
    auto it = components_.find(s);
    return it == components_.end() ? Expr() : it->second;
}

void VectorField::set(const Symbol& s, const Expr& value) {
    if (value.is_zero())
        components_.erase(s);
    else
        components_[s] = value;
}

Expr VectorField::apply(const Expr& f) const {
    std::vector<Expr> terms;
    for (const auto& [s, v] : components_) {
        Expr d = diff(f, s);
        if (!d.is_zero()) terms.push_back(v * d);
    }
    return make_add(std::move(terms));
}

VectorField VectorField::scaled(const Expr& factor) const {
    VectorField out;
    for (const auto& [s, v] : components_) out.set(s, factor * v);
    return out;
}

VectorField VectorField::map(const std::function<Expr(const Expr&)>& fn) const {
    VectorField out;
    for (const auto& [s, v] : components_) out.set(s, fn(v));
    return out;
}

VectorField operator+(const VectorField& a, const VectorField& b) {
    VectorField out = a;
    for (const auto& [s, v] : b.components_) out.set(s, a.component(s) + v);
    return out;
}

VectorField operator-(const VectorField& a, const VectorField& b) {
    VectorField out = a;
    for (const auto& [s, v] : b.components_) out.set(s, a.component(s) - v);
    return out;
}

std::string to_string(const VectorField& X) {
    std::string out = "{";
    bool first = true;
    for (const auto& [s, v] : X.components()) {
        out += first ? " " : ", ";
        first = false;
        out += s.display() + " = \"" + to_string(v) + "\"";
    }
    return out + (first ? "}" : " }");
}

std::string to_operator_string(const VectorField& X) {
    if (X.is_zero()) return "0";
    std::string out;
    for (const auto& [s, v] : X.components()) {
        std::string c = to_string(v);
        std::string term;
        if (v.is_one())
            term = "d_" + s.display();
        else if (v.is_add())
            term = "(" + c + ")*d_" + s.display();
        else
            term = c + "*d_" + s.display();
        if (out.empty())
            out = term;
        else if (term[0] == '-')
            out += " - " + term.substr(1);
        else
            out += " + " + term;
    }
    return out;
}

}  // namespace jetsolve
