#include "jetsolve/symbol.hpp"

#include <cctype>
#include <stdexcept>

namespace jetsolve {

Symbol::Symbol(Data d) : data_(std::make_shared<const Data>(std::move(d))) {}

Symbol Symbol::independent_x(std::string name) {
    Data d;
    d.display = name;
    d.base = name;
    d.name = std::move(name);
    d.role = SymbolRole::IndependentX;
    return Symbol(std::move(d));
}

Symbol Symbol::independent_t(std::string name) {
    Data d;
    d.display = name;
    d.base = name;
    d.name = std::move(name);
    d.role = SymbolRole::IndependentT;
    return Symbol(std::move(d));
}

Symbol Symbol::jet(int dependent, int order, std::string base_name) {
    if (dependent < 1) throw std::invalid_argument("jet symbols use 1-based dependent indices");
    if (order < 0) throw std::invalid_argument("jet order must be non-negative");
    Data d;
    d.name = "u" + std::to_string(dependent) + "_" + std::to_string(order);
    d.display = jet_alias(base_name, order);
    d.base = std::move(base_name);
    d.role = SymbolRole::Jet;
    d.dependent = dependent;
    d.order = order;
    return Symbol(std::move(d));
}

Symbol Symbol::parameter(std::string name) {
    Data d;
    d.display = name;
    d.base = name;
    d.name = std::move(name);
    d.role = SymbolRole::Parameter;
    return Symbol(std::move(d));
}

Symbol Symbol::level_constant(std::string name) {
    Data d;
    d.display = name;
    d.base = name;
    d.name = std::move(name);
    d.role = SymbolRole::LevelConstant;
    return Symbol(std::move(d));
}

namespace {
const std::string& empty_string() {
    static const std::string empty;
    return empty;
}
}  // namespace

const std::string& Symbol::name() const { return data_ ? data_->name : empty_string(); }
const std::string& Symbol::display() const { return data_ ? data_->display : empty_string(); }
const std::string& Symbol::base_name() const { return data_ ? data_->base : empty_string(); }
SymbolRole Symbol::role() const { return data_ ? data_->role : SymbolRole::Parameter; }
int Symbol::dependent() const { return data_ ? data_->dependent : 0; }
int Symbol::order() const { return data_ ? data_->order : 0; }

Symbol Symbol::shifted(int by) const {
    if (!is_jet()) throw std::logic_error("only jet symbols can be shifted: " + name());
    return jet(dependent(), order() + by, base_name());
}

int natural_compare(const std::string& a, const std::string& b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (std::isdigit(static_cast<unsigned char>(a[i])) && std::isdigit(static_cast<unsigned char>(b[j]))) {
            std::size_t ie = i, je = j;
            while (ie < a.size() && std::isdigit(static_cast<unsigned char>(a[ie]))) ++ie;
            while (je < b.size() && std::isdigit(static_cast<unsigned char>(b[je]))) ++je;
            // Compare digit runs numerically without overflow: strip zeros, then length, then text.
            std::size_t is = i, js = j;
            while (is + 1 < ie && a[is] == '0') ++is;
            while (js + 1 < je && b[js] == '0') ++js;
            if (ie - is != je - js) return (ie - is) < (je - js) ? -1 : 1;
            if (int c = a.compare(is, ie - is, b, js, je - js); c != 0) return c < 0 ? -1 : 1;
            i = ie;
            j = je;
            continue;
        }
        if (a[i] != b[j]) return a[i] < b[j] ? -1 : 1;
        ++i;
        ++j;
    }
    if (i < a.size()) return 1;
    if (j < b.size()) return -1;
    return 0;
}

int compare(const Symbol& a, const Symbol& b) {
    if (a.role() != b.role()) return a.role() < b.role() ? -1 : 1;
    if (a.role() == SymbolRole::Jet) {
        if (a.dependent() != b.dependent()) return a.dependent() < b.dependent() ? -1 : 1;
        if (a.order() != b.order()) return a.order() < b.order() ? -1 : 1;
        return 0;
    }
    return natural_compare(a.name(), b.name());
}

bool operator==(const Symbol& a, const Symbol& b) {
    if (a.role() != b.role()) return false;
    if (a.is_jet()) return a.dependent() == b.dependent() && a.order() == b.order();
    return a.name() == b.name();
}

std::string jet_alias(const std::string& base, int order) {
    if (order == 0) return base;
    if (order <= 3) return base + "_" + std::string(static_cast<std::size_t>(order), 'x');
    return base + "_" + std::to_string(order);
}

SymbolTable::SymbolTable(std::string x_name, std::string t_name, std::vector<std::string> dependents) {
    set_independent(std::move(x_name), std::move(t_name));
    for (const auto& d : dependents) add_dependent(d);
}

void SymbolTable::set_independent(std::string x_name, std::string t_name) {
    if (x_name == t_name) throw std::invalid_argument("independent variables must differ");
    x_name_ = std::move(x_name);
    t_name_ = std::move(t_name);
}

int SymbolTable::add_dependent(const std::string& name) {
    if (has_name(name)) throw std::invalid_argument("duplicate name: " + name);
    if (!name.empty() && std::isdigit(static_cast<unsigned char>(name.back())))
        throw std::invalid_argument("dependent variable names must not end in a digit: " + name);
    dependents_.push_back(name);
    return static_cast<int>(dependents_.size());
}

Symbol SymbolTable::add_parameter(const std::string& name) {
    if (auto existing = named_.find(name); existing != named_.end()) {
        if (existing->second.role() == SymbolRole::Parameter) return existing->second;
    }
    if (has_name(name)) throw std::invalid_argument("duplicate name: " + name);
    Symbol s = Symbol::parameter(name);
    named_.emplace(name, s);
    parameters_.push_back(s);
    return s;
}

Symbol SymbolTable::add_level_constant(const std::string& name) {
    if (auto existing = named_.find(name); existing != named_.end()) {
        if (existing->second.role() == SymbolRole::LevelConstant) return existing->second;
    }
    if (has_name(name)) throw std::invalid_argument("duplicate name: " + name);
    Symbol s = Symbol::level_constant(name);
    named_.emplace(name, s);
    return s;
}

Symbol SymbolTable::x() const { return Symbol::independent_x(x_name_); }
Symbol SymbolTable::t() const { return Symbol::independent_t(t_name_); }

Symbol SymbolTable::jet(int dependent, int order) const {
    if (dependent < 1 || dependent > dependent_count())
        throw std::out_of_range("dependent index out of range: " + std::to_string(dependent));
    return Symbol::jet(dependent, order, dependents_[static_cast<std::size_t>(dependent - 1)]);
}

std::optional<int> SymbolTable::dependent_index(const std::string& name) const {
    for (std::size_t i = 0; i < dependents_.size(); ++i)
        if (dependents_[i] == name) return static_cast<int>(i + 1);
    return std::nullopt;
}

bool SymbolTable::has_name(const std::string& name) const {
    return name == x_name_ || name == t_name_ || dependent_index(name).has_value() || named_.count(name) != 0;
}

std::optional<Symbol> SymbolTable::resolve(const std::string& name) const {
    if (name == x_name_) return x();
    if (name == t_name_) return t();
    if (auto it = named_.find(name); it != named_.end()) return it->second;
    if (auto i = dependent_index(name)) return jet(*i, 0);

    const auto underscore = name.rfind('_');
    if (underscore == std::string::npos || underscore + 1 >= name.size()) return std::nullopt;
    const std::string head = name.substr(0, underscore);
    const std::string tail = name.substr(underscore + 1);

    // u_x, u_xx, ... : a run of the x-variable's name.
    if (!x_name_.empty() && tail.size() % x_name_.size() == 0) {
        bool all_x = true;
        for (std::size_t p = 0; p < tail.size(); p += x_name_.size())
            if (tail.compare(p, x_name_.size(), x_name_) != 0) all_x = false;
        if (all_x) {
            if (auto i = dependent_index(head)) return jet(*i, static_cast<int>(tail.size() / x_name_.size()));
        }
    }
    bool digits = true;
    for (char c : tail)
        if (!std::isdigit(static_cast<unsigned char>(c))) digits = false;
    if (!digits || tail.size() > 6) return std::nullopt;
    const int order = std::stoi(tail);
    // u_4 (alias) or u1_4 (canonical).
    if (auto i = dependent_index(head)) return jet(*i, order);
    if (head.size() >= 2 && head[0] == 'u') {
        bool idx_digits = true;
        for (std::size_t p = 1; p < head.size(); ++p)
            if (!std::isdigit(static_cast<unsigned char>(head[p]))) idx_digits = false;
        if (idx_digits) {
            const int dep = std::stoi(head.substr(1));
            if (dep >= 1 && dep <= dependent_count()) return jet(dep, order);
        }
    }
    return std::nullopt;
}

}  // namespace jetsolve
