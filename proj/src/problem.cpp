#include "jetsolve/problem.hpp"

#include <charconv>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

namespace jetsolve {

ProblemError::ProblemError(const std::string& source, int line, int column, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

namespace {

struct Line {
    int number = 0;
    std::string text;
};

struct Value {
    std::string text;
    int column = 0;  // 1-based column of the first character of text
};

struct Entry {
    int line = 0;
    std::string key;
    int key_column = 1;
    std::optional<Value> scalar;
    std::vector<std::pair<std::string, Value>> map;  // inline map entries
    bool is_map = false;
};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

// Integer arithmetic over template variables: + - * and parentheses.
class IntExpr {
public:
    IntExpr(const std::string& text, const std::map<std::string, long>& vars) : s_(text), vars_(vars) {}

    std::optional<long> value() {
        auto v = sum();
        skip();
        if (!v || pos_ != s_.size()) return std::nullopt;
        return v;
    }

private:
    void skip() {
        while (pos_ < s_.size() && s_[pos_] == ' ') ++pos_;
    }
    std::optional<long> sum() {
        auto v = product();
        for (;;) {
            skip();
            if (!v || pos_ >= s_.size() || (s_[pos_] != '+' && s_[pos_] != '-')) return v;
            const char op = s_[pos_++];
            auto w = product();
            if (!w) return std::nullopt;
            v = op == '+' ? *v + *w : *v - *w;
        }
    }
    std::optional<long> product() {
        auto v = atom();
        for (;;) {
            skip();
            if (!v || pos_ >= s_.size() || s_[pos_] != '*') return v;
            ++pos_;
            auto w = atom();
            if (!w) return std::nullopt;
            v = *v * *w;
        }
    }
    std::optional<long> atom() {
        skip();
        if (pos_ >= s_.size()) return std::nullopt;
        if (s_[pos_] == '(') {
            ++pos_;
            auto v = sum();
            skip();
            if (pos_ >= s_.size() || s_[pos_] != ')') return std::nullopt;
            ++pos_;
            return v;
        }
        if (s_[pos_] == '-') {
            ++pos_;
            auto v = atom();
            return v ? std::optional<long>(-*v) : std::nullopt;
        }
        if (std::isdigit(static_cast<unsigned char>(s_[pos_])) != 0) {
            long v = 0;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])) != 0)
                v = v * 10 + (s_[pos_++] - '0');
            return v;
        }
        std::string name;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) != 0 || s_[pos_] == '_'))
            name += s_[pos_++];
        auto it = vars_.find(name);
        if (it == vars_.end()) return std::nullopt;
        return it->second;
    }

    std::string s_;
    const std::map<std::string, long>& vars_;
    std::size_t pos_ = 0;
};

class Reader {
public:
    Reader(std::string source, const std::string& text, const std::map<std::string, long>& overrides)
        : source_(std::move(source)) {
        std::stringstream ss(text);
        std::string raw;
        int n = 0;
        while (std::getline(ss, raw)) lines_.push_back(Line{++n, strip_comment(raw)});
        read_template(overrides);
        expand();
    }

    [[noreturn]] void fail(int line, int column, const std::string& msg) const {
        throw ProblemError(source_, line, column, msg);
    }

    const std::string& source() const { return source_; }

    // Entries grouped by section, in file order.
    std::map<std::string, std::vector<Entry>> sections() const {
        std::map<std::string, std::vector<Entry>> out;
        std::string current;
        for (const auto& l : expanded_) {
            const std::string t = trim(l.text);
            if (t.empty()) continue;
            if (t.front() == '[') {
                if (t.back() != ']') fail(l.number, 1, "unterminated section header");
                current = trim(t.substr(1, t.size() - 2));
                static const std::set<std::string> known{"variables", "evolution", "constraints", "symmetries",
                                                         "options", "template"};
                if (known.count(current) == 0) fail(l.number, 1, "unknown section [" + current + "]");
                out[current];
                continue;
            }
            if (current.empty()) fail(l.number, 1, "entry outside of a section");
            out[current].push_back(entry(l));
        }
        return out;
    }

private:
    void read_template(const std::map<std::string, long>& overrides) {
        bool inside = false;
        for (const auto& l : lines_) {
            const std::string t = trim(l.text);
            if (t.empty()) continue;
            if (t.front() == '[') {
                inside = t == "[template]";
                continue;
            }
            if (!inside) continue;
            const Entry e = entry(l);
            if (!e.scalar) fail(l.number, 1, "template values must be quoted integers");
            auto v = IntExpr(e.scalar->text, vars_).value();
            if (!v) fail(l.number, e.scalar->column, "not an integer: " + e.scalar->text);
            vars_[e.key] = *v;
        }
        for (const auto& [k, v] : overrides) {
            if (vars_.count(k) == 0) throw ProblemError(source_, 0, 0, "unknown template variable " + k);
            vars_[k] = v;
        }
    }

    std::string substitute_braces(const Line& l, const std::map<std::string, long>& vars) const {
        static const std::regex brace(R"(\{([A-Za-z0-9_+\-*() ]+)\})");
        std::string out;
        std::string rest = l.text;
        std::smatch m;
        while (std::regex_search(rest, m, brace)) {
            const std::string inner = trim(m[1].str());
            auto v = IntExpr(inner, vars).value();
            if (!v) fail(l.number, static_cast<int>(l.text.size() - rest.size() + m.position(0)) + 1,
                         "bad template expression {" + inner + "}");
            out += m.prefix().str() + std::to_string(*v);
            rest = m.suffix().str();
        }
        return out + rest;
    }

    void expand() {
        static const std::regex loop(R"(^(.*\S)\s+for\s+([A-Za-z_]\w*)\s*=\s*(.+)\.\.(.+)$)");
        bool in_template = false;
        for (const auto& l : lines_) {
            const std::string t = trim(l.text);
            if (!t.empty() && t.front() == '[') in_template = t == "[template]";
            if (in_template) continue;
            std::smatch m;
            if (std::regex_match(l.text, m, loop)) {
                auto lo = IntExpr(trim(m[3].str()), vars_).value();
                auto hi = IntExpr(trim(m[4].str()), vars_).value();
                if (!lo || !hi) fail(l.number, 1, "bad loop bounds");
                for (long k = *lo; k <= *hi; ++k) {
                    auto vars = vars_;
                    vars[m[2].str()] = k;
                    expanded_.push_back(Line{l.number, substitute_braces(Line{l.number, m[1].str()}, vars)});
                }
                continue;
            }
            expanded_.push_back(Line{l.number, substitute_braces(l, vars_)});
        }
    }

    Value quoted(const Line& l, std::size_t& i) const {
        if (i >= l.text.size() || l.text[i] != '"') fail(l.number, static_cast<int>(i) + 1, "expected a quoted value");
        const std::size_t close = l.text.find('"', i + 1);
        if (close == std::string::npos) fail(l.number, static_cast<int>(i) + 1, "unterminated string");
        Value v{l.text.substr(i + 1, close - i - 1), static_cast<int>(i) + 2};
        i = close + 1;
        return v;
    }

    static void skip_ws(const std::string& s, std::size_t& i) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    }

    std::string key(const Line& l, std::size_t& i) const {
        skip_ws(l.text, i);
        const std::size_t start = i;
        while (i < l.text.size() &&
               (std::isalnum(static_cast<unsigned char>(l.text[i])) != 0 || l.text[i] == '_' || l.text[i] == '@' ||
                l.text[i] == '.'))
            ++i;
        if (i == start) fail(l.number, static_cast<int>(i) + 1, "expected a key");
        return l.text.substr(start, i - start);
    }

    void expect(const Line& l, std::size_t& i, char c) const {
        skip_ws(l.text, i);
        if (i >= l.text.size() || l.text[i] != c)
            fail(l.number, static_cast<int>(i) + 1, std::string("expected '") + c + "'");
        ++i;
    }

    Entry entry(const Line& l) const {
        Entry e;
        e.line = l.number;
        std::size_t i = 0;
        skip_ws(l.text, i);
        e.key_column = static_cast<int>(i) + 1;
        e.key = key(l, i);
        expect(l, i, '=');
        skip_ws(l.text, i);
        if (i < l.text.size() && l.text[i] == '{') {
            e.is_map = true;
            ++i;
            skip_ws(l.text, i);
            if (i < l.text.size() && l.text[i] == '}') {
                ++i;
            } else {
                for (;;) {
                    std::string k = key(l, i);
                    expect(l, i, '=');
                    skip_ws(l.text, i);
                    e.map.emplace_back(k, quoted(l, i));
                    skip_ws(l.text, i);
                    if (i < l.text.size() && l.text[i] == ',') {
                        ++i;
                        continue;
                    }
                    expect(l, i, '}');
                    break;
                }
            }
        } else {
            e.scalar = quoted(l, i);
        }
        skip_ws(l.text, i);
        if (i != l.text.size()) fail(l.number, static_cast<int>(i) + 1, "trailing characters");
        return e;
    }

    std::string source_;
    std::vector<Line> lines_;
    std::vector<Line> expanded_;
    std::map<std::string, long> vars_;
};

Expr parse_at(const Reader& r, const SymbolTable& table, int line, const Value& v) {
    try {
        return parse(v.text, table);
    } catch (const ParseError& e) {
        std::string msg = e.what();
        const auto colon = msg.find(": ");
        if (msg.rfind("column ", 0) == 0 && colon != std::string::npos) msg = msg.substr(colon + 2);
        r.fail(line, v.column + static_cast<int>(e.position()), msg);
    }
}

Symbol resolve_at(const Reader& r, const SymbolTable& table, int line, int column, const std::string& name) {
    auto s = table.resolve(name);
    if (!s) r.fail(line, column, "unknown variable " + name);
    return *s;
}

template <typename T>
T number_at(const Reader& r, const Entry& e) {
    const std::string text = trim(e.scalar ? e.scalar->text : "");
    T v{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        r.fail(e.line, e.scalar ? e.scalar->column : 1, "not a number: " + text);
    return v;
}

const Value& scalar_of(const Reader& r, const Entry& e) {
    if (!e.scalar) r.fail(e.line, e.key_column, e.key + " needs a quoted value");
    return *e.scalar;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

Problem parse_problem(const std::string& text, const std::string& source, const std::map<std::string, long>& overrides) {
    Reader r(source, text, overrides);
    auto sections = r.sections();
    Problem p;
    p.source = source;

    // Variables.
    std::string xname = "x";
    std::string tname = "t";
    std::vector<std::string> dependents;
    std::vector<std::string> parameters;
    for (const auto& e : sections["variables"]) {
        const auto list = split_list(scalar_of(r, e).text);
        if (e.key == "independent") {
            if (list.size() != 2) r.fail(e.line, e.scalar->column, "independent needs two names (x, t)");
            xname = list[0];
            tname = list[1];
        } else if (e.key == "dependent") {
            dependents = list;
        } else if (e.key == "parameters") {
            parameters = list;
        } else {
            r.fail(e.line, e.key_column, "unknown variables key " + e.key);
        }
    }
    if (dependents.empty()) throw ProblemError(source, 0, 0, "no dependent variables declared");
    p.table = SymbolTable(xname, tname, dependents);
    for (const auto& name : parameters) p.table.add_parameter(name);

    // Evolution.
    p.evolution.assign(dependents.size(), Expr());
    std::vector<bool> seen(dependents.size(), false);
    for (const auto& e : sections["evolution"]) {
        auto idx = p.table.dependent_index(e.key);
        if (!idx) r.fail(e.line, e.key_column, "unknown dependent variable " + e.key);
        if (seen[static_cast<std::size_t>(*idx - 1)]) r.fail(e.line, e.key_column, "second equation for " + e.key);
        seen[static_cast<std::size_t>(*idx - 1)] = true;
        p.evolution[static_cast<std::size_t>(*idx - 1)] = parse_at(r, p.table, e.line, scalar_of(r, e));
    }
    for (std::size_t i = 0; i < dependents.size(); ++i)
        if (!seen[i]) throw ProblemError(source, 0, 0, "no evolution equation for " + dependents[i]);

    // Constraints.
    const auto& cons = sections["constraints"];
    if (cons.empty()) throw ProblemError(source, 0, 0, "no constraints declared");
    for (const auto& e : cons) {
        const Symbol jet = resolve_at(r, p.table, e.line, e.key_column, e.key);
        if (!jet.is_jet() || jet.order() < 1) r.fail(e.line, e.key_column, e.key + " is not an x-derivative");
        const Expr rhs = parse_at(r, p.table, e.line, scalar_of(r, e));
        try {
            p.constraints.add(jet.dependent(), jet.order(), rhs);
        } catch (const ConstraintError& err) {
            r.fail(e.line, e.key_column, err.what());
        }
    }
    try {
        p.constraints.validate(p.table);
    } catch (const ConstraintError& err) {
        r.fail(cons.front().line, cons.front().key_column, err.what());
    }

    // Symmetries.
    for (const auto& e : sections["symmetries"]) {
        if (!e.is_map) r.fail(e.line, e.key_column, "field " + e.key + " needs an inline map");
        FieldSpec f;
        f.name = e.key;
        for (const auto& [k, v] : e.map) {
            const Expr value = parse_at(r, p.table, e.line, v);
            if (!k.empty() && k.front() == '@') {
                auto idx = p.table.dependent_index(k.substr(1));
                if (!idx) r.fail(e.line, v.column, "unknown dependent variable " + k.substr(1));
                f.generators.emplace_back(*idx, value);
            } else {
                f.components.emplace_back(resolve_at(r, p.table, e.line, v.column, k), value);
            }
        }
        if (f.evolutionary() && !f.components.empty())
            r.fail(e.line, e.key_column, "field " + e.key + " mixes generators and components");
        p.symmetries.push_back(std::move(f));
    }

    // Options.
    for (const auto& e : sections["options"]) {
        const Value& v = scalar_of(r, e);
        if (e.key == "volume") {
            for (const auto& name : split_list(v.text)) p.volume.push_back(resolve_at(r, p.table, e.line, v.column, name));
        } else if (e.key == "truncation") {
            p.truncation = number_at<int>(r, e);
        } else if (e.key == "samples") {
            p.plan.count = number_at<int>(r, e);
        } else if (e.key == "seed") {
            p.plan.seed = number_at<std::uint64_t>(r, e);
        } else if (e.key == "tau_rel") {
            p.plan.tau_rel = number_at<double>(r, e);
        } else if (e.key == "tau_abs") {
            p.plan.tau_abs = number_at<double>(r, e);
        } else if (e.key.rfind("range.", 0) == 0) {
            const auto parts = split_list(v.text);
            if (parts.size() != 2) r.fail(e.line, v.column, "range needs two bounds");
            Range range;
            for (int k = 0; k < 2; ++k) {
                Entry tmp = e;
                tmp.scalar = Value{parts[static_cast<std::size_t>(k)], v.column};
                (k == 0 ? range.first : range.second) = number_at<double>(r, tmp);
            }
            const std::string target = e.key.substr(6);
            if (target == "independent")
                p.plan.independent = range;
            else if (target == "other")
                p.plan.other = range;
            else
                p.plan.ranges[target] = range;
        } else {
            r.fail(e.line, e.key_column, "unknown option " + e.key);
        }
    }
    return p;
}

Problem load_problem(const std::string& path, const std::map<std::string, long>& overrides) {
    std::ifstream in(path);
    if (!in) throw ProblemError(path, 0, 0, "cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_problem(ss.str(), path, overrides);
}

std::string print_problem(const Problem& p) {
    std::ostringstream os;
    auto join = [](const std::vector<std::string>& v) {
        std::string out;
        for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
        return out;
    };
    os << "[variables]\n";
    os << "independent = \"" << p.table.x().display() << ", " << p.table.t().display() << "\"\n";
    os << "dependent = \"" << join(p.table.dependents()) << "\"\n";
    std::vector<std::string> params;
    for (const auto& s : p.table.parameters()) params.push_back(s.display());
    if (!params.empty()) os << "parameters = \"" << join(params) << "\"\n";

    os << "\n[evolution]\n";
    for (std::size_t i = 0; i < p.evolution.size(); ++i)
        os << p.table.dependents()[i] << " = \"" << to_string(p.evolution[i]) << "\"\n";

    os << "\n[constraints]\n";
    for (const auto& c : p.constraints.items())
        os << p.table.jet(c.dependent, c.order).display() << " = \"" << to_string(c.rhs) << "\"\n";

    if (!p.symmetries.empty()) os << "\n[symmetries]\n";
    for (const auto& f : p.symmetries) {
        std::vector<std::string> items;
        for (const auto& [i, phi] : f.generators)
            items.push_back("@" + p.table.dependents()[static_cast<std::size_t>(i - 1)] + " = \"" + to_string(phi) + "\"");
        for (const auto& [s, v] : f.components) items.push_back(s.display() + " = \"" + to_string(v) + "\"");
        os << f.name << " = { " << join(items) << (items.empty() ? "}" : " }") << "\n";
    }

    os << "\n[options]\n";
    if (!p.volume.empty()) {
        std::vector<std::string> names;
        for (const auto& s : p.volume) names.push_back(s.display());
        os << "volume = \"" << join(names) << "\"\n";
    }
    if (p.truncation) os << "truncation = \"" << *p.truncation << "\"\n";
    os << "samples = \"" << p.plan.count << "\"\n";
    os << "seed = \"" << p.plan.seed << "\"\n";
    os << "tau_rel = \"" << format_double(p.plan.tau_rel) << "\"\n";
    os << "tau_abs = \"" << format_double(p.plan.tau_abs) << "\"\n";
    os << "range.independent = \"" << format_double(p.plan.independent.first) << ", "
       << format_double(p.plan.independent.second) << "\"\n";
    os << "range.other = \"" << format_double(p.plan.other.first) << ", " << format_double(p.plan.other.second)
       << "\"\n";
    for (const auto& [name, r] : p.plan.ranges)
        os << "range." << name << " = \"" << format_double(r.first) << ", " << format_double(r.second) << "\"\n";
    return os.str();
}

bool structurally_equal(const Problem& a, const Problem& b) {
    if (a.table.x() != b.table.x() || a.table.t() != b.table.t()) return false;
    if (a.table.dependents() != b.table.dependents()) return false;
    if (a.table.parameters().size() != b.table.parameters().size()) return false;
    for (std::size_t i = 0; i < a.table.parameters().size(); ++i)
        if (a.table.parameters()[i] != b.table.parameters()[i]) return false;
    if (a.evolution != b.evolution) return false;
    const auto& ca = a.constraints.items();
    const auto& cb = b.constraints.items();
    if (ca.size() != cb.size()) return false;
    for (std::size_t i = 0; i < ca.size(); ++i)
        if (ca[i].dependent != cb[i].dependent || ca[i].order != cb[i].order || ca[i].rhs != cb[i].rhs) return false;
    if (a.symmetries.size() != b.symmetries.size()) return false;
    for (std::size_t i = 0; i < a.symmetries.size(); ++i) {
        const auto& fa = a.symmetries[i];
        const auto& fb = b.symmetries[i];
        if (fa.name != fb.name || fa.generators != fb.generators) return false;
        VectorField va;
        VectorField vb;
        for (const auto& [s, e] : fa.components) va.set(s, e);
        for (const auto& [s, e] : fb.components) vb.set(s, e);
        if (va.components() != vb.components()) return false;
    }
    if (a.volume != b.volume || a.truncation != b.truncation) return false;
    const auto& pa = a.plan;
    const auto& pb = b.plan;
    return pa.count == pb.count && pa.seed == pb.seed && pa.tau_rel == pb.tau_rel && pa.tau_abs == pb.tau_abs &&
           pa.independent == pb.independent && pa.other == pb.other && pa.ranges == pb.ranges;
}

Instance build_instance(const Problem& p, std::optional<int> truncation) {
    Instance inst;
    const EvolutionSystem probe(p.table, p.evolution);
    const int K = truncation ? *truncation
                             : (p.truncation ? *p.truncation : default_truncation(probe.order_bound(), p.constraints));
    inst.system = std::make_shared<EvolutionSystem>(p.table, p.evolution, K);
    inst.H.emplace(inst.system, p.constraints);
    inst.pair = restricted_pair(*inst.H);
    for (const auto& f : p.symmetries) {
        inst.structure.names.push_back(f.name);
        if (f.evolutionary()) {
            std::vector<Expr> phi(static_cast<std::size_t>(p.table.dependent_count()));
            for (const auto& [i, e] : f.generators) phi[static_cast<std::size_t>(i - 1)] = e;
            inst.structure.fields.push_back(prolong_vertical_field(phi, *inst.H));
        } else {
            VectorField X;
            for (const auto& [s, e] : f.components) X.set(s, e);
            inst.structure.fields.push_back(X);
        }
    }
    if (!p.volume.empty()) {
        inst.volume = VolumeForm(p.volume);
    } else {
        std::vector<Symbol> vol{inst.system->t(), inst.system->x()};
        const auto& chart = inst.H->chart();
        vol.insert(vol.end(), chart.begin() + 2, chart.end());
        inst.volume = VolumeForm(vol);
    }
    return inst;
}

}  // namespace jetsolve
