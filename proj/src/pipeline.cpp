#include "jetsolve/pipeline.hpp"

#include <cstdio>
#include <sstream>

namespace jetsolve {

std::optional<Command> parse_command(const std::string& name) {
    if (name == "check-constraint") return Command::CheckConstraint;
    if (name == "check-structure") return Command::CheckStructure;
    if (name == "reduce") return Command::Reduce;
    if (name == "verify") return Command::Verify;
    if (name == "all") return Command::All;
    return std::nullopt;
}

std::optional<std::string> ReportBlock::get(const std::string& key) const {
    for (const auto& [k, v] : fields)
        if (k == key) return v;
    return std::nullopt;
}

const ReportBlock* Report::block(const std::string& stage) const {
    for (const auto& b : blocks)
        if (b.stage == stage) return &b;
    return nullptr;
}

namespace {

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

std::string flag(bool b) { return b ? "true" : "false"; }

std::string join(const std::vector<std::string>& v, const std::string& sep = ", ") {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : sep) + s;
    return out;
}

void fail(Report& r, int code, const std::string& why) {
    if (r.exit_code == Success) {
        r.exit_code = code;
        r.failure = why;
    }
}

SamplePlan plan_for(const Problem& p, const RunOptions& o) {
    SamplePlan plan = p.plan;
    if (o.seed) plan.seed = *o.seed;
    if (o.samples) plan.count = *o.samples;
    return plan;
}

bool check_constraint(Report& r, const Instance& inst, const SamplePlan& plan) {
    ReportBlock b{"constraint", {}};
    const CompatibilityReport c = check_compatibility(*inst.H);
    const char* verdict = c.compatible ? "compatible" : "incompatible";
    bool undecided = false;
    for (const auto& e : c.entries) undecided = undecided || e.verdict.verdict == ZeroVerdict::Indeterminate;
    if (!c.compatible && undecided) verdict = "undecided";
    b.add("verdict", verdict);
    b.add("chart_dim", std::to_string(inst.H->dim()));
    b.add("truncation", std::to_string(inst.system->truncation()));
    const auto& table = inst.system->table();
    for (const auto& e : c.entries) {
        const std::string key = "entry." + table.jet(e.dependent, 0).display() + ".r" + std::to_string(e.r);
        b.add(key + ".verdict", verdict_name(e.verdict.verdict));
        b.add(key + ".expr", to_string(e.expr));
        if (e.verdict.verdict == ZeroVerdict::ProbablyZero) {
            const SpotReport s = spot_check(e.expr, plan);
            b.add(key + ".spot_max_abs", sci(s.max_abs));
        }
    }
    for (const auto& e : c.cross_checks)
        b.add("cross." + table.jet(e.dependent, 0).display() + ".r" + std::to_string(e.r),
              verdict_name(e.verdict.verdict));
    bool commute = false;
    if (c.compatible) {
        const VectorField br = lie_bracket(inst.pair.Dx, inst.pair.Dt);
        commute = true;
        for (const auto& [s, comp] : br.components()) commute = commute && zero_test(comp).positive();
        b.add("commutator", commute ? "zero" : "nonzero");
    }
    for (const auto& n : c.notes) b.add("note", n);
    r.lines.push_back(std::string("constraint: ") + verdict + " (chart dimension " + std::to_string(inst.H->dim()) +
                      ")");
    for (const auto& e : c.entries)
        if (!e.verdict.positive())
            r.lines.push_back("  D_t L^" + std::to_string(e.dependent) + " restricted = " + to_string(e.expr));
    r.compatibility = c;
    r.blocks.push_back(std::move(b));
    if (!c.compatible) {
        fail(r, VerificationFailure, std::string("constraint: ") + verdict);
        return false;
    }
    if (!commute) {
        fail(r, VerificationFailure, "restricted total derivatives do not commute");
        return false;
    }
    return true;
}

bool check_structure(Report& r, const Instance& inst) {
    ReportBlock b{"structure", {}};
    const StructureCertificate cert = verify_solvable_structure(inst.structure, inst.pair, inst.volume.coords());
    b.add("verdict", cert.accepted ? "accepted" : "rejected");
    b.add("fields", std::to_string(inst.structure.fields.size()));
    b.add("length_ok", flag(cert.length_ok));
    std::vector<std::string> vol;
    for (const auto& s : inst.volume.coords()) vol.push_back(s.display());
    b.add("volume", join(vol));
    for (const auto& c : cert.checks) b.add("bracket." + c.label, to_operator_string(c.bracket));
    if (cert.failure) {
        b.add("failing", cert.failure->label);
        b.add("failing_bracket", to_operator_string(cert.failure->bracket));
        if (cert.failure->span.witness) b.add("witness_minor", to_string(cert.failure->span.witness->value));
    }
    b.add("delta", to_string(cert.delta));
    b.add("delta_verdict", verdict_name(cert.delta_verdict.verdict));
    b.add("nontrivial", flag(cert.nontrivial));
    if (cert.nontrivial) b.add("M", to_string(simplify(Expr(1) / cert.delta)));
    b.add("excluded_locus", cert.excluded_locus);
    for (const auto& n : cert.notes) b.add("note", n);
    if (cert.accepted) {
        const AbelianReport ab = is_abelian(inst.structure, inst.pair, inst.H->chart());
        b.add("abelian", flag(ab.abelian));
        b.add("algebra_abelian", flag(ab.algebra_abelian));
        std::vector<std::string> flags;
        for (bool f : ab.commutes_with_pair) flags.push_back(f ? "1" : "0");
        b.add("commutes_with_pair", join(flags, ","));
        r.abelian = ab;
    }
    if (cert.accepted) {
        r.lines.push_back("structure: accepted, Delta = " + to_string(cert.delta));
        if (cert.nontrivial) r.lines.push_back("  M = " + to_string(simplify(Expr(1) / cert.delta)));
    } else if (cert.failure) {
        r.lines.push_back("structure: rejected at " + cert.failure->label + " = " +
                          to_operator_string(cert.failure->bracket));
    } else {
        r.lines.push_back("structure: rejected (" + join(cert.notes, "; ") + ")");
    }
    r.structure = cert;
    r.blocks.push_back(std::move(b));
    if (!cert.accepted) {
        fail(r, VerificationFailure,
             "structure rejected" + (cert.failure ? " at " + cert.failure->label : std::string()));
        return false;
    }
    return true;
}

bool reduce(Report& r, const Problem& p, const Instance& inst) {
    ReportBlock b{"reduce", {}};
    DescendOptions opts;
    for (const auto& s : p.table.parameters()) opts.reserved_names.insert(s.name());
    for (const auto& d : p.table.dependents()) opts.reserved_names.insert(d);
    const ReductionChain chain = descend(inst.structure, inst.pair, inst.volume, opts);
    b.add("status", chain_status_name(chain.status));
    b.add("M", to_string(chain.integrating_factor));
    for (const auto& st : chain.steps) {
        const std::string i = std::to_string(st.index);
        b.add("omega" + i, to_string(st.omega));
        b.add("closed" + i, flag(st.closed.closed));
        b.add("potential" + i, potential_kind_name(st.potential.kind));
        if (st.potential.symbolic()) {
            b.add("F" + i, to_string(st.potential.F));
            b.add("first_integral" + i, flag(st.first_integral()));
        }
        if (st.level && st.level->ok) {
            b.add("rule" + i, st.level->coordinate.display() + " = " + to_string(st.level->value));
            std::vector<std::string> alts;
            for (const auto& s : st.level->alternatives) alts.push_back(s.display());
            if (!alts.empty()) b.add("alternatives" + i, join(alts));
        }
        if (!st.failure.empty()) b.add("failure" + i, st.failure);
        r.lines.push_back("F_" + i + " = " + (st.potential.symbolic() ? to_string(st.potential.F) : "(none)"));
        if (st.level && st.level->ok)
            r.lines.push_back("  on F_" + i + " = " + st.constant.display() + ": " + st.level->coordinate.display() +
                              " = " + to_string(st.level->value));
        if (!st.failure.empty()) r.lines.push_back("  " + st.failure);
    }
    std::vector<std::string> consts;
    for (const auto& c : chain.constants) consts.push_back(c.display());
    b.add("constants", join(consts));
    for (const auto& d : chain.derived) b.add("derived." + d.symbol.display(), to_string(d.definition));
    for (std::size_t k = 0; k < chain.side_conditions.size(); ++k)
        b.add("side." + std::to_string(k + 1), chain.side_conditions[k]);
    for (const auto& [i, e] : chain.solution) {
        const std::string name = p.table.jet(i, 0).display();
        b.add("solution." + name, to_string(e));
        r.lines.push_back("solution: " + name + " = " + to_string(e));
    }
    if (!chain.failure.empty()) b.add("failure", chain.failure);
    r.chain = chain;
    r.blocks.push_back(std::move(b));
    if (chain.status == ChainStatus::Blocked) {
        fail(r, InternalLimitation, "reduction blocked: " + chain.failure);
        return false;
    }
    if (chain.status == ChainStatus::Failed) {
        fail(r, VerificationFailure, "reduction failed: " + chain.failure);
        return false;
    }
    return true;
}

void add_residuals(ReportBlock& b, const std::string& prefix, const ResidualReport& rep, double& worst) {
    for (const auto& e : rep.entries) {
        const std::string key = prefix + "." + e.label.substr(0, e.label.find(' '));
        b.add(key + ".symbolic", verdict_name(e.symbolic.verdict));
        b.add(key + ".max_residual", sci(e.max_abs));
        b.add(key + ".max_rel", sci(e.max_rel));
        b.add(key + ".samples", std::to_string(e.samples));
        b.add(key + ".fd_agreement", sci(e.fd_max));
        if (!e.note.empty()) b.add(key + ".note", e.note);
        worst = std::max(worst, e.max_rel);
    }
}

bool verify(Report& r, const Problem& p, const Instance& inst, const Solution& sol, const SamplePlan& plan) {
    ReportBlock b{"verify", {}};
    const ResidualReport pde = residual(sol, *inst.system, plan);
    const ResidualReport cons = constraint_residual(sol, p.constraints, *inst.system, plan);
    const bool pass = pde.pass && cons.pass;
    b.add("verdict", pass ? "pass" : "fail");
    double worst = 0;
    add_residuals(b, "pde", pde, worst);
    add_residuals(b, "constraint", cons, worst);
    b.add("max_residual", sci(worst));
    b.add("tau_rel", sci(plan.tau_rel));
    b.add("seed", std::to_string(plan.seed));
    r.lines.push_back(std::string("verify: ") + (pass ? "pass" : "fail") + ", max relative residual " + sci(worst) +
                      " over " + std::to_string(plan.count) + " samples");
    for (const auto& e : pde.entries)
        r.lines.push_back("  " + e.label + ": symbolic " + verdict_name(e.symbolic.verdict) + ", max " + sci(e.max_rel));
    for (const auto& e : cons.entries)
        r.lines.push_back("  " + e.label + ": symbolic " + verdict_name(e.symbolic.verdict) + ", max " + sci(e.max_rel));
    r.pde = pde;
    r.constraint_check = cons;
    r.blocks.push_back(std::move(b));
    if (!pass) {
        fail(r, VerificationFailure, "residual check failed");
        return false;
    }
    return true;
}

}  // namespace

Solution read_chain(const std::string& text, SymbolTable& table) {
    std::stringstream ss(text);
    std::string line;
    std::vector<std::pair<std::string, std::string>> solutions;
    while (std::getline(ss, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "constants") {
            std::stringstream cs(value);
            std::string name;
            while (std::getline(cs, name, ',')) {
                name.erase(0, name.find_first_not_of(' '));
                name.erase(name.find_last_not_of(' ') + 1);
                if (!name.empty() && !table.has_name(name)) table.add_level_constant(name);
            }
        } else if (key.rfind("solution.", 0) == 0) {
            solutions.emplace_back(key.substr(9), value);
        }
    }
    Solution sol;
    for (const auto& [name, value] : solutions) {
        auto idx = table.dependent_index(name);
        if (!idx) throw std::invalid_argument("chain names unknown dependent " + name);
        sol[*idx] = parse(value, table);
    }
    if (sol.empty()) throw std::invalid_argument("chain contains no solution");
    return sol;
}

Report run(Command command, const Problem& problem, const RunOptions& options) {
    Report r;
    const Instance inst = build_instance(problem, options.truncation);
    const SamplePlan plan = plan_for(problem, options);
    switch (command) {
        case Command::CheckConstraint: check_constraint(r, inst, plan); break;
        case Command::CheckStructure: check_structure(r, inst); break;
        case Command::Reduce:
            if (check_constraint(r, inst, plan) && check_structure(r, inst)) reduce(r, problem, inst);
            break;
        case Command::Verify: {
            SymbolTable table = problem.table;
            const Solution sol = read_chain(options.chain_text, table);
            verify(r, problem, inst, sol, plan);
            break;
        }
        case Command::All:
            if (check_constraint(r, inst, plan) && check_structure(r, inst) && reduce(r, problem, inst))
                verify(r, problem, inst, r.chain->solution, plan);
            break;
    }
    return r;
}

std::string machine_text(const Report& report) {
    std::ostringstream os;
    for (const auto& b : report.blocks) {
        os << "[" << b.stage << "]\n";
        for (const auto& [k, v] : b.fields) os << k << "=" << v << "\n";
        os << "\n";
    }
    os << "[result]\nexit=" << report.exit_code << "\n";
    if (!report.failure.empty()) os << "failure=" << report.failure << "\n";
    return os.str();
}

std::string human_text(const Report& report) {
    std::string out;
    for (const auto& l : report.lines) out += l + "\n";
    if (!report.failure.empty()) out += "FAILED: " + report.failure + "\n";
    return out;
}

}  // namespace jetsolve
