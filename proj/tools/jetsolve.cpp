#include "jetsolve/pipeline.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace jetsolve;

namespace {

std::map<std::string, long> parse_sets(const std::vector<std::string>& sets) {
    std::map<std::string, long> out;
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw std::invalid_argument("--set expects name=value, got " + s);
        out[s.substr(0, eq)] = std::stol(s.substr(eq + 1));
    }
    return out;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Integrate evolution equations on invariant submanifolds by quadratures"};
    app.set_version_flag("--version", "jetsolve 1.0");

    std::string command;
    std::string problem_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> samples;
    std::optional<int> truncation;
    std::string report_path;
    std::string chain_path;
    std::vector<std::string> sets;
    bool numeric_only = false;
    bool machine = false;

    app.add_option("command", command, "check-constraint, check-structure, reduce, verify or all")->required();
    app.add_option("problem", problem_path, "problem file")->required()->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "sampling seed");
    app.add_option("--samples", samples, "number of sample points")->check(CLI::PositiveNumber);
    app.add_option("--truncation", truncation, "jet order K")->check(CLI::PositiveNumber);
    app.add_option("--report", report_path, "write the machine-readable report here");
    app.add_option("--chain", chain_path, "reduce report holding the solution (verify)")->check(CLI::ExistingFile);
    app.add_option("--set", sets, "template value, e.g. --set n=5");
    app.add_flag("--numeric-only", numeric_only, "decide zero tests by sampling only");
    app.add_flag("--machine", machine, "print the machine-readable report instead of the summary");

    CLI11_PARSE(app, argc, argv);

    const auto cmd = parse_command(command);
    if (!cmd) {
        std::cerr << "unknown command " << command << "\n";
        return InputError;
    }
    if (numeric_only) {
        ZeroTestOptions z = default_zero_test_options();
        z.numeric_only = true;
        set_default_zero_test_options(z);
    }

    Problem problem;
    RunOptions options{truncation, seed, samples, {}};
    try {
        problem = load_problem(problem_path, parse_sets(sets));
        if (*cmd == Command::Verify) {
            if (chain_path.empty()) throw std::invalid_argument("verify needs --chain <reduce report>");
            options.chain_text = slurp(chain_path);
        }
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return InputError;
    }

    Report report;
    try {
        report = run(*cmd, problem, options);
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return InputError;
    } catch (const std::exception& e) {
        std::cerr << "internal limitation: " << e.what() << "\n";
        return InternalLimitation;
    }

    const std::string text = machine_text(report);
    if (!report_path.empty()) {
        std::ofstream out(report_path);
        if (!out) {
            std::cerr << "cannot write " << report_path << "\n";
            return InputError;
        }
        out << text;
    }
    std::cout << (machine ? text : human_text(report));
    if (report.exit_code != Success) std::cerr << report.failure << "\n";
    return report.exit_code;
}
