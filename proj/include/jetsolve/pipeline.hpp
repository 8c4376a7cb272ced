#pragma once

#include "jetsolve/problem.hpp"
#include "jetsolve/quadrature.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace jetsolve {

enum class Command : unsigned char { CheckConstraint, CheckStructure, Reduce, Verify, All };
std::optional<Command> parse_command(const std::string& name);

enum ExitCode : int { Success = 0, VerificationFailure = 1, InputError = 2, InternalLimitation = 3 };

/// One flat key=value block per stage.
struct ReportBlock {
    std::string stage;
    std::vector<std::pair<std::string, std::string>> fields;

    void add(const std::string& key, const std::string& value) { fields.emplace_back(key, value); }
    [[nodiscard]] std::optional<std::string> get(const std::string& key) const;
};

struct RunOptions {
    std::optional<int> truncation;
    std::optional<std::uint64_t> seed;
    std::optional<int> samples;
    std::string chain_text;  // verify: contents of a reduce report
};

struct Report {
    int exit_code = Success;
    std::vector<ReportBlock> blocks;
    std::vector<std::string> lines;  // human-readable summary
    std::string failure;             // first failing certificate

    std::optional<CompatibilityReport> compatibility;
    std::optional<StructureCertificate> structure;
    std::optional<AbelianReport> abelian;
    std::optional<ReductionChain> chain;
    std::optional<ResidualReport> pde;
    std::optional<ResidualReport> constraint_check;

    [[nodiscard]] const ReportBlock* block(const std::string& stage) const;
};

Report run(Command command, const Problem& problem, const RunOptions& options = {});

std::string machine_text(const Report& report);
std::string human_text(const Report& report);

/// Solution family recorded in a reduce report (`constants=` and `solution.<u>=` keys).
Solution read_chain(const std::string& text, SymbolTable& table);

}  // namespace jetsolve
