#pragma once

#include "flexbeam/run_config.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace flexbeam {

inline constexpr const char* kVersion = "0.1.0";

/// Process exit codes of the command-line front end.
enum ExitStatus : int {
    ExitOk = 0,
    ExitConstraint = 1,
    ExitParse = 2,  // also command-line usage errors
    ExitUncontrollable = 3,
    ExitIndeterminate = 4,
    ExitFailure = 5,  // numerical or I/O failure
};

struct SweepSpec {
    std::string param;  // e.g. "shaker.alpha0", "actuator[1].center"
    double from = 0.0;
    double to = 0.0;
    long steps = 0;  // 0: empty table; 1: just `from`
};

struct CommandResult {
    int exit_code = ExitOk;
    std::string summary;             // key = value text, also written to <command>_summary.txt
    std::vector<std::string> files;  // paths written
};

/// Runs one of validate, spectrum, modes, certify, simulate, sweep on an
/// effective config. Writes data files into cfg.output.directory.
/// Throws Error(InvalidArgument) for an unknown command or sweep parameter.
CommandResult run_command(std::string_view command, const RunConfig& cfg, const SweepSpec& sweep = {});

/// Sets a sweepable scalar by name. Throws Error(InvalidArgument) if unknown.
void set_parameter(RunConfig& cfg, std::string_view name, double value);

}  // namespace flexbeam
