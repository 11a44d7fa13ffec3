#pragma once

#include "critdecay/config.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace critdecay {

enum ExitCode : int { exit_pass = 0, exit_operational = 1, exit_bound_violation = 2 };

struct RunOptions {
    std::optional<std::string> out;     ///< overrides output.dir
    std::optional<std::uint64_t> seed;  ///< random probes, default 0x5EED
    std::optional<double> tol;          ///< overrides dipole.tol
    int threads = 0;
};

bool is_command(const std::string& command);

/// Builds the report for `command` without touching the filesystem.
nlohmann::json build_report(const std::string& command, const RunConfig& config, const RunOptions& options = {});

/// Builds and writes report.json, CSV side files and timings.json; returns the exit code.
int run(const std::string& command, const RunConfig& config, const RunOptions& options = {});

} // namespace critdecay
