#pragma once

#include "sburgers/config.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace sburgers {

/// Exit-code contract of the command-line tool.
enum ExitCode : int { kExitPass = 0, kExitError = 1, kExitFail = 2 };

struct CommandEnv {
    std::filesystem::path out_dir = ".";
    int workers = 0;  ///< 0 = available parallelism
};

struct CommandOutcome {
    bool pass = false;
    std::string summary;  ///< one line, printed after PASS/FAIL
    nlohmann::json metrics = nlohmann::json::object();
    std::vector<std::filesystem::path> outputs;
};

CommandOutcome cmd_simulate(const RunConfig& cfg, const CommandEnv& env);
CommandOutcome cmd_pullback(const RunConfig& cfg, const CommandEnv& env);
CommandOutcome cmd_contraction(const RunConfig& cfg, const CommandEnv& env);
CommandOutcome cmd_lyapunov(const RunConfig& cfg, const CommandEnv& env);
CommandOutcome cmd_moments(const RunConfig& cfg, const CommandEnv& env);
CommandOutcome cmd_condition_a(const RunConfig& cfg, const CommandEnv& env);
CommandOutcome cmd_oracle_check(const RunConfig& cfg, const CommandEnv& env);

/// Full command-line entry point: parses flags, resolves the config
/// (defaults, then preset, then config file, then --seed), runs the command,
/// writes <command>.json into the output directory and returns the exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace sburgers
