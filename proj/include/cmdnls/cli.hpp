#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cmdnls/io.hpp"

namespace cmdnls {

// Exit codes of the command-line runner.
inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

struct CheckResult {
  std::string name;
  std::string status;  // pass, fail or skipped
  std::optional<double> measured, tolerance;
  std::string detail;
};

// Report of one command: config echo, checks and artifact list. Wall time is
// kept out of it (written to timing.json) so reports are byte-identical.
struct ReportDocument {
  std::string command;
  json config;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  std::vector<std::string> artifacts;
  std::string error;

  bool failed() const;
  json to_json() const;
};

// `cmdnls <synth|evolve|growth|poles|check> --config <path> [--out <dir>] [--seed <u64>]`.
int run_cli(int argc, char** argv);

// Runs one command on an already parsed config (throws Error on bad configs).
ReportDocument run_command(const std::string& command, const json& config, const std::string& out_dir,
                           std::uint64_t seed);

}  // namespace cmdnls
