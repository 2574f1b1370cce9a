#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "nulldist/config.hpp"

namespace nulldist {

enum ExitCode : int { kExitOk = 0, kExitInvalid = 2, kExitNumerical = 3, kExitViolation = 4 };

struct ScenarioConfig {
  std::string command;  // estimate | encode | witness | probe | catalog-list
  ConfigFile file;
  std::uint64_t seed = 0;
  std::string out = "nulldist";  // report prefix; files are <out>_<command>.csv
  int threads = 1;
  bool check = false;
};

struct ScenarioOverrides {
  std::optional<std::uint64_t> seed;  // NULLDIST_SEED
  std::optional<std::string> out;
  std::optional<int> threads;
  bool check = false;
};

// Throws Error(Config) on validation failure.
ScenarioConfig make_scenario(const std::string& command, ConfigFile file, const ScenarioOverrides& ov = {});

// Exit code per ExitCode; diagnostics go to `err`, one-line summaries to `log`.
int run_scenario(const ScenarioConfig& cfg, std::ostream& log, std::ostream& err);

// Maps error codes to exit codes.
int exit_code_for(Errc e);

}  // namespace nulldist
