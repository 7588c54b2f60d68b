#pragma once

#include <string>
#include <vector>

namespace eal::runner {

struct RunOptions {
  std::string config_path;  // may be empty for flag-driven classify
  std::string out_dir = ".";
  int workers = 0;

  // classify without a config file
  std::vector<std::string> functions;
  std::vector<std::string> classes;
};

// exit codes: 0 ok, 2 config error, 3 tolerance breach, 4 oracle mismatch
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitTolerance = 3;
inline constexpr int kExitOracle = 4;

int run_command(const std::string& command, const RunOptions& opts);

const char* version();

}  // namespace eal::runner
