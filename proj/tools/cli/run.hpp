#pragma once

#include <optional>
#include <ostream>
#include <string>

namespace floqsmat::cli {

enum ExitCode : int { ok = 0, schema_error = 2, numerical_error = 3, missing_input = 4 };

struct Options {
  std::string config_path;
  std::optional<std::string> output_dir;  // overrides FLOQSMAT_OUTPUT_DIR and the config
  int threads = 1;
  bool verbose = false;
};

// Runs the task named in the config. Diagnostics go to `err`, progress (when verbose) to `log`.
int run(const Options& opts, std::ostream& log, std::ostream& err);

}  // namespace floqsmat::cli
