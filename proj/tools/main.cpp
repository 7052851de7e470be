#include "run.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Floquet scattering matrices of periodically modulated open systems"};
  floqsmat::cli::Options opts;
  std::string out_dir;
  app.add_option("-c,--config", opts.config_path, "Run configuration (JSON)")->required();
  app.add_option("-o,--output-dir", out_dir, "Output directory (overrides FLOQSMAT_OUTPUT_DIR and the config)");
  app.add_option("-j,--threads", opts.threads, "Worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_flag("-v,--verbose", opts.verbose, "Log progress to stderr");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : floqsmat::cli::schema_error;
  }
  if (!out_dir.empty()) opts.output_dir = out_dir;
  return floqsmat::cli::run(opts, std::cerr, std::cerr);
}
