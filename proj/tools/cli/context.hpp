#pragma once

#include "config.hpp"

#include <json.hpp>

#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace floqsmat::cli {

// An upstream file a figure recipe depends on does not exist.
class MissingInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Context {
  RunConfig cfg;
  std::filesystem::path out_dir;
  std::string config_hash;
  int threads = 1;
  bool verbose = false;
  std::ostream* log = nullptr;

  void note(const std::string& msg) const;
  // Writes `contents` to out_dir / name plus a provenance sidecar name.meta.json.
  void emit(const std::string& name, const std::string& contents, nlohmann::json extra = nlohmann::json::object(),
            const std::vector<std::string>& warnings = {}) const;
};

void emit_figure_data(const Context& ctx);

}  // namespace floqsmat::cli
