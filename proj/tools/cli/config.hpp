#pragma once

#include "floqsmat/loop.hpp"
#include "floqsmat/models.hpp"
#include "floqsmat/types.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace floqsmat::cli {

// Malformed or unknown configuration content; `where` is a dotted key path or "line:column".
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

enum class Task { floquet, transmit, sidebands, two_photon, slowmod, validate, figures };

struct LoopConfig {
  enum class Kind { ellipse, table, points };
  Kind kind = Kind::ellipse;
  std::vector<double> center, axis_a, axis_b, warp;
  std::vector<std::vector<double>> points;  // table samples or loop points
  std::vector<double> schedule;
  int n_points = ParameterLoop::kDefaultLoopPoints;
};

struct Trajectory {
  std::string name;
  LoopConfig loop;
};

struct ModelConfig {
  enum class Kind { kerr, jaynes_cummings, generic };
  Kind kind = Kind::kerr;
  int n_max = 2;
  double kappa = 1.0;
  double omega = 1.0;
  // kerr
  double chi = 0.0;
  double delta0 = 0.0;
  std::vector<double> table;
  // jaynes_cummings
  double omega_e = 0.0;
  double omega_c = 0.0;
  std::optional<cplx> g;
  std::vector<Trajectory> trajectories;
  // generic
  std::vector<int> dims;
  std::vector<std::vector<Matrix>> h_samples;
  std::vector<Matrix> l_blocks;
};

struct Numerics {
  int harmonic_cutoff = 32;
  int samples = 256;
  double ode_rtol = 1e-10;
  double ode_atol = 1e-12;
  double quadrature_tol = 1e-9;
  double condition_limit = 1e10;
  int k_initial = 4;
  int k_cap = 64;
  double boundary_tol = 1e-10;
};

struct Sweep {
  std::vector<double> nu;
  int k = 6;
  std::vector<double> delta;
  std::vector<int> sidebands{-1, 0, 1};
  double nu1 = 0.0;
  double nu2 = 0.0;
  std::vector<double> omegas{0.1, 0.05, 0.025};
  std::vector<int> photon_numbers{1};
};

struct ValidationTolerances {
  double oracle = 1e-3;
  double invariants = 1e-8;
  double geometric = 1e-6;
  double slope_n1 = 0.05;
  double slope_n2 = 0.10;
  bool slope = true;
};

struct FigureConfig {
  std::string recipe;
  std::map<std::string, std::string> inputs;  // label -> upstream file, relative to the output directory
};

struct RunConfig {
  Task task = Task::transmit;
  std::optional<ModelConfig> model;
  Numerics numerics;
  Sweep sweep;
  ValidationTolerances validation;
  FigureConfig figures;
  std::string output_dir = "out";
  bool write_meta = true;
  nlohmann::json source;  // parsed document as given
};

const char* task_name(Task t);

RunConfig parse_config(const nlohmann::json& doc);
// Reads and parses a file; syntax errors are reported with line and column.
RunConfig load_config(const std::string& path);

// Every numeric and sweep setting actually used, defaults included.
nlohmann::json resolved_numerics(const RunConfig& cfg);

ParameterLoop build_loop(const LoopConfig& loop, double period);
LadderSystem build_system(const ModelConfig& model);
// Parametric family for the slow-modulation tasks together with the trajectories over it.
ParametricFamily build_family(const ModelConfig& model);
std::vector<std::pair<std::string, ParameterLoop>> build_trajectories(const ModelConfig& model);

}  // namespace floqsmat::cli
