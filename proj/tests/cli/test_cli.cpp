#include "run.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace floqsmat::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string err;
};

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "floqsmat_cli_test" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Result run_with(const fs::path& config, const fs::path& out) {
  Options o;
  o.config_path = config.string();
  o.output_dir = out.string();
  std::ostringstream log;
  std::ostringstream err;
  const int code = run(o, log, err);
  return {code, err.str()};
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("static cavity transmission is unity on resonance") {
  const auto dir = scratch("static");
  const auto r = run_with(fs::path(FLOQSMAT_CONFIG_DIR) / "static_cavity.json", dir);
  REQUIRE(r.code == ok);
  std::ifstream f(dir / "transmission.csv");
  std::string line;
  std::getline(f, line);
  CHECK(line.rfind("nu,T,S_k_re[", 0) == 0);
  bool seen = false;
  while (std::getline(f, line)) {
    if (line.rfind("0,", 0) == 0) {
      const double t = std::stod(line.substr(2));
      CHECK(std::abs(t - 1.0) <= 1e-6);
      seen = true;
    }
  }
  CHECK(seen);
  const auto meta = nlohmann::json::parse(slurp(dir / "transmission.csv.meta.json"));
  CHECK(meta.at("config_hash").get<std::string>().rfind("fnv1a:", 0) == 0);
  CHECK(meta.at("numerics").at("harmonic_cutoff") == 32);
  CHECK(meta.contains("library_version"));
}

TEST_CASE("rerunning a config reproduces its outputs byte for byte") {
  const auto a = scratch("rerun_a");
  const auto b = scratch("rerun_b");
  const auto cfg = fs::path(FLOQSMAT_CONFIG_DIR) / "fig3_two_photon.json";
  REQUIRE(run_with(cfg, a).code == ok);
  REQUIRE(run_with(cfg, b).code == ok);
  for (const char* f : {"two_photon_k-1.csv", "two_photon_k0.csv", "two_photon_k1.csv", "two_photon_k1.csv.meta.json"}) {
    CHECK(slurp(a / f) == slurp(b / f));
  }
  CHECK(slurp(a / "two_photon_k0.csv").rfind("delta,S1_re,S1_im,S2_re,S2_im,Sc_abs\n", 0) == 0);
}

TEST_CASE("schema violations exit with code 2 and name the key") {
  const auto dir = scratch("schema");
  auto r = run_with(write_config(dir, R"({"task": "transmit", "model": {"model": "kerr", "kapa": 1.0}})"), dir);
  CHECK(r.code == schema_error);
  CHECK(r.err.find("model.kapa") != std::string::npos);

  r = run_with(write_config(dir, R"({"task": "transmit", "model": {"model": "kerr"}, "numerics": {"samples": 100}})"), dir);
  CHECK(r.code == schema_error);
  CHECK(r.err.find("numerics.samples") != std::string::npos);

  r = run_with(write_config(dir, "{\"task\": \"transmit\",\n  \"model\": oops}"), dir);
  CHECK(r.code == schema_error);
  CHECK(r.err.find(":2:") != std::string::npos);

  r = run_with(write_config(dir, R"({"task": "dance", "model": {"model": "kerr"}})"), dir);
  CHECK(r.code == schema_error);
}

TEST_CASE("numerical failures exit with code 3") {
  const auto dir = scratch("numerical");
  const auto r = run_with(write_config(dir, R"({"task": "floquet",
      "model": {"model": "jaynes_cummings", "g": [0.25, 0.0], "n_max": 1},
      "numerics": {"condition_limit": 1e6}})"),
                          dir);
  CHECK(r.code == numerical_error);
  CHECK(r.err.find("floquet") != std::string::npos);
}

TEST_CASE("figure recipes need their upstream files") {
  const auto dir = scratch("figures");
  CHECK(run_with(fs::path(FLOQSMAT_CONFIG_DIR) / "figures_fig2a.json", dir).code == missing_input);
  REQUIRE(run_with(fs::path(FLOQSMAT_CONFIG_DIR) / "fig3_two_photon.json", dir / "fig3").code == ok);
  REQUIRE(run_with(fs::path(FLOQSMAT_CONFIG_DIR) / "figures_fig3.json", dir).code == ok);
  for (const char* f : {"fig3_k-1.csv", "fig3_k0.csv", "fig3_k1.csv"}) {
    CHECK(slurp(dir / f).rfind("delta,Sc_abs\n", 0) == 0);
  }
}

TEST_CASE("validation of the shipped coupling-loop config") {
  const auto dir = scratch("validate");
  const auto r = run_with(fs::path(FLOQSMAT_CONFIG_DIR) / "jc_slowmod_validate.json", dir);
  CHECK(r.code == ok);
  const auto report = nlohmann::json::parse(slurp(dir / "validation.json"));
  CHECK(report.at("pass") == true);
  bool found = false;
  for (const auto& c : report.at("checks")) {
    if (c.at("name").get<std::string>().rfind("geometric_invariance", 0) == 0) {
      CHECK(c.at("measured").get<double>() < 1e-6);
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("output directory precedence") {
  const auto dir = scratch("precedence");
  const auto cfg = write_config(dir, R"({"task": "transmit", "model": {"model": "kerr"},
      "sweep": {"nu": [0.0]}, "output": {"dir": ")" + (dir / "from_config").string() + "\"}}");
  Options o;
  o.config_path = cfg.string();
  std::ostringstream sink;
  REQUIRE(run(o, sink, sink) == ok);
  CHECK(fs::exists(dir / "from_config" / "transmission.csv"));
  setenv("FLOQSMAT_OUTPUT_DIR", (dir / "from_env").string().c_str(), 1);
  REQUIRE(run(o, sink, sink) == ok);
  CHECK(fs::exists(dir / "from_env" / "transmission.csv"));
  o.output_dir = (dir / "from_flag").string();
  REQUIRE(run(o, sink, sink) == ok);
  CHECK(fs::exists(dir / "from_flag" / "transmission.csv"));
  unsetenv("FLOQSMAT_OUTPUT_DIR");
}
