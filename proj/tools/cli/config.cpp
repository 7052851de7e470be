#include "config.hpp"

#include "floqsmat/errors.hpp"
#include "floqsmat/smatrix.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace floqsmat::cli {

using nlohmann::json;

namespace {

std::string type_name(const json& j) { return j.type_name(); }

// View of one object in the document that remembers which keys were consumed.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw SchemaError(path_.empty() ? "<root>" : path_, "expected an object, got " + type_name(j_));
  }

  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const json& at(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) throw SchemaError(key_path(key), "required key is missing");
    return j_.at(key);
  }

  double number(const std::string& key, double fallback) { return has(key) ? number(key) : (used_.insert(key), fallback); }
  double number(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number()) throw SchemaError(key_path(key), "expected a number, got " + type_name(v));
    return v.get<double>();
  }

  int integer(const std::string& key, int fallback) {
    used_.insert(key);
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw SchemaError(key_path(key), "expected an integer, got " + type_name(v));
    return v.get<int>();
  }

  bool boolean(const std::string& key, bool fallback) {
    used_.insert(key);
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw SchemaError(key_path(key), "expected true or false, got " + type_name(v));
    return v.get<bool>();
  }

  std::string string(const std::string& key) {
    const json& v = at(key);
    if (!v.is_string()) throw SchemaError(key_path(key), "expected a string, got " + type_name(v));
    return v.get<std::string>();
  }

  // Rejects every key that no accessor asked for.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw SchemaError(key_path(it.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

std::vector<double> numbers(const json& v, const std::string& path) {
  if (!v.is_array()) throw SchemaError(path, "expected an array of numbers, got " + type_name(v));
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw SchemaError(path + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::vector<int> integers(const json& v, const std::string& path) {
  if (!v.is_array()) throw SchemaError(path, "expected an array of integers, got " + type_name(v));
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number_integer()) throw SchemaError(path + "[" + std::to_string(i) + "]", "expected an integer");
    out.push_back(v[i].get<int>());
  }
  return out;
}

std::vector<std::vector<double>> point_list(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw SchemaError(path, "expected a nonempty array of points");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    out.push_back(v[i].is_number() ? std::vector<double>{v[i].get<double>()} : numbers(v[i], p));
    if (out.back().size() != out.front().size()) throw SchemaError(p, "points differ in dimension");
  }
  return out;
}

// Either an explicit array or {min, max, points}.
std::vector<double> grid(const json& v, const std::string& path) {
  if (v.is_array()) {
    auto g = numbers(v, path);
    if (g.empty()) throw SchemaError(path, "grid is empty");
    return g;
  }
  Section s(v, path);
  const double lo = s.number("min");
  const double hi = s.number("max");
  const int n = s.integer("points", 0);
  s.finish();
  if (n < 1) throw SchemaError(path + ".points", "must be at least 1");
  if (n > 1 && !(hi > lo)) throw SchemaError(path, "max must exceed min");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return g;
}

cplx complex_entry(const json& v, const std::string& path) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  const auto pair = numbers(v, path);
  if (pair.size() != 2) throw SchemaError(path, "complex numbers are [re, im] pairs");
  return {pair[0], pair[1]};
}

// Row-major flat list of [re, im] entries.
Matrix complex_matrix(const json& v, int rows, int cols, const std::string& path) {
  if (!v.is_array() || v.size() != static_cast<std::size_t>(rows * cols)) {
    throw SchemaError(path, "expected " + std::to_string(rows * cols) + " complex entries (" + std::to_string(rows) +
                                "x" + std::to_string(cols) + " row-major)");
  }
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const std::size_t i = static_cast<std::size_t>(r * cols + c);
      m(r, c) = complex_entry(v[i], path + "[" + std::to_string(i) + "]");
    }
  }
  return m;
}

LoopConfig parse_loop(const json& v, const std::string& path) {
  Section s(v, path);
  LoopConfig loop;
  const std::string kind = s.string("kind");
  loop.n_points = s.integer("n_points", loop.n_points);
  if (loop.n_points < 8) throw SchemaError(s.key_path("n_points"), "must be at least 8");
  if (kind == "parametric") {
    if (s.has("table")) {
      loop.kind = LoopConfig::Kind::table;
      loop.points = point_list(s.at("table"), s.key_path("table"));
      if (loop.points.size() < 4) throw SchemaError(s.key_path("table"), "needs at least 4 samples");
    } else {
      loop.kind = LoopConfig::Kind::ellipse;
      const std::string shape = s.string("shape");
      if (shape != "ellipse") throw SchemaError(s.key_path("shape"), "supported shapes: ellipse");
      loop.center = numbers(s.at("center"), s.key_path("center"));
      loop.axis_a = numbers(s.at("axis_a"), s.key_path("axis_a"));
      loop.axis_b = numbers(s.at("axis_b"), s.key_path("axis_b"));
      if (s.has("warp")) loop.warp = numbers(s.at("warp"), s.key_path("warp"));
      if (loop.center.empty() || loop.axis_a.size() != loop.center.size() || loop.axis_b.size() != loop.center.size()) {
        throw SchemaError(path, "center, axis_a and axis_b must have the same nonzero dimension");
      }
    }
  } else if (kind == "points") {
    loop.kind = LoopConfig::Kind::points;
    loop.points = point_list(s.at("points"), s.key_path("points"));
    if (loop.points.size() < 4) throw SchemaError(s.key_path("points"), "needs at least 4 points");
    if (s.has("schedule")) loop.schedule = numbers(s.at("schedule"), s.key_path("schedule"));
  } else {
    throw SchemaError(s.key_path("kind"), "expected \"parametric\" or \"points\", got \"" + kind + "\"");
  }
  s.finish();
  return loop;
}

ModelConfig parse_model(const json& v) {
  Section s(v, "model");
  ModelConfig m;
  const std::string kind = s.string("model");
  m.n_max = s.integer("n_max", 2);
  if (m.n_max < 1) throw SchemaError("model.n_max", "must be at least 1");
  m.kappa = s.number("kappa", 1.0);
  m.omega = s.number("omega", 1.0);
  if (!(m.omega > 0.0)) throw SchemaError("model.omega", "must be positive");
  if (kind == "kerr") {
    m.kind = ModelConfig::Kind::kerr;
    m.chi = s.number("chi", 0.0);
    if (s.has("modulation")) {
      Section mod(s.at("modulation"), "model.modulation");
      const std::string mk = mod.string("kind");
      if (mk == "sin") {
        m.delta0 = mod.number("delta0", s.number("delta0", 0.0));
      } else if (mk == "table") {
        m.table = numbers(mod.at("samples"), "model.modulation.samples");
        if (m.table.size() < 4) throw SchemaError("model.modulation.samples", "needs at least 4 samples");
        if (s.has("delta0")) throw SchemaError("model.delta0", "not used with a tabulated modulation");
      } else {
        throw SchemaError("model.modulation.kind", "expected \"sin\" or \"table\", got \"" + mk + "\"");
      }
      mod.finish();
    } else {
      m.delta0 = s.number("delta0", 0.0);
    }
  } else if (kind == "jaynes_cummings") {
    m.kind = ModelConfig::Kind::jaynes_cummings;
    m.omega_e = s.number("omega_e", 0.0);
    m.omega_c = s.number("omega_c", 0.0);
    if (m.n_max > 2) throw SchemaError("model.n_max", "the Jaynes-Cummings ladder supports n_max <= 2");
    if (s.has("g")) m.g = complex_entry(s.at("g"), "model.g");
    if (s.has("loop")) m.trajectories.push_back({"loop", parse_loop(s.at("loop"), "model.loop")});
    if (s.has("trajectories")) {
      const json& t = s.at("trajectories");
      if (!t.is_array() || t.empty()) throw SchemaError("model.trajectories", "expected a nonempty array");
      for (std::size_t i = 0; i < t.size(); ++i) {
        const std::string p = "model.trajectories[" + std::to_string(i) + "]";
        Section ts(t[i], p);
        Trajectory tr;
        tr.name = ts.string("name");
        tr.loop = parse_loop(ts.at("loop"), p + ".loop");
        ts.finish();
        for (const auto& other : m.trajectories) {
          if (other.name == tr.name) throw SchemaError(p + ".name", "duplicate trajectory name");
        }
        m.trajectories.push_back(std::move(tr));
      }
    }
    if (m.g && !m.trajectories.empty()) throw SchemaError("model.g", "give either a static g or coupling loops");
    if (!m.g && m.trajectories.empty()) throw SchemaError("model", "needs g, loop or trajectories");
    for (const auto& tr : m.trajectories) {
      const std::size_t d = tr.loop.kind == LoopConfig::Kind::ellipse ? tr.loop.center.size() : tr.loop.points[0].size();
      if (d != 2) throw SchemaError("model", "coupling loops live in the (Re g, Im g) plane");
    }
  } else if (kind == "generic") {
    m.kind = ModelConfig::Kind::generic;
    m.dims = integers(s.at("dims"), "model.dims");
    if (m.dims.size() != static_cast<std::size_t>(m.n_max) + 1) {
      throw SchemaError("model.dims", "needs n_max + 1 = " + std::to_string(m.n_max + 1) + " entries");
    }
    const json& h = s.at("h");
    const json& l = s.at("l");
    if (!h.is_array() || h.size() != m.dims.size()) throw SchemaError("model.h", "needs one sample list per subspace");
    if (!l.is_array() || l.size() != m.dims.size() - 1) throw SchemaError("model.l", "needs one block per n = 1..n_max");
    for (std::size_t n = 0; n < m.dims.size(); ++n) {
      const std::string p = "model.h[" + std::to_string(n) + "]";
      if (!h[n].is_array() || h[n].empty()) throw SchemaError(p, "expected a nonempty list of samples");
      std::vector<Matrix> samples;
      for (std::size_t j = 0; j < h[n].size(); ++j) {
        samples.push_back(complex_matrix(h[n][j], m.dims[n], m.dims[n], p + "[" + std::to_string(j) + "]"));
      }
      m.h_samples.push_back(std::move(samples));
      if (n >= 1) {
        m.l_blocks.push_back(
            complex_matrix(l[n - 1], m.dims[n - 1], m.dims[n], "model.l[" + std::to_string(n - 1) + "]"));
      }
    }
  } else {
    throw SchemaError("model.model", "expected \"kerr\", \"jaynes_cummings\" or \"generic\", got \"" + kind + "\"");
  }
  s.finish();
  return m;
}

Task parse_task(const std::string& name) {
  static const std::pair<const char*, Task> names[] = {
      {"floquet", Task::floquet},       {"transmit", Task::transmit}, {"sidebands", Task::sidebands},
      {"two_photon", Task::two_photon}, {"slowmod", Task::slowmod},   {"validate", Task::validate},
      {"figures", Task::figures}};
  for (const auto& [n, t] : names) {
    if (name == n) return t;
  }
  throw SchemaError("task", "unknown task \"" + name + "\"");
}

Eigen::VectorXd to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

const char* task_name(Task t) {
  switch (t) {
    case Task::floquet: return "floquet";
    case Task::transmit: return "transmit";
    case Task::sidebands: return "sidebands";
    case Task::two_photon: return "two_photon";
    case Task::slowmod: return "slowmod";
    case Task::validate: return "validate";
    case Task::figures: return "figures";
  }
  return "?";
}

RunConfig parse_config(const json& doc) {
  RunConfig cfg;
  cfg.source = doc;
  Section root(doc, "");
  cfg.task = parse_task(root.string("task"));
  if (cfg.task != Task::figures) cfg.model = parse_model(root.at("model"));
  else if (root.has("model")) throw SchemaError("model", "the figures task reads upstream outputs and takes no model");

  if (root.has("numerics")) {
    Section n(root.at("numerics"), "numerics");
    auto& num = cfg.numerics;
    num.harmonic_cutoff = n.integer("harmonic_cutoff", num.harmonic_cutoff);
    num.samples = n.integer("samples", num.samples);
    num.ode_rtol = n.number("ode_rtol", num.ode_rtol);
    num.ode_atol = n.number("ode_atol", num.ode_atol);
    num.quadrature_tol = n.number("quadrature_tol", num.quadrature_tol);
    num.condition_limit = n.number("condition_limit", num.condition_limit);
    num.k_initial = n.integer("k_initial", num.k_initial);
    num.k_cap = n.integer("k_cap", num.k_cap);
    num.boundary_tol = n.number("boundary_tol", num.boundary_tol);
    n.finish();
    if (num.harmonic_cutoff < 1) throw SchemaError("numerics.harmonic_cutoff", "must be at least 1");
    if (num.samples < 4 || (num.samples & (num.samples - 1)) != 0) {
      throw SchemaError("numerics.samples", "must be a power of two");
    }
    if (!(num.ode_rtol > 0.0) || !(num.ode_atol > 0.0)) throw SchemaError("numerics", "ODE tolerances must be positive");
    if (!(num.quadrature_tol > 0.0)) throw SchemaError("numerics.quadrature_tol", "must be positive");
    if (num.k_initial < 0 || num.k_cap < num.k_initial) throw SchemaError("numerics.k_cap", "must be >= k_initial >= 0");
  }

  cfg.sweep.nu = default_nu_grid();
  cfg.sweep.delta = grid(json{{"min", -10.0}, {"max", 10.0}, {"points", 201}}, "sweep.delta");
  if (root.has("sweep")) {
    Section s(root.at("sweep"), "sweep");
    auto& sw = cfg.sweep;
    if (s.has("nu")) sw.nu = grid(s.at("nu"), "sweep.nu");
    if (s.has("delta")) sw.delta = grid(s.at("delta"), "sweep.delta");
    sw.k = s.integer("k", sw.k);
    if (sw.k < 0) throw SchemaError("sweep.k", "must be nonnegative");
    if (s.has("sidebands")) sw.sidebands = integers(s.at("sidebands"), "sweep.sidebands");
    sw.nu1 = s.number("nu1", sw.nu1);
    sw.nu2 = s.number("nu2", sw.nu2);
    if (s.has("omegas")) sw.omegas = numbers(s.at("omegas"), "sweep.omegas");
    if (s.has("photon_numbers")) sw.photon_numbers = integers(s.at("photon_numbers"), "sweep.photon_numbers");
    s.finish();
    for (double w : sw.omegas) {
      if (!(w > 0.0)) throw SchemaError("sweep.omegas", "modulation frequencies must be positive");
    }
    for (int N : sw.photon_numbers) {
      if (N < 1 || N > 2) throw SchemaError("sweep.photon_numbers", "supported photon numbers are 1 and 2");
    }
  }

  if (root.has("validation")) {
    Section v(root.at("validation"), "validation");
    auto& t = cfg.validation;
    t.oracle = v.number("oracle", t.oracle);
    t.invariants = v.number("invariants", t.invariants);
    t.geometric = v.number("geometric", t.geometric);
    t.slope_n1 = v.number("slope_n1", t.slope_n1);
    t.slope_n2 = v.number("slope_n2", t.slope_n2);
    t.slope = v.boolean("slope", t.slope);
    v.finish();
  }

  if (root.has("figures")) {
    Section f(root.at("figures"), "figures");
    cfg.figures.recipe = f.string("recipe");
    if (f.has("inputs")) {
      Section in(f.at("inputs"), "figures.inputs");
      const json& raw = f.at("inputs");
      for (auto it = raw.begin(); it != raw.end(); ++it) cfg.figures.inputs[it.key()] = in.string(it.key());
      in.finish();
    }
    f.finish();
  }
  if (cfg.task == Task::figures && cfg.figures.recipe.empty()) throw SchemaError("figures", "the figures task needs a recipe");

  if (root.has("output")) {
    Section o(root.at("output"), "output");
    if (o.has("dir")) cfg.output_dir = o.string("dir");
    cfg.write_meta = o.boolean("meta", cfg.write_meta);
    o.finish();
  }
  root.finish();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw SchemaError(path, "cannot read config file");
  std::stringstream buf;
  buf << f.rdbuf();
  const std::string text = buf.str();
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line and column.
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SchemaError(path + ":" + std::to_string(line) + ":" + std::to_string(col), "invalid JSON");
  }
  return parse_config(doc);
}

json resolved_numerics(const RunConfig& cfg) {
  const auto& n = cfg.numerics;
  const auto& s = cfg.sweep;
  json j;
  j["harmonic_cutoff"] = n.harmonic_cutoff;
  j["samples"] = n.samples;
  j["ode_rtol"] = n.ode_rtol;
  j["ode_atol"] = n.ode_atol;
  j["quadrature_tol"] = n.quadrature_tol;
  j["condition_limit"] = n.condition_limit;
  j["k_initial"] = n.k_initial;
  j["k_cap"] = n.k_cap;
  j["boundary_tol"] = n.boundary_tol;
  j["sweep"] = {{"nu_points", s.nu.size()},
                {"nu_min", s.nu.front()},
                {"nu_max", s.nu.back()},
                {"k", s.k},
                {"delta_points", s.delta.size()},
                {"sidebands", s.sidebands},
                {"nu1", s.nu1},
                {"nu2", s.nu2},
                {"omegas", s.omegas},
                {"photon_numbers", s.photon_numbers}};
  return j;
}

ParameterLoop build_loop(const LoopConfig& loop, double period) {
  switch (loop.kind) {
    case LoopConfig::Kind::ellipse:
      return ellipse_loop(to_vec(loop.center), to_vec(loop.axis_a), to_vec(loop.axis_b), period, loop.warp,
                          loop.n_points);
    case LoopConfig::Kind::table:
    case LoopConfig::Kind::points: {
      std::vector<Eigen::VectorXd> pts;
      for (const auto& p : loop.points) pts.push_back(to_vec(p));
      return ParameterLoop::from_points(std::move(pts), loop.schedule, period, loop.n_points);
    }
  }
  throw InvalidParameterError("unknown loop kind");
}

LadderSystem build_system(const ModelConfig& m) {
  switch (m.kind) {
    case ModelConfig::Kind::kerr: {
      KerrCavityParams p;
      p.kappa = m.kappa;
      p.chi = m.chi;
      p.delta0 = m.delta0;
      p.omega = m.omega;
      p.table = m.table;
      return build_kerr_cavity(p, m.n_max);
    }
    case ModelConfig::Kind::jaynes_cummings: {
      JaynesCummingsParams p;
      p.omega_e = m.omega_e;
      p.omega_c = m.omega_c;
      p.kappa = m.kappa;
      if (m.g) return build_jaynes_cummings(p, *m.g, m.n_max, m.omega);
      p.g_loop = build_loop(m.trajectories.front().loop, 2.0 * pi / m.omega);
      return build_jaynes_cummings_modulated(p, m.n_max);
    }
    case ModelConfig::Kind::generic:
      return build_generic(m.omega, m.h_samples, m.l_blocks);
  }
  throw InvalidParameterError("unknown model kind");
}

ParametricFamily build_family(const ModelConfig& m) {
  switch (m.kind) {
    case ModelConfig::Kind::kerr:
      return kerr_family(m.kappa, m.chi, m.n_max);
    case ModelConfig::Kind::jaynes_cummings: {
      JaynesCummingsParams p;
      p.omega_e = m.omega_e;
      p.omega_c = m.omega_c;
      p.kappa = m.kappa;
      return jaynes_cummings_family(p, m.n_max);
    }
    case ModelConfig::Kind::generic:
      break;
  }
  throw InvalidParameterError("slow-modulation tasks need a kerr or jaynes_cummings model");
}

std::vector<std::pair<std::string, ParameterLoop>> build_trajectories(const ModelConfig& m) {
  const double period = 2.0 * pi / m.omega;
  std::vector<std::pair<std::string, ParameterLoop>> out;
  if (m.kind == ModelConfig::Kind::kerr) {
    // The detuning itself is the loop parameter.
    if (!m.table.empty()) {
      std::vector<Eigen::VectorXd> pts;
      for (double d : m.table) pts.push_back(Eigen::VectorXd::Constant(1, d));
      out.emplace_back("detuning", ParameterLoop::from_points(std::move(pts), {}, period));
    } else {
      const double d0 = m.delta0;
      const double w = m.omega;
      out.emplace_back("detuning", ParameterLoop::from_trajectory(
                                       period, [=](double t) { return Eigen::VectorXd::Constant(1, d0 * std::sin(w * t)); },
                                       [=](double t) { return Eigen::VectorXd::Constant(1, d0 * w * std::cos(w * t)); }));
    }
    return out;
  }
  if (m.kind == ModelConfig::Kind::jaynes_cummings) {
    if (m.g) {
      Eigen::VectorXd p(2);
      p << m.g->real(), m.g->imag();
      out.emplace_back("static", ParameterLoop::constant(p, period));
    }
    for (const auto& tr : m.trajectories) out.emplace_back(tr.name, build_loop(tr.loop, period));
    return out;
  }
  throw InvalidParameterError("slow-modulation tasks need a kerr or jaynes_cummings model");
}

}  // namespace floqsmat::cli
