#include "context.hpp"

#include "floqsmat/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

namespace floqsmat::cli {

using nlohmann::json;

namespace {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name, const std::string& file) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw MissingInputError(file + " has no column " + name);
    return static_cast<std::size_t>(it - header.begin());
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  return out;
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw MissingInputError(path.string());
  Table t;
  std::string line;
  if (!std::getline(f, line)) throw MissingInputError(path.string() + " is empty");
  t.header = split(line);
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& cell : split(line)) {
      double v = 0.0;
      const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (r.ec != std::errc()) throw MissingInputError(path.string() + " has a malformed cell '" + cell + "'");
      row.push_back(v);
    }
    if (row.size() != t.header.size()) throw MissingInputError(path.string() + " has a ragged row");
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string project(const Table& t, const std::vector<std::string>& columns, const std::vector<std::string>& renamed,
                    const std::string& file) {
  std::vector<std::size_t> idx;
  for (const auto& c : columns) idx.push_back(t.column(c, file));
  std::ostringstream os;
  for (std::size_t i = 0; i < renamed.size(); ++i) os << (i ? "," : "") << renamed[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < idx.size(); ++i) os << (i ? "," : "") << format_real(row[idx[i]]);
    os << '\n';
  }
  return os.str();
}

// Config hash of the run that produced an upstream file, when its sidecar exists.
json upstream_hash(const std::filesystem::path& path) {
  std::ifstream f(path.string() + ".meta.json");
  if (!f) return nullptr;
  try {
    const json meta = json::parse(f);
    return meta.value("config_hash", json(nullptr));
  } catch (const json::exception&) {
    return nullptr;
  }
}

std::map<std::string, std::string> inputs_or(const FigureConfig& fig, std::map<std::string, std::string> defaults) {
  if (fig.inputs.empty()) return defaults;
  return fig.inputs;
}

std::filesystem::path resolve(const Context& ctx, const std::string& rel) {
  const std::filesystem::path p(rel);
  return p.is_absolute() ? p : ctx.out_dir / p;
}

void require_all(const Context& ctx, const std::map<std::string, std::string>& inputs) {
  std::string missing;
  for (const auto& [label, rel] : inputs) {
    if (!std::filesystem::exists(resolve(ctx, rel))) missing += (missing.empty() ? "" : ", ") + resolve(ctx, rel).string();
  }
  if (!missing.empty()) throw MissingInputError(missing);
}

void simple_recipe(const Context& ctx, const std::string& prefix, std::map<std::string, std::string> defaults,
                   const std::vector<std::string>& columns, const std::vector<std::string>& renamed) {
  const auto inputs = inputs_or(ctx.cfg.figures, std::move(defaults));
  require_all(ctx, inputs);
  for (const auto& [label, rel] : inputs) {
    const auto path = resolve(ctx, rel);
    const Table t = read_csv(path);
    ctx.emit(prefix + "_" + label + ".csv", project(t, columns, renamed, path.string()),
             {{"recipe", ctx.cfg.figures.recipe}, {"source", rel}, {"source_config_hash", upstream_hash(path)}});
  }
}

// Per-trajectory zeroth order and the shared first order from slowmod_<name>_N<N>.csv files.
void slowmod_recipe(const Context& ctx, const std::string& prefix, int N, const std::string& order0,
                    const std::string& order1) {
  std::map<std::string, std::string> inputs = ctx.cfg.figures.inputs;
  if (inputs.empty()) {
    const auto dir = ctx.out_dir / "fig4";
    const std::regex pattern("slowmod_(.+)_N" + std::to_string(N) + "\\.csv");
    if (std::filesystem::is_directory(dir)) {
      for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        std::smatch m;
        const std::string file = entry.path().filename().string();
        if (std::regex_match(file, m, pattern)) inputs[m[1].str()] = "fig4/" + file;
      }
    }
    if (inputs.empty()) throw MissingInputError((dir / ("slowmod_*_N" + std::to_string(N) + ".csv")).string());
  }
  require_all(ctx, inputs);
  std::vector<double> nu;
  std::vector<double> first;
  double spread = 0.0;
  json sources = json::object();
  for (const auto& [label, rel] : inputs) {
    const auto path = resolve(ctx, rel);
    const Table t = read_csv(path);
    ctx.emit(prefix + "_" + order0 + "_" + label + ".csv", project(t, {"nu", "G0"}, {"nu", order0}, path.string()),
             {{"recipe", ctx.cfg.figures.recipe}, {"source", rel}, {"source_config_hash", upstream_hash(path)}});
    const std::size_t cn = t.column("nu", path.string());
    const std::size_t c1 = t.column("G1", path.string());
    if (nu.empty()) {
      for (const auto& row : t.rows) {
        nu.push_back(row[cn]);
        first.push_back(row[c1]);
      }
    } else {
      if (t.rows.size() != nu.size()) throw MissingInputError(path.string() + " uses a different frequency grid");
      for (std::size_t i = 0; i < nu.size(); ++i) {
        if (t.rows[i][cn] != nu[i]) throw MissingInputError(path.string() + " uses a different frequency grid");
        spread = std::max(spread, std::abs(t.rows[i][c1] - first[i]));
      }
    }
    sources[label] = rel;
  }
  std::ostringstream os;
  os << "nu," << order1 << '\n';
  for (std::size_t i = 0; i < nu.size(); ++i) os << format_real(nu[i]) << ',' << format_real(first[i]) << '\n';
  ctx.emit(prefix + "_" + order1 + ".csv", os.str(),
           {{"recipe", ctx.cfg.figures.recipe}, {"sources", sources}, {"first_order_spread", spread}});
}

}  // namespace

void emit_figure_data(const Context& ctx) {
  const std::string& recipe = ctx.cfg.figures.recipe;
  if (recipe == "fig2a") {
    simple_recipe(ctx, "fig2a", {{"slow", "fig2_slow/transmission.csv"}, {"fast", "fig2_fast/transmission.csv"}},
                  {"nu", "T"}, {"nu", "T"});
  } else if (recipe == "fig2b") {
    simple_recipe(ctx, "fig2b", {{"slow", "fig2_slow/sidebands.csv"}, {"fast", "fig2_fast/sidebands.csv"}},
                  {"nu", "k", "abs_S"}, {"nu", "k", "abs_S"});
  } else if (recipe == "fig3") {
    simple_recipe(ctx, "fig3",
                  {{"k-1", "fig3/two_photon_k-1.csv"}, {"k0", "fig3/two_photon_k0.csv"}, {"k1", "fig3/two_photon_k1.csv"}},
                  {"delta", "Sc_abs"}, {"delta", "Sc_abs"});
  } else if (recipe == "fig4b") {
    slowmod_recipe(ctx, "fig4b", 1, "T0", "T1");
  } else if (recipe == "fig4c") {
    slowmod_recipe(ctx, "fig4c", 2, "G0", "G1");
  } else {
    throw SchemaError("figures.recipe", "unknown recipe \"" + recipe + "\" (fig2a, fig2b, fig3, fig4b, fig4c)");
  }
}

}  // namespace floqsmat::cli
