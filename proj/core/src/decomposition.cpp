#include "floqsmat/decomposition.hpp"

#include "floqsmat/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <string>

namespace floqsmat {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw InvalidParameterError("expected a complex number as [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from(const json& rows, Eigen::Index n_rows, Eigen::Index n_cols) {
  if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n_rows) {
    throw InvalidParameterError("decomposition block has the wrong number of rows");
  }
  Matrix m(n_rows, n_cols);
  for (Eigen::Index i = 0; i < n_rows; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n_cols) {
      throw InvalidParameterError("decomposition block has the wrong number of columns");
    }
    for (Eigen::Index j = 0; j < n_cols; ++j) m(i, j) = complex_from(row[static_cast<std::size_t>(j)]);
  }
  return m;
}

template <class Blocks>
Matrix synthesize(const Blocks& blocks, int K, double omega, double t, bool derivative) {
  Matrix out = Matrix::Zero(blocks.front().rows(), blocks.front().cols());
  for (int m = -K; m <= K; ++m) {
    cplx w = std::exp(-I * (m * omega * t));
    if (derivative) w *= -I * (m * omega);
    out += w * blocks[static_cast<std::size_t>(m + K)];
  }
  return out;
}

}  // namespace

double fold_quasi_energy(double eps, double omega) {
  double folded = eps - omega * std::floor((eps + omega / 2.0) / omega);
  if (folded >= omega / 2.0) folded -= omega;
  if (folded < -omega / 2.0) folded += omega;
  return folded;
}

Vector FloquetDecomposition::quasi_energies() const {
  Vector v(modes());
  for (int k = 0; k < modes(); ++k) v[k] = quasi_energy(k);
  return v;
}

Matrix FloquetDecomposition::right_states(double t) const {
  return synthesize(right_fourier, harmonic_cutoff, omega, t, false);
}

Matrix FloquetDecomposition::left_states(double t) const {
  return synthesize(left_fourier, harmonic_cutoff, omega, t, false);
}

Matrix FloquetDecomposition::right_states_derivative(double t) const {
  return synthesize(right_fourier, harmonic_cutoff, omega, t, true);
}

Matrix FloquetDecomposition::left_states_derivative(double t) const {
  return synthesize(left_fourier, harmonic_cutoff, omega, t, true);
}

FloquetDecomposition ground_decomposition(double omega, int harmonic_cutoff) {
  FloquetDecomposition dec;
  dec.n = 0;
  dec.omega = omega;
  dec.harmonic_cutoff = harmonic_cutoff;
  dec.sample_grid = 1;
  dec.lambdas = {cplx(0.0, 0.0)};
  dec.harmonic_shift = {0};
  dec.right_fourier.assign(static_cast<std::size_t>(2 * harmonic_cutoff + 1), Matrix::Zero(1, 1));
  dec.left_fourier = dec.right_fourier;
  dec.right_fourier[static_cast<std::size_t>(harmonic_cutoff)](0, 0) = 1.0;
  dec.left_fourier[static_cast<std::size_t>(harmonic_cutoff)](0, 0) = 1.0;
  dec.provenance.method = "ground";
  return dec;
}

std::string to_json_string(const FloquetDecomposition& dec, int indent) {
  json j;
  j["format"] = "floqsmat.floquet_decomposition";
  j["version"] = kFormatVersion;
  j["n"] = dec.n;
  j["omega"] = dec.omega;
  j["harmonic_cutoff"] = dec.harmonic_cutoff;
  j["sample_grid"] = dec.sample_grid;
  j["dim"] = dec.dim();
  j["modes"] = dec.modes();
  json lambdas = json::array();
  for (cplx l : dec.lambdas) lambdas.push_back(complex_json(l));
  j["lambdas"] = std::move(lambdas);
  j["harmonic_shift"] = dec.harmonic_shift;
  json right = json::array();
  json left = json::array();
  for (int m = -dec.harmonic_cutoff; m <= dec.harmonic_cutoff; ++m) {
    right.push_back({{"m", m}, {"block", matrix_json(dec.right(m))}});
    left.push_back({{"m", m}, {"block", matrix_json(dec.left(m))}});
  }
  j["right_fourier"] = std::move(right);
  j["left_fourier"] = std::move(left);
  j["warnings"] = dec.warnings;
  char fp[32];
  std::snprintf(fp, sizeof fp, "%016llx", static_cast<unsigned long long>(dec.provenance.system_fingerprint));
  j["provenance"] = {{"ode_rtol", dec.provenance.ode_rtol},
                     {"ode_atol", dec.provenance.ode_atol},
                     {"system_fingerprint", fp},
                     {"method", dec.provenance.method}};
  return j.dump(indent);
}

FloquetDecomposition decomposition_from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidParameterError(std::string("decomposition document is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "floqsmat.floquet_decomposition") {
      throw InvalidParameterError("document is not a Floquet decomposition");
    }
    const int version = j.at("version").get<int>();
    if (version != kFormatVersion) {
      throw InvalidParameterError("unsupported decomposition format version " + std::to_string(version));
    }
    FloquetDecomposition dec;
    dec.n = j.at("n").get<int>();
    dec.omega = j.at("omega").get<double>();
    dec.harmonic_cutoff = j.at("harmonic_cutoff").get<int>();
    dec.sample_grid = j.at("sample_grid").get<int>();
    const int dim = j.at("dim").get<int>();
    const int modes = j.at("modes").get<int>();
    for (const auto& l : j.at("lambdas")) dec.lambdas.push_back(complex_from(l));
    dec.harmonic_shift = j.at("harmonic_shift").get<std::vector<int>>();
    if (static_cast<int>(dec.lambdas.size()) != modes || static_cast<int>(dec.harmonic_shift.size()) != modes) {
      throw InvalidParameterError("decomposition mode count mismatch");
    }
    const auto& right = j.at("right_fourier");
    const auto& left = j.at("left_fourier");
    const auto blocks = static_cast<std::size_t>(2 * dec.harmonic_cutoff + 1);
    if (right.size() != blocks || left.size() != blocks) {
      throw InvalidParameterError("decomposition harmonic block count mismatch");
    }
    for (std::size_t i = 0; i < blocks; ++i) {
      const int m = static_cast<int>(i) - dec.harmonic_cutoff;
      if (right[i].at("m").get<int>() != m || left[i].at("m").get<int>() != m) {
        throw InvalidParameterError("decomposition harmonic blocks out of order");
      }
      dec.right_fourier.push_back(matrix_from(right[i].at("block"), dim, modes));
      dec.left_fourier.push_back(matrix_from(left[i].at("block"), modes, dim));
    }
    dec.warnings = j.at("warnings").get<std::vector<std::string>>();
    const auto& prov = j.at("provenance");
    dec.provenance.ode_rtol = prov.at("ode_rtol").get<double>();
    dec.provenance.ode_atol = prov.at("ode_atol").get<double>();
    dec.provenance.system_fingerprint = std::stoull(prov.at("system_fingerprint").get<std::string>(), nullptr, 16);
    dec.provenance.method = prov.at("method").get<std::string>();
    return dec;
  } catch (const json::exception& e) {
    throw InvalidParameterError(std::string("malformed decomposition document: ") + e.what());
  }
}

}  // namespace floqsmat
