#pragma once

#include "floqsmat/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace floqsmat {

struct DecompositionProvenance {
  double ode_rtol = 0.0;
  double ode_atol = 0.0;
  std::uint64_t system_fingerprint = 0;
  std::string method;
};

// Floquet decomposition of H_eff^n(t) within one excitation subspace.
//
// lambdas hold the quasi-energies with the real part folded into [-omega/2, omega/2).
// Fourier blocks use the convention f(t) = sum_m f_m exp(-i m omega t) and are stored in
// the gauge whose quasi-energy is quasi_energy(k) = lambdas[k] + harmonic_shift[k] * omega;
// the shift recentres each mode's harmonic content around m = 0.
//   right_fourier[m + K]: dim x modes, column k = m-th coefficient of |phi_k(t)>
//   left_fourier[m + K]:  modes x dim, row k    = m-th coefficient of <chi_k(t)|
struct FloquetDecomposition {
  int n = 0;
  double omega = 0.0;
  int harmonic_cutoff = 0;
  int sample_grid = 0;
  std::vector<cplx> lambdas;
  std::vector<int> harmonic_shift;
  std::vector<Matrix> right_fourier;
  std::vector<Matrix> left_fourier;
  std::vector<std::string> warnings;
  DecompositionProvenance provenance;

  int dim() const { return right_fourier.empty() ? 0 : static_cast<int>(right_fourier.front().rows()); }
  int modes() const { return static_cast<int>(lambdas.size()); }
  double period() const { return 2.0 * pi / omega; }

  cplx quasi_energy(int k) const { return lambdas[k] + static_cast<double>(harmonic_shift[k]) * omega; }
  Vector quasi_energies() const;

  bool has_harmonic(int m) const { return m >= -harmonic_cutoff && m <= harmonic_cutoff; }
  const Matrix& right(int m) const { return right_fourier[static_cast<std::size_t>(m + harmonic_cutoff)]; }
  const Matrix& left(int m) const { return left_fourier[static_cast<std::size_t>(m + harmonic_cutoff)]; }

  // Periodic states synthesized from the Fourier blocks.
  Matrix right_states(double t) const;
  Matrix left_states(double t) const;
  // d/dt of the periodic states, evaluated spectrally.
  Matrix right_states_derivative(double t) const;
  Matrix left_states_derivative(double t) const;
};

// Folds a quasi-energy real part into [-omega/2, omega/2).
double fold_quasi_energy(double eps, double omega);

// The single ground state |g> as a trivial decomposition (lambda = 0, constant state).
FloquetDecomposition ground_decomposition(double omega, int harmonic_cutoff);

// Versioned text serialization (JSON tree, complex numbers as [re, im]).
std::string to_json_string(const FloquetDecomposition& dec, int indent = 2);
FloquetDecomposition decomposition_from_json_string(const std::string& text);

}  // namespace floqsmat
