#pragma once

#include "floqsmat/decomposition.hpp"
#include "floqsmat/models.hpp"
#include "floqsmat/types.hpp"

#include <span>
#include <vector>

namespace floqsmat {

// U with dU/dt = -i H_eff^n(t) U and U(t0) = 1.
Matrix propagate_effective(const LadderSystem& sys, int n, double t0, double t1, const ToleranceSpec& tol = {});

// Propagators U(t_j, t0) at each of the ordered times (all >= t0), from a single sweep.
std::vector<Matrix> propagate_effective_at(const LadderSystem& sys, int n, double t0, std::span<const double> times,
                                           const ToleranceSpec& tol = {});

struct FloquetOptions {
  int harmonic_cutoff = 32;
  int samples = 256;
  ToleranceSpec tol{};
  double condition_limit = 1e10;
  double passivity_tol = 1e-8;
  double tail_tol = 1e-8;
};

FloquetDecomposition floquet_decompose(const LadderSystem& sys, int n, const FloquetOptions& opts = {});
FloquetDecomposition floquet_decompose(const LadderSystem& sys, int n, int harmonic_cutoff, int samples,
                                       const ToleranceSpec& tol = {});

// sum_k |phi_k(t)> <chi_k(s)| exp(-i lambda_k (t - s)).
Matrix reconstruct_propagator(const FloquetDecomposition& dec, double t, double s);

// max || H_eff(t) phi_k(t) - i dphi_k/dt - lambda_k phi_k(t) || over modes and t_samples equispaced times,
// i.e. the Floquet equation for psi_k(t) = exp(-i lambda_k t) phi_k(t).
double floquet_residual(const LadderSystem& sys, const FloquetDecomposition& dec, int t_samples);
// Same check on the left states: || chi_k(t) H_eff(t) + i dchi_k/dt - lambda_k chi_k(t) ||.
double floquet_left_residual(const LadderSystem& sys, const FloquetDecomposition& dec, int t_samples);

// max_t || X(t) Phi(t) - 1 || over the given times.
double biorthonormality_deviation(const FloquetDecomposition& dec, std::span<const double> times);

// Moves mode k's quasi-energy by `zones` Brillouin zones and shifts its harmonics to match;
// every assembled quantity is unchanged.
FloquetDecomposition refold(const FloquetDecomposition& dec, int k, int zones);

}  // namespace floqsmat
