#pragma once

#include "floqsmat/decomposition.hpp"
#include "floqsmat/floquet.hpp"
#include "floqsmat/models.hpp"
#include "floqsmat/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace floqsmat {

// Fourier blocks of the coupling between adjacent excitation subspaces lo = hi - 1:
//   down(k) = (1/T) int <chi_lo(t)| L |phi_hi(t)> exp(+i k omega t) dt   (modes_lo x modes_hi)
//   up(k)   = (1/T) int <chi_hi(t)| L^dagger |phi_lo(t)> exp(-i k omega t) dt   (modes_hi x modes_lo)
// stored for |k| <= cutoff; blocks outside that window are treated as zero.
struct CouplingFourierBlocks {
  int n_hi = 1;
  int cutoff = 0;
  std::vector<Matrix> down;
  std::vector<Matrix> up;
  double tail = 0.0;  // max boundary block norm relative to the largest block

  bool has(int k) const { return k >= -cutoff && k <= cutoff; }
  const Matrix& l_down(int k) const { return down[static_cast<std::size_t>(k + cutoff)]; }
  const Matrix& l_up(int k) const { return up[static_cast<std::size_t>(k + cutoff)]; }
};

CouplingFourierBlocks coupling_fourier(const FloquetDecomposition& dec_hi, const FloquetDecomposition& dec_lo,
                                       const Matrix& l_block, int cutoff);

// Decompositions of subspaces 0..max_excitation and the coupling blocks between them.
struct ScatteringSetup {
  FloquetDecomposition ground;
  FloquetDecomposition dec1;
  std::optional<FloquetDecomposition> dec2;
  CouplingFourierBlocks c10;
  std::optional<CouplingFourierBlocks> c21;
  std::vector<std::string> warnings;

  double omega() const { return dec1.omega; }
  int cutoff() const { return c10.cutoff; }
};

ScatteringSetup prepare_scattering(const LadderSystem& sys, int max_excitation, const FloquetOptions& opts = {});

// S_k(nu): amplitude for a photon at nu to leave at nu + k omega. The reference time t0 = 0;
// other choices multiply S_k by exp(-i k omega t0).
cplx single_photon_sk(const CouplingFourierBlocks& c10, const FloquetDecomposition& dec1, double nu, int k);

struct SidebandSpectrum {
  std::vector<double> nu_grid;
  double omega = 0.0;
  int k_min = 0;
  int k_max = 0;
  Matrix amplitudes;           // rows: nu, columns: k - k_min
  std::vector<double> total;   // sum_k |S_k(nu)|^2
  std::vector<std::string> warnings;
  double t0 = 0.0;             // reference time the stored phases refer to

  int k_count() const { return k_max - k_min + 1; }
  cplx s(std::size_t i, int k) const { return amplitudes(static_cast<Eigen::Index>(i), k - k_min); }
  // Same spectrum referred to another reference time.
  SidebandSpectrum with_reference_time(double new_t0) const;
};

struct TransmissionRequest {
  std::vector<double> nu_grid;
  int k_initial = 4;
  int k_cap = 64;
  double boundary_tol = 1e-10;
  int threads = 1;
};

// Default frequency grid: 241 points on [-6, 6].
std::vector<double> default_nu_grid();

SidebandSpectrum transmission(const ScatteringSetup& setup, const TransmissionRequest& request);
// Fixed sideband window [-k, k], no widening.
SidebandSpectrum sideband_spectrum(const ScatteringSetup& setup, std::span<const double> nu_grid, int k_half,
                                   int threads = 1);

// Output frequencies on the delta grid: omega_{1,2} = (nu1 + nu2 + k omega +- delta) / 2.
struct OutputPair {
  double omega1;
  double omega2;
};
OutputPair output_frequencies(double nu1, double nu2, int k, double omega, double delta);

std::vector<cplx> two_photon_connected_s2(const CouplingFourierBlocks& c10, const CouplingFourierBlocks& c21,
                                          const FloquetDecomposition& dec1, const FloquetDecomposition& dec2, int k,
                                          double nu1, double nu2, std::span<const double> delta_grid);

std::vector<cplx> two_photon_connected_s1_regularized(const CouplingFourierBlocks& c10,
                                                      const FloquetDecomposition& dec1, int k, double nu1, double nu2,
                                                      std::span<const double> delta_grid);

struct TwoPhotonConnectedGrid {
  int k = 0;
  double nu1 = 0.0;
  double nu2 = 0.0;
  std::vector<double> delta_grid;
  std::vector<cplx> values_s1;
  std::vector<cplx> values_s2;

  cplx value(std::size_t i) const { return values_s1[i] + values_s2[i]; }
};

TwoPhotonConnectedGrid two_photon_connected(const ScatteringSetup& setup, int k, double nu1, double nu2,
                                            std::span<const double> delta_grid, int threads = 1);

// Full two-photon matrix with its delta factors kept symbolic.
//   product:   amplitude * delta(w1 - a - k1 W) delta(w2 - b - k2 W), (a, b) = (nu1, nu2) for the
//              direct pairing and (nu2, nu1) for the exchanged one
//   connected: values(delta) * delta(w1 + w2 - nu1 - nu2 - k W)
struct ProductRecord {
  enum class Pairing { direct, exchanged };
  Pairing pairing = Pairing::direct;
  int k1 = 0;
  int k2 = 0;
  cplx amplitude;
};

struct ConnectedRecord {
  int k = 0;
  std::vector<double> delta_grid;
  std::vector<cplx> values;
};

struct TwoPhotonMatrix {
  double nu1 = 0.0;
  double nu2 = 0.0;
  double omega = 0.0;
  std::vector<ProductRecord> products;
  std::vector<ConnectedRecord> connected;
};

// Records with |amplitude| <= prune_tol * max are dropped (prune_tol = 0 keeps all).
TwoPhotonMatrix cluster_full_two_photon(const SidebandSpectrum& single, std::span<const TwoPhotonConnectedGrid> connected,
                                        double nu1, double nu2, double prune_tol = 0.0);

}  // namespace floqsmat
