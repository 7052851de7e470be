#pragma once

#include "floqsmat/decomposition.hpp"
#include "floqsmat/loop.hpp"
#include "floqsmat/spline.hpp"
#include "floqsmat/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace floqsmat {

// Real periodic modulation waveform: either depth * sin(omega t) or a periodic cubic
// interpolant through equispaced samples over one period.
class Waveform {
 public:
  enum class Kind { sinusoid, table };

  static Waveform sinusoid(double depth, double omega);
  static Waveform table(std::vector<double> samples, double omega);

  Kind kind() const noexcept { return kind_; }
  double omega() const noexcept { return omega_; }
  double period() const noexcept { return 2.0 * pi / omega_; }
  double depth() const noexcept { return depth_; }
  const std::vector<double>& samples() const noexcept { return spline_.samples(); }

  double operator()(double t) const;
  // Accumulated phase phi(t) = integral of the waveform from 0 to t.
  double phase(double t) const;
  double mean() const;
  bool is_constant() const;

 private:
  Waveform() = default;

  Kind kind_ = Kind::sinusoid;
  double omega_ = 1.0;
  double depth_ = 0.0;
  PeriodicCubicSpline<double> spline_;
};

// Excitation-number-conserving localized system, stored subspace by subspace.
// Immutable after construction; all evaluators are pure.
class LadderSystem {
 public:
  using BlockFn = std::function<Matrix(int n, double t)>;

  LadderSystem(double omega, std::vector<int> subspace_dims, BlockFn h_block, std::vector<Matrix> l_blocks,
               bool time_independent, std::uint64_t fingerprint);

  double omega() const noexcept { return omega_; }
  double period() const noexcept { return 2.0 * pi / omega_; }
  int n_max() const noexcept { return static_cast<int>(dims_.size()) - 1; }
  const std::vector<int>& subspace_dims() const noexcept { return dims_; }
  int dim(int n) const;
  bool time_independent() const noexcept { return static_; }
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }

  Matrix h_block(int n, double t) const;
  // Lowering block H^n -> H^{n-1}, shape dim(n-1) x dim(n); defined for 1 <= n <= n_max.
  const Matrix& l_block(int n) const;
  // H^n(t) - i l_n^dagger l_n.
  Matrix h_eff(int n, double t) const;
  // l_n^dagger l_n, the constant decay part of the effective block.
  const Matrix& decay_block(int n) const;

 private:
  void check_level(int n, int lowest) const;

  double omega_;
  std::vector<int> dims_;
  BlockFn h_;
  std::vector<Matrix> l_;
  std::vector<Matrix> decay_;
  bool static_;
  std::uint64_t fingerprint_;
};

struct KerrCavityParams {
  double kappa = 1.0;
  double chi = 0.0;
  double delta0 = 0.0;
  double omega = 1.0;
  // Optional tabulated Delta(t) over one period; replaces delta0 * sin(omega t) when non-empty.
  std::vector<double> table;

  Waveform waveform() const;
};

struct JaynesCummingsParams {
  double omega_e = 0.0;
  double omega_c = 0.0;
  double kappa = 1.0;
  std::optional<ParameterLoop> g_loop;  // over (Re g, Im g)
};

LadderSystem build_kerr_cavity(const KerrCavityParams& params, int n_max);

// Static JC system at coupling g. Its nominal modulation frequency is that of g_loop when
// present, otherwise `omega`.
LadderSystem build_jaynes_cummings(const JaynesCummingsParams& params, cplx g, int n_max, double omega = 1.0);

// JC system with g(t) following params.g_loop (required).
LadderSystem build_jaynes_cummings_modulated(const JaynesCummingsParams& params, int n_max);

// Generic ladder from per-subspace matrix samples on an equispaced grid over one period
// (h_samples[n][j] = H^n(j T / N_n)); a single sample means a static block.
LadderSystem build_generic(double omega, std::vector<std::vector<Matrix>> h_samples, std::vector<Matrix> l_blocks);

struct ValidationReport {
  double periodicity_deviation = 0.0;
  double commutator_deviation = 0.0;    // || [L, mu] - L || on the assembled direct sum
  double number_conservation = 0.0;     // || [H(t), mu] || on the assembled direct sum
  double ground_energy_deviation = 0.0; // || H^0(t) ||
  bool ground_dim_ok = false;
  bool lowering_shapes_ok = false;

  bool ok(double tol = 1e-10) const;
};

ValidationReport validate_ladder(const LadderSystem& sys, int t_samples);

// Closed-form Floquet data of the n-excitation Kerr block: one mode with
// lambda = chi n (n-1) - i n kappa / 2 and periodic state exp(-i n phi(t)).
FloquetDecomposition kerr_analytic_floquet(const KerrCavityParams& params, int n, int harmonic_cutoff = 32,
                                           int samples = 256);

// Family of static systems over a real parameter chart p, with analytic parameter
// derivatives of the Hamiltonian blocks (the decay blocks are parameter independent).
class ParametricFamily {
 public:
  using BlockFn = std::function<Matrix(int n, std::span<const double> p)>;
  using DerivFn = std::function<Matrix(int n, int j, std::span<const double> p)>;

  ParametricFamily(int n_params, std::vector<int> subspace_dims, BlockFn h_block, std::vector<Matrix> l_blocks,
                   DerivFn dh_block = {}, std::uint64_t fingerprint = 0);

  int n_params() const noexcept { return n_params_; }
  int n_max() const noexcept { return static_cast<int>(dims_.size()) - 1; }
  int dim(int n) const { return dims_.at(static_cast<std::size_t>(n)); }
  bool has_derivatives() const noexcept { return static_cast<bool>(dh_); }

  Matrix h_block(int n, std::span<const double> p) const;
  Matrix h_eff(int n, std::span<const double> p) const;
  Matrix dh_block(int n, int j, std::span<const double> p) const;
  const Matrix& l_block(int n) const;

  // Replaces missing analytic derivatives by central differences of step h.
  ParametricFamily with_finite_difference_derivatives(double h = 1e-6) const;
  bool derivatives_are_approximate() const noexcept { return approximate_; }

  LadderSystem at(std::span<const double> p, double omega = 1.0) const;
  LadderSystem along(const ParameterLoop& loop) const;

 private:
  int n_params_;
  std::vector<int> dims_;
  BlockFn h_;
  std::vector<Matrix> l_;
  DerivFn dh_;
  std::uint64_t fingerprint_;
  bool approximate_ = false;
};

// JC over p = (Re g, Im g).
ParametricFamily jaynes_cummings_family(const JaynesCummingsParams& params, int n_max = 2);
// Kerr cavity over p = (Delta).
ParametricFamily kerr_family(double kappa, double chi, int n_max = 2);

// FNV-1a over a byte string; used for provenance fingerprints.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 14695981039346656037ull);

}  // namespace floqsmat
