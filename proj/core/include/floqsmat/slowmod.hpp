#pragma once

#include "floqsmat/loop.hpp"
#include "floqsmat/models.hpp"
#include "floqsmat/oracle.hpp"
#include "floqsmat/types.hpp"

#include <span>
#include <vector>

namespace floqsmat {

// Instantaneous (frozen-parameter) amplitudes of the equal-time N-photon output:
//   g0 = (-i)^N <g| L^N R_N L^dag ... R_1 L^dag |g>,  R_n = (H_eff^n(p) - n nu)^{-1}
//   g1 = gradient-weighted correction, so that the first-order amplitude is g1 . dp/dt.
struct InstantAmplitudes {
  cplx g0;
  Vector g1;
};

cplx instantaneous_g0(const ParametricFamily& family, std::span<const double> p, double nu, int N);
// Static system: uses the effective blocks at t = 0.
cplx instantaneous_g0(const LadderSystem& sys, double nu, int N);
Vector instantaneous_g1(const ParametricFamily& family, std::span<const double> p, double nu, int N);
InstantAmplitudes instantaneous_amplitudes(const ParametricFamily& family, std::span<const double> p, double nu, int N);

struct QuadratureSpec {
  double tol = 1e-9;  // absolute, on the period average
  int max_depth = 20;
};

// N! (1/T) int_0^T |g0(p(t))|^2 dt; depends on the traversal.
double g_zeroth(const ParameterLoop& loop, const ParametricFamily& family, double nu, int N,
                const QuadratureSpec& quad = {});

// (N! / pi) Re closed-integral of conj(g0) g1 . dp over the loop points; geometric.
double g_first(const ParameterLoop& loop, const ParametricFamily& family, double nu, int N);

// The same first-order term from a time-sampled trapezoid rule over one period, for checking
// that the geometric evaluation does not depend on the traversal.
double g_first_time_sampled(const ParameterLoop& loop, const ParametricFamily& family, double nu, int N,
                            int samples = 1024);

struct SlowmodValidation {
  std::vector<double> nu_grid;
  std::vector<double> omegas;
  std::vector<double> g0;                     // per nu
  std::vector<double> g1;                     // per nu
  std::vector<std::vector<double>> exact;     // [omega][nu]
  std::vector<std::vector<double>> slopes;    // [omega][nu], (G - G0) / omega
  std::vector<double> extrapolated_slope;     // per nu, polynomial extrapolation to omega = 0
  double relative_deviation = 0.0;            // || extrapolated - g1 || / || g1 ||
};

SlowmodValidation slowmod_validate_against_exact(const ParameterLoop& loop, const ParametricFamily& family,
                                                 std::span<const double> nu_grid, int N,
                                                 std::span<const double> omegas, const WindowSpec& window = {});

// Value at x = 0 of the interpolating polynomial through (xs, ys).
double extrapolate_to_zero(std::span<const double> xs, std::span<const double> ys);

}  // namespace floqsmat
