#pragma once

#include "floqsmat/models.hpp"
#include "floqsmat/types.hpp"

#include <span>
#include <vector>

namespace floqsmat {

// Time-domain reference computations. Nothing here touches the Floquet machinery: every
// quantity comes from direct propagation of the effective Hamiltonian.
//
// Monochromatic driving is handled in the rotating frame of the drive, where the driven
// amplitudes settle into a periodic steady state. The transient is integrated away period
// by period until the period-to-period change, extrapolated geometrically, falls below
// `settle_tol` relative to the state norm; `max_span` bounds the total transient time.
struct WindowSpec {
  ToleranceSpec tol{1e-11, 1e-13};
  double settle_tol = 1e-12;
  double max_span = 0.0;   // 0: 200 / kappa_min + 8 periods
  int grid_samples = 256;  // time samples per period for discrete harmonic projections
};

// <g| L U_eff^1(t, s) L^dagger |g>, t >= s.
cplx green_single(const LadderSystem& sys, double t, double s, const ToleranceSpec& tol = {1e-11, 1e-13});

// Two-excitation Green's function: time-ordered chain of two L^dagger (at s1, s2) and two L
// (at t1, t2) with effective propagation in between. Equal times place L after L^dagger.
cplx green_two(const LadderSystem& sys, double t1, double t2, double s1, double s2,
               const ToleranceSpec& tol = {1e-11, 1e-13});

// S_k(nu) for k in [k_lo, k_hi] from the steady-state response to a drive at nu.
std::vector<cplx> oracle_sk_window(const LadderSystem& sys, double nu, int k_lo, int k_hi,
                                   const WindowSpec& window = {});
cplx oracle_sk(const LadderSystem& sys, double nu, int k, const WindowSpec& window = {});

// Equal-time correlation G_N(nu), N in {1, 2}, averaged over [t0, t0 + T].
double oracle_equal_time_gn(const LadderSystem& sys, double nu, int N, const WindowSpec& window = {},
                            double t0 = 0.0);

// Connected two-photon component routed through the two-excitation subspace, on a delta grid
// with omega_{1,2} = (nu1 + nu2 + k Omega +- delta) / 2.
std::vector<cplx> oracle_connected_s2(const LadderSystem& sys, int k, double nu1, double nu2,
                                      std::span<const double> delta_grid, const WindowSpec& window = {});

// Harmonics Psi_k of the equal-time two-photon output amplitude
// Psi(t) = int int G(t, t; s1, s2) exp(-i nu1 s1 - i nu2 s2) ds1 ds2 = sum_k Psi_k exp(-i (nu1 + nu2 + k Omega) t).
std::vector<cplx> oracle_equal_time_two_photon_harmonics(const LadderSystem& sys, double nu1, double nu2, int k_lo,
                                                         int k_hi, const WindowSpec& window = {});

}  // namespace floqsmat
