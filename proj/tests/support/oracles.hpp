#pragma once

#include "floqsmat/models.hpp"
#include "floqsmat/smatrix.hpp"
#include "floqsmat/types.hpp"

#include <cmath>
#include <span>
#include <vector>

// Reference constructions used by the unit and acceptance tests. None of them goes through the
// library's own assembly path for the quantity being checked.
namespace oracles {

using namespace floqsmat;

// exp(-i z (1 - cos w t)) = sum_a A_a exp(-i a w t)
inline cplx bessel_a(int a, double z) {
  const double j = a >= 0 ? std::cyl_bessel_j(a, z) : ((-a) % 2 ? -1.0 : 1.0) * std::cyl_bessel_j(-a, z);
  return std::exp(-I * z) * std::pow(I, a) * j;
}

// Linear modulated cavity: S_k(nu) = (kappa/2) sum_b A_{k+b} conj(A_b) / (kappa/2 - i (nu - b w)).
inline cplx linear_cavity_sk(double delta0, double omega, double nu, int k) {
  const double z = delta0 / omega;
  const int span = 40 + static_cast<int>(2.0 * z);
  cplx s = 0.0;
  for (int b = -span; b <= span; ++b) s += bessel_a(k + b, z) * std::conj(bessel_a(b, z)) / (0.5 - I * (nu - b * omega));
  return 0.5 * s;
}

inline std::span<const double> as_span(const Eigen::VectorXd& p) {
  return {p.data(), static_cast<std::size_t>(p.size())};
}

// Literal pole form of the single-resolvent connected term,
//   (1 / 2 pi i) sum_{P,Q} sum_n S_{k-n}(w_P1 - (k-n) W) S_n(nu_Q2) / (w_P2 - nu_Q2 - n W),
// which is singular wherever a denominator vanishes.
inline cplx pole_form(const ScatteringSetup& s, int k, double nu1, double nu2, double delta) {
  const double W = s.omega();
  const OutputPair w = output_frequencies(nu1, nu2, k, W, delta);
  const double ws[2] = {w.omega1, w.omega2};
  const double ns[2] = {nu1, nu2};
  const int span = 2 * s.cutoff();
  cplx acc = 0.0;
  for (int p = 0; p < 2; ++p) {
    for (int q = 0; q < 2; ++q) {
      const double wp1 = ws[p];
      const double wp2 = ws[1 - p];
      const double nq2 = ns[1 - q];
      for (int n = -span; n <= span; ++n) {
        const int kn = k - n;
        if (std::abs(kn) > span) continue;
        acc += single_photon_sk(s.c10, s.dec1, wp1 - kn * W, kn) * single_photon_sk(s.c10, s.dec1, nq2, n) /
               (wp2 - nq2 - n * W);
      }
    }
  }
  return acc / (2.0 * pi * I);
}

// Symmetric average over delta +- eta, Richardson-extrapolated eta -> 0 (the error is even in eta).
inline cplx principal_value(const ScatteringSetup& s, int k, double nu1, double nu2, double delta) {
  const auto avg = [&](double eta) {
    return 0.5 * (pole_form(s, k, nu1, nu2, delta + eta) + pole_form(s, k, nu1, nu2, delta - eta));
  };
  const double eta = 2e-3;
  const cplx a = avg(eta);
  const cplx b = avg(eta / 2);
  const cplx c = avg(eta / 4);
  const cplx r1 = (4.0 * b - a) / 3.0;
  const cplx r2 = (4.0 * c - b) / 3.0;
  return (16.0 * r2 - r1) / 15.0;
}

// Chain vectors v_0 = |g>, v_n = (H_eff^n - n nu)^{-1} L^dag v_{n-1}, with plain inverses.
inline std::vector<Vector> chain(const ParametricFamily& fam, const Eigen::VectorXd& p, double nu, int N) {
  std::vector<Vector> v{Vector::Ones(1)};
  for (int n = 1; n <= N; ++n) {
    Matrix a = fam.h_eff(n, as_span(p));
    a.diagonal().array() -= n * nu;
    v.push_back(a.inverse() * fam.l_block(n).adjoint() * v.back());
  }
  return v;
}

// First-order amplitude (-i)^(N-1) sum_k b_k R_k dv_k / dp_j with dv_k from central differences.
inline Vector fd_first_order(const ParametricFamily& fam, const Eigen::VectorXd& p, double nu, int N, double h) {
  std::vector<Matrix> R;
  for (int n = 1; n <= N; ++n) {
    Matrix a = fam.h_eff(n, as_span(p));
    a.diagonal().array() -= n * nu;
    R.push_back(a.inverse());
  }
  std::vector<RowVector> b(static_cast<std::size_t>(N) + 1);
  RowVector w = RowVector::Ones(1);
  for (int n = 1; n <= N; ++n) w = w * fam.l_block(n);
  b[N] = w;
  for (int k = N - 1; k >= 1; --k) b[k] = b[k + 1] * R[k] * fam.l_block(k + 1).adjoint();
  cplx phase = 1.0;
  for (int i = 0; i < N - 1; ++i) phase *= -I;
  Vector g(p.size());
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    Eigen::VectorXd pa = p;
    Eigen::VectorXd pb = p;
    pa[j] += h;
    pb[j] -= h;
    const auto va = chain(fam, pa, nu, N);
    const auto vb = chain(fam, pb, nu, N);
    cplx acc = 0.0;
    for (int k = 1; k <= N; ++k) acc += (b[k] * R[k - 1] * (va[k] - vb[k]) / (2.0 * h))(0);
    g[j] = phase * acc;
  }
  return g;
}

}  // namespace oracles
