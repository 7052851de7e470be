#pragma once

#include "floqsmat/loop.hpp"
#include "floqsmat/models.hpp"
#include "floqsmat/types.hpp"

#include <cmath>
#include <vector>

namespace fixtures {

using floqsmat::cplx;

inline floqsmat::KerrCavityParams kerr(double chi, double delta0, double omega) {
  floqsmat::KerrCavityParams p;
  p.kappa = 1.0;
  p.chi = chi;
  p.delta0 = delta0;
  p.omega = omega;
  return p;
}

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

// Coupling loop g(theta) = 0.15 + 0.5 exp(i theta) in the (Re g, Im g) plane, theta = tau + warp(tau).
enum class Traversal { uniform, warped_once, warped_twice };

inline double traversal_theta(Traversal tr, double tau, double& dtheta) {
  switch (tr) {
    case Traversal::uniform:
      dtheta = 1.0;
      return tau;
    case Traversal::warped_once:
      dtheta = 1.0 + 0.5 * std::cos(tau);
      return tau + 0.5 * std::sin(tau);
    case Traversal::warped_twice:
      dtheta = 1.0 - 0.6 * std::cos(2.0 * tau);
      return tau - 0.3 * std::sin(2.0 * tau);
  }
  return tau;
}

inline floqsmat::ParameterLoop jc_loop(Traversal tr, double period = 2.0 * floqsmat::pi) {
  const double w = 2.0 * floqsmat::pi / period;
  auto pos = [tr, w](double t) {
    double d = 0.0;
    const double th = traversal_theta(tr, w * t, d);
    Eigen::VectorXd p(2);
    p << 0.15 + 0.5 * std::cos(th), 0.5 * std::sin(th);
    return p;
  };
  auto vel = [tr, w](double t) {
    double d = 0.0;
    const double th = traversal_theta(tr, w * t, d);
    Eigen::VectorXd v(2);
    v << -0.5 * std::sin(th) * d * w, 0.5 * std::cos(th) * d * w;
    return v;
  };
  return floqsmat::ParameterLoop::from_trajectory(period, pos, vel);
}

inline floqsmat::JaynesCummingsParams jc_params() {
  floqsmat::JaynesCummingsParams p;
  p.omega_e = 0.0;
  p.omega_c = 0.0;
  p.kappa = 1.0;
  return p;
}

inline double relative_l2(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

// Lorentzian transmission of the bare cavity with L = sqrt(kappa / 2) a.
inline double lorentzian(double nu, double kappa = 1.0) {
  const double h = kappa / 2.0;
  return h * h / (nu * nu + h * h);
}

}  // namespace fixtures
