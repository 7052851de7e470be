#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>

namespace floqsmat {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RowVector = Eigen::RowVectorXcd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

// Error control for the embedded Runge-Kutta propagator.
struct ToleranceSpec {
  double rtol = 1e-10;
  double atol = 1e-12;
};

}  // namespace floqsmat
