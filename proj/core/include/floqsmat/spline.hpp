#pragma once

#include "floqsmat/errors.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace floqsmat {

// Periodic cubic spline through equispaced samples y_j = f(j * period / N).
// Works for real or complex sample types.
template <class T>
class PeriodicCubicSpline {
 public:
  PeriodicCubicSpline() = default;

  PeriodicCubicSpline(std::vector<T> samples, double period)
      : y_(std::move(samples)), period_(period) {
    if (y_.empty()) throw InvalidParameterError("periodic spline: no samples");
    if (!(period_ > 0.0)) throw InvalidParameterError("periodic spline: period must be positive");
    h_ = period_ / static_cast<double>(y_.size());
    solve_curvatures();
    piece_integral_.resize(y_.size());
    total_ = T{};
    for (std::size_t i = 0; i < y_.size(); ++i) {
      piece_integral_[i] = total_;
      total_ += local_integral(i, h_);
    }
  }

  std::size_t size() const noexcept { return y_.size(); }
  double period() const noexcept { return period_; }
  const std::vector<T>& samples() const noexcept { return y_; }

  T operator()(double t) const {
    const auto [i, s] = locate(t);
    const T b = slope(i);
    const T dm = m_[next(i)] - m_[i];
    return y_[i] + s * (b + s * (m_[i] / 2.0 + s * dm / (6.0 * h_)));
  }

  T derivative(double t) const {
    const auto [i, s] = locate(t);
    const T dm = m_[next(i)] - m_[i];
    return slope(i) + s * (m_[i] + s * dm / (2.0 * h_));
  }

  // Integral of the spline from 0 to t (any real t).
  T integral(double t) const {
    const double wraps = std::floor(t / period_);
    const auto [i, s] = locate(t);
    return wraps * total_ + piece_integral_[i] + local_integral(i, s);
  }

  // Integral over one full period; equals h * sum(y) for a periodic spline.
  T period_integral() const noexcept { return total_; }

 private:
  std::pair<std::size_t, double> locate(double t) const {
    double r = std::fmod(t, period_);
    if (r < 0.0) r += period_;
    auto i = static_cast<std::size_t>(r / h_);
    if (i >= y_.size()) i = y_.size() - 1;
    return {i, r - static_cast<double>(i) * h_};
  }

  std::size_t next(std::size_t i) const noexcept { return i + 1 == y_.size() ? 0 : i + 1; }

  T slope(std::size_t i) const {
    return (y_[next(i)] - y_[i]) / h_ - h_ * (2.0 * m_[i] + m_[next(i)]) / 6.0;
  }

  T local_integral(std::size_t i, double s) const {
    const T dm = m_[next(i)] - m_[i];
    return s * (y_[i] + s * (slope(i) / 2.0 + s * (m_[i] / 6.0 + s * dm / (24.0 * h_))));
  }

  // Second derivatives from the cyclic system m_{i-1} + 4 m_i + m_{i+1} = rhs_i.
  void solve_curvatures() {
    const std::size_t n = y_.size();
    m_.assign(n, T{});
    if (n < 3) return;  // one or two knots: the periodic interpolant is piecewise linear/constant
    std::vector<T> rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
      const T& prev = y_[(i + n - 1) % n];
      rhs[i] = 6.0 / (h_ * h_) * (y_[(i + 1) % n] - 2.0 * y_[i] + prev);
    }
    // Sherman-Morrison on top of the Thomas algorithm for the two corner entries.
    const double gamma = -4.0;
    std::vector<double> diag(n, 4.0);
    diag[0] = 4.0 - gamma;
    diag[n - 1] = 4.0 - 1.0 / gamma;
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = 1.0;
    const auto thomas = [&](std::vector<T>& x) {
      std::vector<double> c(n, 0.0);
      std::vector<T> d = x;
      c[0] = 1.0 / diag[0];
      d[0] = d[0] / diag[0];
      for (std::size_t i = 1; i < n; ++i) {
        const double w = diag[i] - c[i - 1];
        c[i] = 1.0 / w;
        d[i] = (d[i] - d[i - 1]) / w;
      }
      for (std::size_t i = n - 1; i-- > 0;) d[i] = d[i] - c[i] * d[i + 1];
      x = std::move(d);
    };
    std::vector<T> y = rhs;
    thomas(y);
    std::vector<T> z(u.begin(), u.end());
    thomas(z);
    const T factor = (y[0] + y[n - 1] / gamma) / (1.0 + z[0] + z[n - 1] / gamma);
    for (std::size_t i = 0; i < n; ++i) m_[i] = y[i] - factor * z[i];
  }

  std::vector<T> y_;
  std::vector<T> m_;
  std::vector<T> piece_integral_;
  T total_{};
  double period_ = 1.0;
  double h_ = 1.0;
};

}  // namespace floqsmat
