#include "floqsmat/loop.hpp"

#include "floqsmat/errors.hpp"
#include "floqsmat/spline.hpp"
#include "floqsmat/types.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace floqsmat {

namespace {

constexpr int kArcSegments = 1024;

double segment_length(const ParameterLoop::Curve& velocity, double a, double b) {
  auto speed = [&](double t) { return velocity(t).norm(); };
  return boost::math::quadrature::gauss_kronrod<double, 21>::integrate(speed, a, b, 6, 1e-12);
}

}  // namespace

ParameterLoop ParameterLoop::from_trajectory(double period, Curve position, Curve velocity, int n_points) {
  if (!(period > 0.0)) throw InvalidParameterError("loop period must be positive");
  if (n_points < 1) throw InvalidParameterError("loop needs at least one discretization point");
  if (!position || !velocity) throw InvalidParameterError("loop needs position and velocity evaluators");
  ParameterLoop loop;
  loop.period_ = period;
  loop.position_ = std::move(position);
  loop.velocity_ = std::move(velocity);
  loop.dim_ = static_cast<int>(loop.position_(0.0).size());
  const double scale = 1.0 + loop.position_(0.0).norm();
  if (loop.closure_error() > 1e-9 * scale) {
    throw InvalidParameterError("trajectory is not closed: |p(T) - p(0)| too large");
  }
  loop.resample(n_points);
  return loop;
}

ParameterLoop ParameterLoop::constant(Eigen::VectorXd p0, double period, int n_points) {
  auto pos = [p0](double) { return p0; };
  auto vel = [d = p0.size()](double) { return Eigen::VectorXd::Zero(d).eval(); };
  return from_trajectory(period, pos, vel, n_points);
}

ParameterLoop ParameterLoop::from_points(std::vector<Eigen::VectorXd> points, std::vector<double> schedule,
                                         double period, int n_points) {
  if (points.size() < 3) throw InvalidParameterError("point loop needs at least three points");
  const auto dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) throw InvalidParameterError("point loop: inconsistent point dimensions");
  }
  if (!(period > 0.0)) throw InvalidParameterError("loop period must be positive");

  auto coords = std::make_shared<std::vector<PeriodicCubicSpline<double>>>();
  for (Eigen::Index d = 0; d < dim; ++d) {
    std::vector<double> ys;
    ys.reserve(points.size());
    for (const auto& p : points) ys.push_back(p[d]);
    coords->emplace_back(std::move(ys), 1.0);
  }

  // u(t) = t/T + w(t) with w periodic; the schedule fixes w at equispaced times.
  std::shared_ptr<PeriodicCubicSpline<double>> warp;
  if (!schedule.empty()) {
    if (schedule.front() != 0.0) throw InvalidParameterError("traversal schedule must start at 0");
    for (std::size_t i = 1; i < schedule.size(); ++i) {
      if (!(schedule[i] > schedule[i - 1]) || schedule[i] >= 1.0) {
        throw InvalidParameterError("traversal schedule must increase strictly within [0, 1)");
      }
    }
    std::vector<double> w(schedule.size());
    const double ns = static_cast<double>(schedule.size());
    for (std::size_t i = 0; i < schedule.size(); ++i) w[i] = schedule[i] - static_cast<double>(i) / ns;
    warp = std::make_shared<PeriodicCubicSpline<double>>(std::move(w), period);
  }

  auto u_of = [warp, period](double t) { return t / period + (warp ? (*warp)(t) : 0.0); };
  auto du_of = [warp, period](double t) { return 1.0 / period + (warp ? warp->derivative(t) : 0.0); };
  auto pos = [coords, u_of](double t) {
    const double u = u_of(t);
    Eigen::VectorXd p(static_cast<Eigen::Index>(coords->size()));
    for (std::size_t d = 0; d < coords->size(); ++d) p[static_cast<Eigen::Index>(d)] = (*coords)[d](u);
    return p;
  };
  auto vel = [coords, u_of, du_of](double t) {
    const double u = u_of(t);
    const double du = du_of(t);
    Eigen::VectorXd v(static_cast<Eigen::Index>(coords->size()));
    for (std::size_t d = 0; d < coords->size(); ++d) v[static_cast<Eigen::Index>(d)] = (*coords)[d].derivative(u) * du;
    return v;
  };
  for (int j = 0; j < 64; ++j) {
    if (!(du_of(j * period / 64.0) > 0.0)) {
      throw InvalidParameterError("traversal schedule interpolates to a non-monotone u(t)");
    }
  }
  return from_trajectory(period, pos, vel, n_points);
}

double ParameterLoop::omega() const noexcept { return 2.0 * pi / period_; }

double ParameterLoop::closure_error() const { return (position_(period_) - position_(0.0)).norm(); }

void ParameterLoop::resample(int n_points) {
  std::vector<double> cumulative(kArcSegments + 1, 0.0);
  const double h = period_ / kArcSegments;
  for (int i = 0; i < kArcSegments; ++i) {
    cumulative[i + 1] = cumulative[i] + segment_length(velocity_, i * h, (i + 1) * h);
  }
  length_ = cumulative.back();
  points_.clear();
  tangents_.clear();

  const double scale = 1.0 + position_(0.0).norm();
  if (length_ <= 1e-12 * scale) {
    length_ = 0.0;
    points_.assign(static_cast<std::size_t>(n_points), position_(0.0));
    tangents_.assign(static_cast<std::size_t>(n_points), Eigen::VectorXd::Zero(dim_));
    return;
  }

  for (int j = 0; j < n_points; ++j) {
    const double target = length_ * j / n_points;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    int i = static_cast<int>(std::distance(cumulative.begin(), it)) - 1;
    i = std::clamp(i, 0, kArcSegments - 1);
    const double a = i * h;
    double lo = a;
    double hi = (i + 1) * h;
    double t = a + h * (target - cumulative[i]) / std::max(cumulative[i + 1] - cumulative[i], 1e-300);
    // Safeguarded Newton on s(t) = target within the bracketing segment.
    for (int iter = 0; iter < 60; ++iter) {
      const double f = cumulative[i] + segment_length(velocity_, a, t) - target;
      if (std::abs(f) <= 1e-15 * length_) break;
      if (f > 0.0) {
        hi = t;
      } else {
        lo = t;
      }
      const double speed = velocity_(t).norm();
      double next = speed > 0.0 ? t - f / speed : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - t) <= 1e-16 * period_) {
        t = next;
        break;
      }
      t = next;
    }
    points_.push_back(position_(t));
    const Eigen::VectorXd v = velocity_(t);
    const double speed = v.norm();
    tangents_.push_back(speed > 0.0 ? Eigen::VectorXd(v / speed) : Eigen::VectorXd::Zero(dim_));
  }
}

ParameterLoop ParameterLoop::reversed() const {
  const double T = period_;
  auto pos = [p = position_, T](double t) { return p(T - t); };
  auto vel = [v = velocity_, T](double t) { return Eigen::VectorXd(-v(T - t)); };
  return from_trajectory(T, pos, vel, n_points());
}

ParameterLoop ParameterLoop::with_period(double new_period) const {
  if (!(new_period > 0.0)) throw InvalidParameterError("loop period must be positive");
  const double r = period_ / new_period;
  auto pos = [p = position_, r](double t) { return p(t * r); };
  auto vel = [v = velocity_, r](double t) { return Eigen::VectorXd(v(t * r) * r); };
  return from_trajectory(new_period, pos, vel, n_points());
}

ParameterLoop ParameterLoop::shifted(double t0) const {
  auto pos = [p = position_, t0](double t) { return p(t + t0); };
  auto vel = [v = velocity_, t0](double t) { return v(t + t0); };
  return from_trajectory(period_, pos, vel, n_points());
}

double hausdorff_distance(const std::vector<Eigen::VectorXd>& a, const std::vector<Eigen::VectorXd>& b) {
  const auto directed = [](const std::vector<Eigen::VectorXd>& x, const std::vector<Eigen::VectorXd>& y) {
    double worst = 0.0;
    for (const auto& p : x) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : y) best = std::min(best, (p - q).norm());
      worst = std::max(worst, best);
    }
    return worst;
  };
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  return std::max(directed(a, b), directed(b, a));
}

ParameterLoop ellipse_loop(const Eigen::VectorXd& center, const Eigen::VectorXd& axis_a, const Eigen::VectorXd& axis_b,
                           double period, std::vector<double> warp, int n_points) {
  if (center.size() != axis_a.size() || center.size() != axis_b.size()) {
    throw InvalidParameterError("ellipse loop: center and axes differ in dimension");
  }
  if (!(period > 0.0)) throw InvalidParameterError("loop period must be positive");
  double bound = 0.0;
  for (std::size_t j = 0; j < warp.size(); ++j) bound += static_cast<double>(j + 1) * std::abs(warp[j]);
  if (!(bound < 1.0)) throw InvalidParameterError("ellipse loop: warp does not keep the traversal monotone");
  const double w = 2.0 * pi / period;
  auto theta = [warp, w](double t, double& dtheta) {
    const double tau = w * t;
    double th = tau;
    double d = 1.0;
    for (std::size_t j = 0; j < warp.size(); ++j) {
      const double m = static_cast<double>(j + 1);
      th += warp[j] * std::sin(m * tau);
      d += warp[j] * m * std::cos(m * tau);
    }
    dtheta = d * w;
    return th;
  };
  auto pos = [=](double t) {
    double d = 0.0;
    const double th = theta(t, d);
    return (center + axis_a * std::cos(th) + axis_b * std::sin(th)).eval();
  };
  auto vel = [=](double t) {
    double d = 0.0;
    const double th = theta(t, d);
    return ((-axis_a * std::sin(th) + axis_b * std::cos(th)) * d).eval();
  };
  return ParameterLoop::from_trajectory(period, pos, vel, n_points);
}

}  // namespace floqsmat
