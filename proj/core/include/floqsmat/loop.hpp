#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace floqsmat {

// A closed periodic trajectory p(t) in a real parameter space together with its
// geometric image: loop points equispaced in arc length, with unit tangents.
// The geometric data depend only on the image curve, its orientation and its start
// point p(0), never on how fast the curve is traversed.
class ParameterLoop {
 public:
  using Curve = std::function<Eigen::VectorXd(double t)>;

  static constexpr int kDefaultLoopPoints = 256;

  static ParameterLoop from_trajectory(double period, Curve position, Curve velocity,
                                       int n_points = kDefaultLoopPoints);

  // Closed curve through ordered `points` (periodic cubic interpolation in the point index).
  // `schedule` holds the traversed fraction u(t_i) in [0, 1) at equispaced times over one
  // period, starting at 0 and increasing; empty means uniform traversal.
  static ParameterLoop from_points(std::vector<Eigen::VectorXd> points, std::vector<double> schedule,
                                   double period, int n_points = kDefaultLoopPoints);

  static ParameterLoop constant(Eigen::VectorXd p0, double period, int n_points = kDefaultLoopPoints);

  int dim() const noexcept { return dim_; }
  double period() const noexcept { return period_; }
  double omega() const noexcept;

  Eigen::VectorXd position(double t) const { return position_(t); }
  Eigen::VectorXd velocity(double t) const { return velocity_(t); }

  const std::vector<Eigen::VectorXd>& loop_points() const noexcept { return points_; }
  const std::vector<Eigen::VectorXd>& tangents() const noexcept { return tangents_; }
  double length() const noexcept { return length_; }
  int n_points() const noexcept { return static_cast<int>(points_.size()); }

  double closure_error() const;

  // Same curve traversed backwards: p(T - t).
  ParameterLoop reversed() const;
  // Same traversal compressed or stretched onto a new period.
  ParameterLoop with_period(double new_period) const;
  // Time-shifted traversal p(t + t0) (start point moves along the curve).
  ParameterLoop shifted(double t0) const;

 private:
  ParameterLoop() = default;
  void resample(int n_points);

  int dim_ = 0;
  double period_ = 0.0;
  Curve position_;
  Curve velocity_;
  std::vector<Eigen::VectorXd> points_;
  std::vector<Eigen::VectorXd> tangents_;
  double length_ = 0.0;
};

// Ellipse p = c + a cos(theta) + b sin(theta) traversed with theta(tau) = tau + sum_j warp[j-1] sin(j tau),
// tau = 2 pi t / period. The warp must keep theta strictly increasing.
ParameterLoop ellipse_loop(const Eigen::VectorXd& center, const Eigen::VectorXd& axis_a, const Eigen::VectorXd& axis_b,
                           double period, std::vector<double> warp = {},
                           int n_points = ParameterLoop::kDefaultLoopPoints);

// Largest distance from a point of one loop-point set to the nearest point of the other.
double hausdorff_distance(const std::vector<Eigen::VectorXd>& a, const std::vector<Eigen::VectorXd>& b);

}  // namespace floqsmat
