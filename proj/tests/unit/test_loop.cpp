#include "fixtures.hpp"

#include "floqsmat/errors.hpp"
#include "floqsmat/loop.hpp"

#include <doctest.h>

#include <cmath>

using namespace floqsmat;
using fixtures::Traversal;

TEST_CASE("loop points do not depend on the traversal") {
  const auto a = fixtures::jc_loop(Traversal::uniform);
  const auto b = fixtures::jc_loop(Traversal::warped_once, 3.0);
  const auto c = fixtures::jc_loop(Traversal::warped_twice, 11.0);
  CHECK(a.n_points() == 256);
  CHECK(std::abs(a.length() - pi) < 1e-10);
  CHECK(std::abs(b.length() - a.length()) < 1e-10);
  for (int j = 0; j < a.n_points(); ++j) {
    CHECK((a.loop_points()[j] - b.loop_points()[j]).norm() < 1e-10);
    CHECK((a.loop_points()[j] - c.loop_points()[j]).norm() < 1e-10);
    CHECK((a.tangents()[j] - c.tangents()[j]).norm() < 1e-8);
  }
  CHECK(hausdorff_distance(a.loop_points(), c.loop_points()) < 1e-10);
  CHECK(a.closure_error() < 1e-12);
}

TEST_CASE("arc-length points are equally spaced on the circle") {
  const auto a = fixtures::jc_loop(Traversal::warped_twice);
  const double ds = a.length() / a.n_points();
  for (int j = 0; j < a.n_points(); ++j) {
    const auto& p = a.loop_points()[j];
    const auto& q = a.loop_points()[(j + 1) % a.n_points()];
    // chord of an arc of length ds on a circle of radius 0.5
    CHECK(std::abs((q - p).norm() - 2.0 * 0.5 * std::sin(ds / (2.0 * 0.5))) < 1e-10);
    CHECK(std::abs(a.tangents()[j].norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("reversal, rescaling and shifting") {
  const auto a = fixtures::jc_loop(Traversal::warped_once, 5.0);
  const auto r = a.reversed();
  CHECK((r.position(1.0) - a.position(4.0)).norm() < 1e-14);
  CHECK((r.velocity(1.0) + a.velocity(4.0)).norm() < 1e-14);
  const auto s = a.with_period(10.0);
  CHECK((s.position(3.0) - a.position(1.5)).norm() < 1e-14);
  CHECK((s.velocity(3.0) - 0.5 * a.velocity(1.5)).norm() < 1e-14);
  const auto sh = a.shifted(0.7);
  CHECK((sh.position(0.2) - a.position(0.9)).norm() < 1e-14);
  CHECK(hausdorff_distance(sh.loop_points(), a.loop_points()) < 1e-2);
}

TEST_CASE("constant and point loops") {
  Eigen::VectorXd p0(2);
  p0 << 0.3, 0.1;
  const auto c = ParameterLoop::constant(p0, 2.0);
  CHECK(c.length() == 0.0);
  CHECK((c.position(0.7) - p0).norm() == 0.0);

  std::vector<Eigen::VectorXd> pts;
  for (int j = 0; j < 48; ++j) {
    Eigen::VectorXd p(2);
    const double th = 2.0 * pi * j / 48;
    p << std::cos(th), std::sin(th);
    pts.push_back(p);
  }
  const auto loop = ParameterLoop::from_points(pts, {}, 4.0);
  CHECK(std::abs(loop.length() - 2.0 * pi) < 1e-4);
  CHECK(loop.closure_error() < 1e-12);
  std::vector<double> schedule;
  for (int j = 0; j < 16; ++j) {
    const double u = static_cast<double>(j) / 16;
    schedule.push_back(u + 0.05 * std::sin(2.0 * pi * u));
  }
  const auto warped = ParameterLoop::from_points(pts, schedule, 4.0);
  CHECK(hausdorff_distance(warped.loop_points(), loop.loop_points()) < 1e-10);
  CHECK(warped.velocity(0.0).norm() > loop.velocity(0.0).norm());
  CHECK_THROWS_AS(ParameterLoop::from_points({pts[0], pts[1]}, {}, 1.0), InvalidParameterError);
}

TEST_CASE("ellipse loop with a traversal warp") {
  Eigen::VectorXd c(2), a(2), b(2);
  c << 0.15, 0.0;
  a << 0.5, 0.0;
  b << 0.0, 0.5;
  const auto e = ellipse_loop(c, a, b, 2.0 * pi, {0.5});
  const auto f = fixtures::jc_loop(Traversal::warped_once);
  for (double t : {0.0, 0.4, 2.2, 5.9}) {
    CHECK((e.position(t) - f.position(t)).norm() < 1e-14);
    CHECK((e.velocity(t) - f.velocity(t)).norm() < 1e-14);
  }
  CHECK_THROWS_AS(ellipse_loop(c, a, b, 1.0, {1.2}), InvalidParameterError);
}
