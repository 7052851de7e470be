#include "fixtures.hpp"
#include "oracles.hpp"

#include "floqsmat/errors.hpp"
#include "floqsmat/oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace floqsmat;
using namespace oracles;


TEST_CASE("single-excitation green function of the cavity") {
  const auto p = fixtures::kerr(0.0, 2.0, 1.5);
  const LadderSystem sys = build_kerr_cavity(p, 1);
  for (auto [t, s] : {std::pair{0.7, 0.1}, std::pair{5.0, 2.2}, std::pair{1.0, 1.0}}) {
    const double phase = p.delta0 / p.omega * (std::cos(p.omega * s) - std::cos(p.omega * t));
    const cplx ref = 0.5 * std::exp(-0.5 * (t - s) - I * phase);
    CHECK(std::abs(green_single(sys, t, s) - ref) < 1e-9);
  }
}

TEST_CASE("two-excitation green function of a linear cavity factorizes") {
  const auto p = fixtures::kerr(0.0, 2.0, 1.5);
  const LadderSystem sys = build_kerr_cavity(p, 2);
  const double times[][4] = {{1.2, 2.0, 0.3, 0.9}, {3.1, 1.7, 0.2, 1.1}, {2.5, 2.6, 1.4, 0.5}};
  for (const auto& tt : times) {
    const double t1 = tt[0], t2 = tt[1], s1 = tt[2], s2 = tt[3];
    const cplx ref = green_single(sys, t1, s1) * green_single(sys, t2, s2) +
                     green_single(sys, t1, s2) * green_single(sys, t2, s1);
    CHECK(std::abs(green_two(sys, t1, t2, s1, s2) - ref) < 1e-9);
  }
  CHECK(std::abs(green_two(sys, 1.0, 1.0, 1.0, 1.0) - 2.0 * 0.25) < 1e-12);
}

TEST_CASE("two-excitation green function vanishes when emission precedes absorption") {
  const auto p = fixtures::kerr(0.7, 2.0, 1.5);
  const LadderSystem sys = build_kerr_cavity(p, 2);
  CHECK(std::abs(green_two(sys, 0.1, 0.2, 1.0, 1.5)) == 0.0);
}

TEST_CASE("driven response of the static cavity is the Lorentzian amplitude") {
  const auto p = fixtures::kerr(0.0, 0.0, 1.0);
  const LadderSystem sys = build_kerr_cavity(p, 1);
  for (double nu : {-2.0, -0.3, 0.0, 0.8}) {
    const cplx ref = 0.5 / (0.5 - I * nu);
    CHECK(std::abs(oracle_sk(sys, nu, 0) - ref) < 1e-9);
    CHECK(std::abs(oracle_sk(sys, nu, 1)) < 1e-10);
  }
}

TEST_CASE("driven response of the modulated linear cavity matches the Bessel sum") {
  const auto p = fixtures::kerr(0.0, 3.0, 2.5);
  const LadderSystem sys = build_kerr_cavity(p, 1);
  for (double nu : {-1.9, 0.0, 1.3}) {
    const auto window = oracle_sk_window(sys, nu, -4, 4);
    for (int k = -4; k <= 4; ++k) {
      CHECK(std::abs(window[static_cast<std::size_t>(k + 4)] - linear_cavity_sk(p.delta0, p.omega, nu, k)) < 1e-8);
    }
  }
}

TEST_CASE("equal-time correlations of the static linear cavity") {
  const auto p = fixtures::kerr(0.0, 0.0, 1.0);
  const LadderSystem sys = build_kerr_cavity(p, 2);
  for (double nu : {-1.0, 0.0, 0.4}) {
    const double t = fixtures::lorentzian(nu);
    CHECK(std::abs(oracle_equal_time_gn(sys, nu, 1) - t) < 1e-9);
    CHECK(std::abs(oracle_equal_time_gn(sys, nu, 2) - 2.0 * t * t) < 1e-9);
  }
}

TEST_CASE("equal-time correlations do not depend on the averaging window start") {
  const auto p = fixtures::kerr(1.0, 3.0, 2.5);
  const LadderSystem sys = build_kerr_cavity(p, 2);
  for (int N : {1, 2}) {
    const double a = oracle_equal_time_gn(sys, 0.3, N, {}, 0.0);
    const double b = oracle_equal_time_gn(sys, 0.3, N, {}, 0.77);
    CHECK(std::abs(a - b) < 1e-10);
  }
}

TEST_CASE("too short a transient window is reported") {
  const auto p = fixtures::kerr(0.0, 3.0, 2.5);
  const LadderSystem sys = build_kerr_cavity(p, 1);
  WindowSpec w;
  w.max_span = 3.0;
  CHECK_THROWS_AS(oracle_sk(sys, 0.2, 0, w), TruncationError);
}
