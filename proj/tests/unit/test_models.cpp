#include "fixtures.hpp"

#include "floqsmat/errors.hpp"
#include "floqsmat/models.hpp"

#include <doctest.h>

#include <cmath>

using namespace floqsmat;

TEST_CASE("kerr blocks") {
  const LadderSystem flat = build_kerr_cavity(fixtures::kerr(0.0, 0.0, 1.3), 2);
  CHECK(std::abs(flat.h_block(2, 0.7)(0, 0)) < 1e-15);
  CHECK(std::abs(flat.l_block(2)(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(flat.l_block(1)(0, 0) - std::sqrt(0.5)) < 1e-15);

  const LadderSystem sys = build_kerr_cavity(fixtures::kerr(0.5, 3.0, 2.5), 2);
  for (double t : {0.0, 0.3, 1.9}) {
    CHECK(std::abs(sys.h_block(2, t)(0, 0) - (6.0 * std::sin(2.5 * t) + 1.0)) < 1e-14);
    // Uniform modulation across the ladder.
    CHECK(std::abs((sys.h_block(2, t) - sys.h_block(2, 0.0))(0, 0) - 2.0 * 3.0 * std::sin(2.5 * t)) < 1e-14);
  }
  const LadderSystem one = build_kerr_cavity(fixtures::kerr(1.0, 3.0, 2.5), 1);
  CHECK(std::abs(one.h_block(1, pi / 5.0)(0, 0) - 3.0) < 1e-14);
  CHECK(std::abs(sys.h_eff(1, 0.0)(0, 0) - cplx(0.0, -0.5)) < 1e-15);
}

TEST_CASE("kerr parameter validation") {
  auto p = fixtures::kerr(0.5, 3.0, 2.5);
  p.kappa = 0.0;
  CHECK_THROWS_AS(build_kerr_cavity(p, 2), InvalidParameterError);
  p = fixtures::kerr(0.5, 3.0, -1.0);
  CHECK_THROWS_AS(build_kerr_cavity(p, 2), InvalidParameterError);
  p = fixtures::kerr(0.5, 3.0, 2.5);
  CHECK_THROWS_AS(build_kerr_cavity(p, 0), Error);
  p.table = {1.0, 1.0, 2.0, 1.0};
  CHECK_THROWS_AS(build_kerr_cavity(p, 2), InvalidParameterError);
}

TEST_CASE("tabulated waveform interpolates a zero-mean table") {
  auto p = fixtures::kerr(0.0, 0.0, 2.0);
  const int n = 64;
  for (int j = 0; j < n; ++j) p.table.push_back(1.5 * std::sin(2.0 * pi * j / n));
  const LadderSystem sys = build_kerr_cavity(p, 1);
  for (double t : {0.1, 0.77, 2.9}) CHECK(std::abs(sys.h_block(1, t)(0, 0) - 1.5 * std::sin(2.0 * t)) < 1e-5);
  const Waveform w = p.waveform();
  CHECK(std::abs(w.mean()) < 1e-14);
}

TEST_CASE("jaynes-cummings blocks") {
  const auto params = fixtures::jc_params();
  const LadderSystem sys = build_jaynes_cummings(params, cplx(0.5, 0.0), 2);
  Matrix ref(2, 2);
  ref << 0.0, 0.5, 0.5, cplx(0.0, -0.5);
  CHECK((sys.h_eff(1, 0.0) - ref).norm() < 1e-15);
  CHECK(sys.dim(1) == 2);
  CHECK(sys.dim(2) == 2);
  CHECK(sys.l_block(1).rows() == 1);
  CHECK(sys.l_block(2).rows() == 2);
  CHECK(std::abs(sys.l_block(2)(1, 1) - 1.0) < 1e-15);
  CHECK(std::abs(sys.h_block(2, 0.0)(0, 1) - std::sqrt(2.0) * 0.5) < 1e-15);
  CHECK_THROWS_AS(build_jaynes_cummings(params, cplx(0.5, 0.0), 3), UnsupportedDimensionError);

  const auto ev = Eigen::ComplexEigenSolver<Matrix>(sys.h_eff(1, 0.0)).eigenvalues();
  const cplx r = std::sqrt(cplx(0.25 - 1.0 / 16.0));
  const cplx a = cplx(0.0, -0.25) + r;
  const cplx b = cplx(0.0, -0.25) - r;
  CHECK(std::min(std::abs(ev[0] - a), std::abs(ev[0] - b)) < 1e-14);
  CHECK(std::min(std::abs(ev[1] - a), std::abs(ev[1] - b)) < 1e-14);

  const LadderSystem free = build_jaynes_cummings(params, cplx(0.0, 0.0), 1);
  const auto ev0 = Eigen::ComplexEigenSolver<Matrix>(free.h_eff(1, 0.0)).eigenvalues();
  CHECK(std::min(std::abs(ev0[0]), std::abs(ev0[1])) < 1e-15);
  CHECK(std::min(std::abs(ev0[0] - cplx(0, -0.5)), std::abs(ev0[1] - cplx(0, -0.5))) < 1e-15);
}

TEST_CASE("jaynes-cummings spectrum does not depend on the phase of g") {
  auto params = fixtures::jc_params();
  params.omega_e = 0.2;
  params.omega_c = -0.1;
  auto sorted = [](const Matrix& h) {
    Vector ev = Eigen::ComplexEigenSolver<Matrix>(h).eigenvalues();
    std::vector<cplx> v(ev.data(), ev.data() + ev.size());
    std::sort(v.begin(), v.end(), [](cplx x, cplx y) { return x.real() < y.real(); });
    return v;
  };
  for (int n : {1, 2}) {
    const auto ref = sorted(build_jaynes_cummings(params, cplx(0.4, 0.0), 2).h_eff(n, 0.0));
    for (double th : {0.7, 2.0, -1.3}) {
      const auto got = sorted(build_jaynes_cummings(params, 0.4 * std::exp(I * th), 2).h_eff(n, 0.0));
      for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(got[i] - ref[i]) < 1e-13);
    }
  }
}

TEST_CASE("ladder validation") {
  const auto flat = validate_ladder(build_kerr_cavity(fixtures::kerr(0.0, 0.0, 1.0), 2), 4);
  CHECK(flat.ok(1e-12));
  CHECK(flat.periodicity_deviation == 0.0);
  const auto mod = validate_ladder(build_kerr_cavity(fixtures::kerr(1.0, 3.0, 2.5), 3), 16);
  CHECK(mod.periodicity_deviation < 1e-10);
  CHECK(mod.ok());
  auto params = fixtures::jc_params();
  params.g_loop = fixtures::jc_loop(fixtures::Traversal::uniform, 7.0);
  const auto jc = validate_ladder(build_jaynes_cummings_modulated(params, 2), 8);
  CHECK(jc.commutator_deviation < 1e-14);
  CHECK(jc.number_conservation < 1e-14);
  CHECK(jc.ground_dim_ok);
  CHECK(jc.lowering_shapes_ok);
}

TEST_CASE("generic model from matrix samples") {
  const int n = 32;
  std::vector<std::vector<Matrix>> h(2);
  h[0] = {Matrix::Zero(1, 1)};
  for (int j = 0; j < n; ++j) {
    Matrix m(1, 1);
    m(0, 0) = 2.0 * std::cos(2.0 * pi * j / n);
    h[1].push_back(m);
  }
  Matrix l(1, 1);
  l(0, 0) = std::sqrt(0.5);
  const LadderSystem sys = build_generic(1.0, h, {l});
  CHECK(std::abs(sys.h_block(1, 0.5)(0, 0) - 2.0 * std::cos(0.5)) < 1e-4);
  CHECK(std::abs(sys.h_eff(1, 0.0)(0, 0) - cplx(2.0, -0.5)) < 1e-14);
  CHECK_FALSE(sys.time_independent());
}

TEST_CASE("analytic kerr floquet data") {
  const auto a = kerr_analytic_floquet(fixtures::kerr(0.5, 3.0, 2.5), 2);
  CHECK(std::abs(a.quasi_energy(0) - cplx(1.0, -1.0)) < 1e-15);
  const auto b = kerr_analytic_floquet(fixtures::kerr(0.0, 0.0, 2.5), 1);
  CHECK(std::abs(b.quasi_energy(0) - cplx(0.0, -0.5)) < 1e-15);
  for (double delta0 : {0.0, 1.0, 4.0}) {
    for (int n : {1, 2, 3}) {
      CHECK(kerr_analytic_floquet(fixtures::kerr(0.3, delta0, 1.7), n).lambdas[0].imag() == -0.5 * n);
    }
  }
  // Fourier coefficients of exp(-i phi(t)) by trapezoidal quadrature.
  const auto p = fixtures::kerr(0.5, 3.0, 2.5);
  const auto c = kerr_analytic_floquet(p, 1);
  const int M = 512;
  for (int k = -6; k <= 6; ++k) {
    cplx acc = 0.0;
    for (int j = 0; j < M; ++j) {
      const double t = c.period() * j / M;
      acc += std::exp(-I * (p.delta0 / p.omega) * (1.0 - std::cos(p.omega * t))) * std::exp(I * (k * p.omega * t));
    }
    acc /= static_cast<double>(M);
    const int m = k - c.harmonic_shift[0];
    CHECK(std::abs(c.right(m)(0, 0) - acc) < 1e-12);
  }
}

TEST_CASE("parametric families and their derivatives") {
  const auto fam = jaynes_cummings_family(fixtures::jc_params(), 2);
  const std::vector<double> p{0.3, -0.2};
  for (int n : {1, 2}) {
    for (int j = 0; j < 2; ++j) {
      std::vector<double> a = p;
      std::vector<double> b = p;
      a[j] += 1e-6;
      b[j] -= 1e-6;
      const Matrix fd = (fam.h_block(n, a) - fam.h_block(n, b)) / 2e-6;
      CHECK((fd - fam.dh_block(n, j, p)).norm() < 1e-9);
    }
  }
  const auto kf = kerr_family(1.0, 0.5, 2);
  const std::vector<double> q{0.4};
  CHECK(std::abs(kf.dh_block(2, 0, q)(0, 0) - 2.0) < 1e-15);
  const ParametricFamily bare(1, {1, 1}, [](int n, std::span<const double> x) {
    Matrix m = Matrix::Zero(1, 1);
    if (n > 0) m(0, 0) = x[0] * x[0];
    return m;
  }, {Matrix::Constant(1, 1, 0.5)});
  CHECK_THROWS_AS(bare.dh_block(1, 0, q), DerivativeUnavailableError);
  const auto approx = bare.with_finite_difference_derivatives();
  CHECK(approx.derivatives_are_approximate());
  CHECK(std::abs(approx.dh_block(1, 0, q)(0, 0) - 0.8) < 1e-8);
}

TEST_CASE("fingerprints separate different systems") {
  const auto a = build_kerr_cavity(fixtures::kerr(0.5, 3.0, 2.5), 2).fingerprint();
  const auto b = build_kerr_cavity(fixtures::kerr(0.5, 3.0, 2.5), 2).fingerprint();
  const auto c = build_kerr_cavity(fixtures::kerr(0.6, 3.0, 2.5), 2).fingerprint();
  CHECK(a == b);
  CHECK(a != c);
  CHECK(fnv1a("") == 14695981039346656037ull);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
}
