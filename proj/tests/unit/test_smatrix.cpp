#include "fixtures.hpp"
#include "oracles.hpp"

#include "floqsmat/errors.hpp"
#include "floqsmat/oracle.hpp"
#include "floqsmat/smatrix.hpp"

#include <boost/math/quadrature/sinh_sinh.hpp>
#include <doctest.h>

#include <cmath>
#include <map>

using namespace floqsmat;
using namespace oracles;

namespace {

ScatteringSetup kerr_setup(double chi, double delta0, double omega, int max_exc) {
  return prepare_scattering(build_kerr_cavity(fixtures::kerr(chi, delta0, omega), max_exc), max_exc);
}

}  // namespace

TEST_CASE("static cavity transmission is the Lorentzian") {
  const auto s = kerr_setup(0.7, 0.0, 1.0, 1);
  TransmissionRequest req;
  req.nu_grid = fixtures::linspace(-6.0, 6.0, 121);
  const auto spectrum_out = transmission(s, req);
  for (std::size_t i = 0; i < spectrum_out.nu_grid.size(); ++i) {
    const double nu = spectrum_out.nu_grid[i];
    CHECK(std::abs(spectrum_out.total[i] - fixtures::lorentzian(nu)) < 1e-10);
    CHECK(std::abs(spectrum_out.s(i, 0) - 0.5 / (0.5 - I * nu)) < 1e-10);
    for (int k = spectrum_out.k_min; k <= spectrum_out.k_max; ++k) {
      if (k != 0) CHECK(std::abs(spectrum_out.s(i, k)) <= 1e-12);
    }
  }
}

TEST_CASE("coupling blocks of the modulated cavity are scaled Bessel coefficients") {
  const auto s = kerr_setup(0.0, 3.0, 2.5, 1);
  // Gauge-invariant products down_{k+m} up_m, compared with (1/2) alpha_{k+m} conj(alpha_m).
  for (int k : {-2, 0, 1, 3}) {
    for (int m : {-2, 0, 2}) {
      const cplx num = s.c10.l_down(k + m)(0, 0) * s.c10.l_up(m)(0, 0);
      const int sh = s.dec1.harmonic_shift[0];
      const cplx ref = 0.5 * bessel_a(k + m + sh, 1.2) * std::conj(bessel_a(m + sh, 1.2));
      CHECK(std::abs(num - ref) < 1e-9);
    }
  }
}

TEST_CASE("single-photon amplitudes agree with the driven time-domain response") {
  for (double omega : {10.0, 2.5}) {
    const auto s = kerr_setup(0.0, 3.0, omega, 1);
    const LadderSystem sys = build_kerr_cavity(fixtures::kerr(0.0, 3.0, omega), 1);
    std::vector<cplx> a;
    std::vector<cplx> b;
    for (double nu : {-3.0, -0.4, 0.0, 1.7}) {
      const auto ref = oracle_sk_window(sys, nu, -4, 4);
      for (int k = -4; k <= 4; ++k) {
        a.push_back(single_photon_sk(s.c10, s.dec1, nu, k));
        b.push_back(ref[static_cast<std::size_t>(k + 4)]);
      }
    }
    CHECK(fixtures::relative_l2(a, b) < 1e-6);
  }
}

TEST_CASE("transmission is bounded and independent of the reference time") {
  const auto s = kerr_setup(0.5, 3.0, 2.5, 1);
  TransmissionRequest req;
  req.nu_grid = fixtures::linspace(-6.0, 6.0, 61);
  const auto spectrum_out = transmission(s, req);
  for (double t : spectrum_out.total) CHECK(t <= 1.0 + 1e-6);
  for (double t0 : {0.31, 1.7, -2.2}) {
    const auto moved = spectrum_out.with_reference_time(t0);
    const auto back = moved.with_reference_time(0.0);
    for (std::size_t i = 0; i < spectrum_out.nu_grid.size(); ++i) {
      double total = 0.0;
      for (int k = spectrum_out.k_min; k <= spectrum_out.k_max; ++k) total += std::norm(moved.s(i, k));
      CHECK(std::abs(total - spectrum_out.total[i]) < 1e-10);
      for (int k = spectrum_out.k_min; k <= spectrum_out.k_max; ++k) CHECK(std::abs(back.s(i, k) - spectrum_out.s(i, k)) < 1e-14);
    }
  }
}

TEST_CASE("threaded sweeps reproduce the serial result bit for bit") {
  const auto s = kerr_setup(0.5, 3.0, 2.5, 2);
  const auto grid = fixtures::linspace(-4.0, 4.0, 37);
  const auto a = sideband_spectrum(s, grid, 6, 1);
  const auto b = sideband_spectrum(s, grid, 6, 3);
  CHECK((a.amplitudes - b.amplitudes).norm() == 0.0);
  const auto d = fixtures::linspace(-8.0, 8.0, 41);
  const auto c1 = two_photon_connected(s, 1, 0.0, 0.0, d, 1);
  const auto c3 = two_photon_connected(s, 1, 0.0, 0.0, d, 3);
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(c1.value(i) == c3.value(i));
}

TEST_CASE("connected part of the linear cavity vanishes") {
  const auto s = kerr_setup(0.0, 3.0, 2.5, 2);
  const auto d = fixtures::linspace(-10.0, 10.0, 81);
  for (int k : {-1, 0, 1}) {
    const auto g = two_photon_connected(s, k, 0.0, 0.0, d);
    double scale = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) scale = std::max(scale, std::abs(g.values_s2[i]));
    CHECK(scale > 1e-3);
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(std::abs(g.value(i)) <= 1e-8 * scale);
  }
}

TEST_CASE("two-excitation connected term agrees with the time-domain construction") {
  for (double delta0 : {0.0, 3.0}) {
    const auto s = kerr_setup(1.0, delta0, 2.5, 2);
    const LadderSystem sys = build_kerr_cavity(fixtures::kerr(1.0, delta0, 2.5), 2);
    const auto d = fixtures::linspace(-6.0, 6.0, 13);
    for (auto [k, nu1, nu2] : {std::tuple{0, 0.0, 0.0}, std::tuple{0, 0.3, -0.8}, std::tuple{1, 0.3, -0.8}}) {
      const auto num = two_photon_connected(s, k, nu1, nu2, d);
      const auto ref = oracle_connected_s2(sys, k, nu1, nu2, d);
      if (delta0 == 0.0 && k != 0) {
        // No modulation, no sidebands.
        for (std::size_t i = 0; i < d.size(); ++i) CHECK(std::abs(num.values_s2[i]) < 1e-12);
        for (std::size_t i = 0; i < d.size(); ++i) CHECK(std::abs(ref[i]) < 1e-8);
      } else {
        CHECK(fixtures::relative_l2(num.values_s2, ref) < 1e-6);
      }
    }
  }
}

TEST_CASE("regularized single-resolvent term matches the principal value of the pole form") {
  const auto s = kerr_setup(1.0, 3.0, 2.5, 2);
  // k = 1, nu1 = nu2 = 0: the pole form is singular at delta = (2n - 1) * 2.5.
  for (double delta : {-7.5, -2.5, 2.5, 7.5, 0.37, -4.1}) {
    const std::vector<double> grid{delta};
    const cplx reg = two_photon_connected_s1_regularized(s.c10, s.dec1, 1, 0.0, 0.0, grid)[0];
    const cplx pv = principal_value(s, 1, 0.0, 0.0, delta);
    CHECK(std::isfinite(std::abs(reg)));
    CHECK(std::abs(reg - pv) <= 1e-4 * std::abs(pv));
  }
  // Away from singular points the two forms coincide without any limit.
  for (double delta : {0.37, 3.3}) {
    const std::vector<double> grid{delta};
    const cplx reg = two_photon_connected_s1_regularized(s.c10, s.dec1, 0, 0.2, -0.5, grid)[0];
    CHECK(std::abs(reg - pole_form(s, 0, 0.2, -0.5, delta)) <= 1e-9 * std::abs(reg));
  }
}

TEST_CASE("regularized term is continuous across a would-be singular point") {
  const auto s = kerr_setup(1.0, 3.0, 2.5, 2);
  const std::vector<double> at{2.5};
  const std::vector<double> near{2.5 + 1e-7, 2.5 - 1e-7};
  const cplx a = two_photon_connected_s1_regularized(s.c10, s.dec1, 1, 0.0, 0.0, at)[0];
  const auto b = two_photon_connected_s1_regularized(s.c10, s.dec1, 1, 0.0, 0.0, near);
  CHECK(std::abs(a - 0.5 * (b[0] + b[1])) <= 1e-8 * std::abs(a));
}

TEST_CASE("connected values are symmetric under input and output exchange") {
  const auto s = kerr_setup(1.0, 3.0, 2.5, 2);
  const std::vector<double> d{-3.1, -0.4, 0.0, 1.9};
  std::vector<double> md;
  for (double x : d) md.push_back(-x);
  const auto a = two_photon_connected(s, 1, 0.4, -0.9, d);
  const auto b = two_photon_connected(s, 1, -0.9, 0.4, d);
  const auto c = two_photon_connected(s, 1, 0.4, -0.9, md);
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(std::abs(a.value(i) - b.value(i)) <= 1e-12 * std::abs(a.value(i)));
    CHECK(std::abs(a.value(i) - c.value(i)) <= 1e-12 * std::abs(a.value(i)));
  }
}

TEST_CASE("cluster decomposition reproduces the equal-time two-photon output") {
  // Psi_k = sum_{k1 + k2 = k} [S_k1(nu1) S_k2(nu2) + S_k1(nu2) S_k2(nu1)] + int d delta / 2 S^C_k(delta)
  const double chi = 1.0, delta0 = 3.0, omega = 2.5;
  const auto s = kerr_setup(chi, delta0, omega, 2);
  const LadderSystem sys = build_kerr_cavity(fixtures::kerr(chi, delta0, omega), 2);
  boost::math::quadrature::sinh_sinh<double> quad(12);
  for (auto [nu1, nu2] : {std::pair{0.0, 0.0}, std::pair{0.6, -1.1}}) {
    const auto ref = oracle_equal_time_two_photon_harmonics(sys, nu1, nu2, -2, 2);
    for (int k = -2; k <= 2; ++k) {
      cplx product = 0.0;
      for (int k1 = -16; k1 <= 16; ++k1) {
        const int k2 = k - k1;
        product += single_photon_sk(s.c10, s.dec1, nu1, k1) * single_photon_sk(s.c10, s.dec1, nu2, k2) +
                   single_photon_sk(s.c10, s.dec1, nu2, k1) * single_photon_sk(s.c10, s.dec1, nu1, k2);
      }
      std::map<double, cplx> memo;
      const auto part = [&](double delta, bool imag) {
        auto it = memo.find(delta);
        if (it == memo.end()) {
          const std::vector<double> g{delta};
          it = memo.emplace(delta, two_photon_connected(s, k, nu1, nu2, g).value(0)).first;
        }
        return 0.5 * (imag ? it->second.imag() : it->second.real());
      };
      const double re = quad.integrate([&](double x) { return part(x, false); }, 1e-7);
      const double im = quad.integrate([&](double x) { return part(x, true); }, 1e-7);
      const cplx total = product + cplx(re, im);
      CHECK(std::abs(total - ref[static_cast<std::size_t>(k + 2)]) <= 1e-3 * std::abs(ref[2]));
    }
  }
}

TEST_CASE("full two-photon matrix keeps product and connected records") {
  const auto s = kerr_setup(0.0, 0.0, 1.0, 2);
  const std::vector<double> nus{0.0, 0.5};
  const auto single = sideband_spectrum(s, nus, 2);
  const std::vector<double> d{-1.0, 0.0, 1.0};
  const std::vector<TwoPhotonConnectedGrid> conn{two_photon_connected(s, 0, 0.0, 0.5, d)};
  const auto full = cluster_full_two_photon(single, conn, 0.0, 0.5);
  CHECK(full.products.size() == 2u * 25u);
  const auto pruned = cluster_full_two_photon(single, conn, 0.0, 0.5, 1e-10);
  CHECK(pruned.products.size() == 2u);
  for (const auto& r : pruned.products) CHECK(r.k1 == 0);
  for (const auto& c : pruned.connected) {
    for (const cplx& v : c.values) CHECK(std::abs(v) < 1e-10);
  }
  CHECK_THROWS_AS(cluster_full_two_photon(single, conn, 0.0, 0.7), GridMismatchError);
}

TEST_CASE("too small a coupling cutoff is rejected") {
  const auto p = fixtures::kerr(0.0, 3.0, 2.5);
  const LadderSystem sys = build_kerr_cavity(p, 1);
  const auto dec = floquet_decompose(sys, 1, 8, 64);
  const auto g = ground_decomposition(p.omega, 8);
  CHECK_THROWS_AS(coupling_fourier(dec, g, sys.l_block(1), 12), InsufficientHarmonicsError);
}
