#include "floqsmat/smatrix.hpp"

#include "floqsmat/errors.hpp"
#include "floqsmat/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace floqsmat {

namespace {

// Diagonal resolvent entries 1 / (i (lambda + shift)).
Vector resolvent(const Vector& lambda, double shift) {
  Vector r(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) r[i] = 1.0 / (I * (lambda[i] + shift));
  return r;
}

double max_block_norm(const std::vector<Matrix>& blocks) {
  double m = 0.0;
  for (const auto& b : blocks) m = std::max(m, b.norm());
  return m;
}

// S_k(nu) for k in [k_lo, k_hi] at one frequency.
std::vector<cplx> sk_window(const CouplingFourierBlocks& c10, const Vector& lambda, double omega, double nu, int k_lo,
                            int k_hi) {
  const int c = c10.cutoff;
  std::vector<Vector> r(static_cast<std::size_t>(2 * c + 1));
  for (int m = -c; m <= c; ++m) {
    r[m + c] = resolvent(lambda, m * omega - nu).cwiseProduct(c10.l_up(m).col(0));
  }
  std::vector<cplx> out(static_cast<std::size_t>(k_hi - k_lo + 1), cplx(0.0, 0.0));
  for (int k = k_lo; k <= k_hi; ++k) {
    cplx acc = 0.0;
    const int m_lo = std::max(-c, -c - k);
    const int m_hi = std::min(c, c - k);
    for (int m = m_lo; m <= m_hi; ++m) acc += (c10.l_down(k + m).row(0) * r[m + c])(0);
    out[k - k_lo] = acc;
  }
  return out;
}

SidebandSpectrum fill_spectrum(const ScatteringSetup& setup, std::span<const double> nu_grid, int k_half,
                               int threads) {
  SidebandSpectrum spectrum_out;
  spectrum_out.nu_grid.assign(nu_grid.begin(), nu_grid.end());
  spectrum_out.omega = setup.omega();
  spectrum_out.k_min = -k_half;
  spectrum_out.k_max = k_half;
  spectrum_out.amplitudes = Matrix::Zero(static_cast<Eigen::Index>(nu_grid.size()), 2 * k_half + 1);
  spectrum_out.total.assign(nu_grid.size(), 0.0);
  const Vector lambda = setup.dec1.quasi_energies();
  parallel_for(nu_grid.size(), threads, [&](std::size_t i) {
    const auto row = sk_window(setup.c10, lambda, setup.omega(), nu_grid[i], -k_half, k_half);
    double t = 0.0;
    for (int j = 0; j <= 2 * k_half; ++j) {
      spectrum_out.amplitudes(static_cast<Eigen::Index>(i), j) = row[j];
      t += std::norm(row[j]);
    }
    spectrum_out.total[i] = t;
  });
  spectrum_out.warnings = setup.warnings;
  return spectrum_out;
}

}  // namespace

CouplingFourierBlocks coupling_fourier(const FloquetDecomposition& dec_hi, const FloquetDecomposition& dec_lo,
                                       const Matrix& l_block, int cutoff) {
  if (dec_hi.n != dec_lo.n + 1) throw InvalidParameterError("coupling blocks need adjacent subspaces n and n - 1");
  if (std::abs(dec_hi.omega - dec_lo.omega) > 1e-14 * dec_hi.omega) {
    throw InvalidParameterError("coupling blocks need decompositions at the same modulation frequency");
  }
  if (cutoff < 0 || cutoff > dec_hi.harmonic_cutoff || cutoff > dec_lo.harmonic_cutoff) {
    std::ostringstream os;
    os << "coupling cutoff " << cutoff << " exceeds stored harmonics (" << dec_hi.harmonic_cutoff << ", "
       << dec_lo.harmonic_cutoff << ")";
    throw InsufficientHarmonicsError(os.str());
  }
  if (l_block.rows() != dec_lo.dim() || l_block.cols() != dec_hi.dim()) {
    throw InvalidParameterError("lowering block shape does not match the decompositions");
  }
  const int Kh = dec_hi.harmonic_cutoff;
  const int Kl = dec_lo.harmonic_cutoff;
  const Matrix l_dag = l_block.adjoint();

  // Skip harmonics that are identically zero (the ground state has only m = 0).
  std::vector<int> lo_left;
  std::vector<int> lo_right;
  for (int a = -Kl; a <= Kl; ++a) {
    if (dec_lo.left(a).squaredNorm() > 0.0) lo_left.push_back(a);
    if (dec_lo.right(a).squaredNorm() > 0.0) lo_right.push_back(a);
  }

  CouplingFourierBlocks out;
  out.n_hi = dec_hi.n;
  out.cutoff = cutoff;
  for (int k = -cutoff; k <= cutoff; ++k) {
    Matrix down = Matrix::Zero(dec_lo.modes(), dec_hi.modes());
    for (int a : lo_left) {
      const int b = k - a;
      if (b >= -Kh && b <= Kh) down.noalias() += dec_lo.left(a) * l_block * dec_hi.right(b);
    }
    Matrix up = Matrix::Zero(dec_hi.modes(), dec_lo.modes());
    for (int b : lo_right) {
      const int a = -k - b;
      if (a >= -Kh && a <= Kh) up.noalias() += dec_hi.left(a) * l_dag * dec_lo.right(b);
    }
    out.down.push_back(std::move(down));
    out.up.push_back(std::move(up));
  }
  const double peak = std::max(max_block_norm(out.down), max_block_norm(out.up));
  const double edge = std::max({out.l_down(cutoff).norm(), out.l_down(-cutoff).norm(), out.l_up(cutoff).norm(),
                                out.l_up(-cutoff).norm()});
  out.tail = peak > 0.0 ? edge / peak : 0.0;
  return out;
}

ScatteringSetup prepare_scattering(const LadderSystem& sys, int max_excitation, const FloquetOptions& opts) {
  if (max_excitation < 1 || max_excitation > 2) {
    throw UnsupportedDimensionError("scattering matrices are available for one and two photons");
  }
  if (max_excitation > sys.n_max()) {
    throw UnsupportedDimensionError("system ladder is truncated below the requested excitation number");
  }
  ScatteringSetup s;
  const int K = opts.harmonic_cutoff;
  s.ground = ground_decomposition(sys.omega(), K);
  s.dec1 = floquet_decompose(sys, 1, opts);
  s.c10 = coupling_fourier(s.dec1, s.ground, sys.l_block(1), K);
  for (const auto& w : s.dec1.warnings) s.warnings.push_back(w);
  const auto tail_warning = [&](const CouplingFourierBlocks& c, const char* name) {
    if (c.tail > opts.tail_tol) {
      std::ostringstream os;
      os << name << " coupling blocks: boundary tail " << c.tail << " exceeds " << opts.tail_tol;
      s.warnings.push_back(os.str());
    }
  };
  tail_warning(s.c10, "1->0");
  if (max_excitation >= 2) {
    s.dec2 = floquet_decompose(sys, 2, opts);
    s.c21 = coupling_fourier(*s.dec2, s.dec1, sys.l_block(2), K);
    for (const auto& w : s.dec2->warnings) s.warnings.push_back(w);
    tail_warning(*s.c21, "2->1");
  }
  return s;
}

cplx single_photon_sk(const CouplingFourierBlocks& c10, const FloquetDecomposition& dec1, double nu, int k) {
  if (c10.n_hi != 1) throw InvalidParameterError("single-photon amplitude needs the 1->0 coupling blocks");
  if (std::abs(k) > 2 * c10.cutoff) return 0.0;
  return sk_window(c10, dec1.quasi_energies(), dec1.omega, nu, k, k).front();
}

SidebandSpectrum SidebandSpectrum::with_reference_time(double new_t0) const {
  SidebandSpectrum out = *this;
  for (int k = k_min; k <= k_max; ++k) {
    out.amplitudes.col(k - k_min) *= std::exp(-I * (k * omega * (new_t0 - t0)));
  }
  out.t0 = new_t0;
  return out;
}

std::vector<double> default_nu_grid() {
  std::vector<double> g(241);
  for (int i = 0; i < 241; ++i) g[i] = -6.0 + 12.0 * i / 240.0;
  return g;
}

SidebandSpectrum sideband_spectrum(const ScatteringSetup& setup, std::span<const double> nu_grid, int k_half,
                                   int threads) {
  if (k_half < 0) throw InvalidParameterError("sideband window must be nonnegative");
  return fill_spectrum(setup, nu_grid, k_half, threads);
}

SidebandSpectrum transmission(const ScatteringSetup& setup, const TransmissionRequest& request) {
  const std::vector<double> grid = request.nu_grid.empty() ? default_nu_grid() : request.nu_grid;
  const int limit = std::max(0, std::min(request.k_cap, 2 * setup.cutoff()));
  int k_half = std::clamp(request.k_initial, 0, limit);
  for (;;) {
    SidebandSpectrum spectrum_out = fill_spectrum(setup, grid, k_half, request.threads);
    double peak = 0.0;
    double edge = 0.0;
    for (Eigen::Index i = 0; i < spectrum_out.amplitudes.rows(); ++i) {
      for (Eigen::Index j = 0; j < spectrum_out.amplitudes.cols(); ++j) peak = std::max(peak, std::norm(spectrum_out.amplitudes(i, j)));
      edge = std::max({edge, std::norm(spectrum_out.amplitudes(i, 0)), std::norm(spectrum_out.amplitudes(i, spectrum_out.amplitudes.cols() - 1))});
    }
    if (edge <= request.boundary_tol * peak || peak == 0.0) return spectrum_out;
    if (k_half >= limit) {
      std::ostringstream os;
      os << "sideband window capped at |k| <= " << k_half << " with boundary |S_k|^2 / max = " << edge / peak;
      spectrum_out.warnings.push_back(os.str());
      return spectrum_out;
    }
    k_half = std::min(limit, std::max(1, 2 * k_half));
  }
}

OutputPair output_frequencies(double nu1, double nu2, int k, double omega, double delta) {
  const double total = nu1 + nu2 + k * omega;
  return {(total + delta) / 2.0, (total - delta) / 2.0};
}

std::vector<cplx> two_photon_connected_s2(const CouplingFourierBlocks& c10, const CouplingFourierBlocks& c21,
                                          const FloquetDecomposition& dec1, const FloquetDecomposition& dec2, int k,
                                          double nu1, double nu2, std::span<const double> delta_grid) {
  if (c10.n_hi != 1 || c21.n_hi != 2) throw InvalidParameterError("S^C,2 needs the 1->0 and 2->1 coupling blocks");
  const double omega = dec1.omega;
  const int c1 = c10.cutoff;
  const int c2 = c21.cutoff;
  const Vector lam1 = dec1.quasi_energies();
  const Vector lam2 = dec2.quasi_energies();
  const int n_span = c1 + c2;

  // U_n = sum_Q R2(n) sum_m L12_{n-m} R1(nu_Q2; m) L01_m, independent of delta.
  std::vector<Vector> U(static_cast<std::size_t>(2 * n_span + 1), Vector::Zero(dec2.modes()));
  const double nus[2] = {nu2, nu1};
  for (double nu_b : nus) {
    std::vector<Vector> r(static_cast<std::size_t>(2 * c1 + 1));
    for (int m = -c1; m <= c1; ++m) r[m + c1] = resolvent(lam1, m * omega - nu_b).cwiseProduct(c10.l_up(m).col(0));
    for (int n = -n_span; n <= n_span; ++n) {
      Vector w = Vector::Zero(dec2.modes());
      for (int m = -c1; m <= c1; ++m) {
        if (c21.has(n - m)) w.noalias() += c21.l_up(n - m) * r[m + c1];
      }
      U[n + n_span] += resolvent(lam2, n * omega - nu1 - nu2).cwiseProduct(w);
    }
  }
  // Z_p = sum_n L21_{n-p+k} U_n, also independent of delta.
  std::vector<Vector> Z(static_cast<std::size_t>(2 * c1 + 1), Vector::Zero(dec1.modes()));
  for (int p = -c1; p <= c1; ++p) {
    for (int n = -n_span; n <= n_span; ++n) {
      if (c21.has(n - p + k)) Z[p + c1].noalias() += c21.l_down(n - p + k) * U[n + n_span];
    }
  }

  std::vector<cplx> out;
  out.reserve(delta_grid.size());
  for (double delta : delta_grid) {
    const OutputPair w = output_frequencies(nu1, nu2, k, omega, delta);
    cplx acc = 0.0;
    for (double omega_a : {w.omega1, w.omega2}) {
      for (int p = -c1; p <= c1; ++p) {
        const Vector r = resolvent(lam1, p * omega - omega_a);
        acc += (c10.l_down(p).row(0) * r.cwiseProduct(Z[p + c1]))(0);
      }
    }
    out.push_back(acc / (2.0 * pi));
  }
  return out;
}

std::vector<cplx> two_photon_connected_s1_regularized(const CouplingFourierBlocks& c10,
                                                      const FloquetDecomposition& dec1, int k, double nu1, double nu2,
                                                      std::span<const double> delta_grid) {
  if (c10.n_hi != 1) throw InvalidParameterError("S^C,1 needs the 1->0 coupling blocks");
  const double omega = dec1.omega;
  const int c = c10.cutoff;
  const Vector lam = dec1.quasi_energies();
  const Eigen::Index modes = lam.size();

  // Residues of S_n(nu) = sum_{i,p} a / (i (A - nu)): a = [L10_{p+n}]_i [L01_p]_i, A = lambda_i + p omega.
  struct Terms {
    std::vector<cplx> a;
    std::vector<cplx> A;
  };
  const int n_span = 2 * c;
  std::vector<Terms> terms(static_cast<std::size_t>(2 * n_span + 1));
  for (int n = -n_span; n <= n_span; ++n) {
    Terms& t = terms[n + n_span];
    for (int p = -c; p <= c; ++p) {
      if (!c10.has(p + n)) continue;
      for (Eigen::Index i = 0; i < modes; ++i) {
        const cplx a = c10.l_down(p + n)(0, i) * c10.l_up(p)(i, 0);
        if (a == 0.0) continue;
        t.a.push_back(a);
        t.A.push_back(lam[i] + p * omega);
      }
    }
  }

  // M_{n,m}(nu, nubar, d) = U1 V1 + U2 V2, equal to [S_n(nu - d) S_m(nubar) - S_n(nu) S_m(nubar + d)] / d.
  const auto M = [&](int n, int m, double nu, double nubar, double d) {
    cplx u1 = 0.0;
    cplx u2 = 0.0;
    const Terms& tn = terms[n + n_span];
    for (std::size_t q = 0; q < tn.a.size(); ++q) {
      const cplx x = tn.A[q] - nu;
      const cplx inv = 1.0 / (x + d);
      u1 += tn.a[q] * inv;
      u2 += tn.a[q] * inv / x;
    }
    cplx v1 = 0.0;
    cplx v2 = 0.0;
    const Terms& tm = terms[m + n_span];
    for (std::size_t q = 0; q < tm.a.size(); ++q) {
      const cplx y = tm.A[q] - nubar;
      const cplx inv = 1.0 / (y - d);
      v1 += tm.a[q] * inv / y;
      v2 += tm.a[q] * inv;
    }
    return u1 * v1 + u2 * v2;
  };

  std::vector<cplx> out;
  out.reserve(delta_grid.size());
  for (double delta : delta_grid) {
    const OutputPair w = output_frequencies(nu1, nu2, k, omega, delta);
    cplx acc = 0.0;
    for (int n = -n_span; n <= n_span; ++n) {
      const int m = k - n;
      if (m < -n_span || m > n_span) continue;
      acc += M(n, m, nu1, nu2, nu1 - w.omega1 + n * omega);
      acc += M(n, m, nu2, nu1, nu2 - w.omega2 + n * omega);
    }
    out.push_back(acc / (2.0 * pi * I));
  }
  return out;
}

TwoPhotonConnectedGrid two_photon_connected(const ScatteringSetup& setup, int k, double nu1, double nu2,
                                            std::span<const double> delta_grid, int threads) {
  if (!setup.dec2 || !setup.c21) throw UnsupportedDimensionError("two-photon connected part needs the n = 2 subspace");
  TwoPhotonConnectedGrid g;
  g.k = k;
  g.nu1 = nu1;
  g.nu2 = nu2;
  g.delta_grid.assign(delta_grid.begin(), delta_grid.end());
  g.values_s1.resize(delta_grid.size());
  g.values_s2.resize(delta_grid.size());
  const std::size_t chunk = 16;
  const std::size_t chunks = (delta_grid.size() + chunk - 1) / chunk;
  parallel_for(chunks, threads, [&](std::size_t ci) {
    const std::size_t lo = ci * chunk;
    const std::size_t hi = std::min(delta_grid.size(), lo + chunk);
    const auto part = delta_grid.subspan(lo, hi - lo);
    const auto s1 = two_photon_connected_s1_regularized(setup.c10, setup.dec1, k, nu1, nu2, part);
    const auto s2 = two_photon_connected_s2(setup.c10, *setup.c21, setup.dec1, *setup.dec2, k, nu1, nu2, part);
    std::copy(s1.begin(), s1.end(), g.values_s1.begin() + static_cast<std::ptrdiff_t>(lo));
    std::copy(s2.begin(), s2.end(), g.values_s2.begin() + static_cast<std::ptrdiff_t>(lo));
  });
  return g;
}

TwoPhotonMatrix cluster_full_two_photon(const SidebandSpectrum& single, std::span<const TwoPhotonConnectedGrid> connected,
                                        double nu1, double nu2, double prune_tol) {
  const auto find = [&](double nu) {
    for (std::size_t i = 0; i < single.nu_grid.size(); ++i) {
      if (std::abs(single.nu_grid[i] - nu) <= 1e-12 * (1.0 + std::abs(nu))) return i;
    }
    throw GridMismatchError("single-photon spectrum does not contain input frequency " + std::to_string(nu));
  };
  const std::size_t i1 = find(nu1);
  const std::size_t i2 = find(nu2);
  for (const auto& g : connected) {
    if (std::abs(g.nu1 - nu1) > 1e-12 * (1.0 + std::abs(nu1)) || std::abs(g.nu2 - nu2) > 1e-12 * (1.0 + std::abs(nu2))) {
      throw GridMismatchError("connected grid was computed for different input frequencies");
    }
    if (g.values_s1.size() != g.delta_grid.size() || g.values_s2.size() != g.delta_grid.size()) {
      throw GridMismatchError("connected grid values do not match its delta grid");
    }
  }

  TwoPhotonMatrix out;
  out.nu1 = nu1;
  out.nu2 = nu2;
  out.omega = single.omega;
  double peak = 0.0;
  for (auto pairing : {ProductRecord::Pairing::direct, ProductRecord::Pairing::exchanged}) {
    const std::size_t a = pairing == ProductRecord::Pairing::direct ? i1 : i2;
    const std::size_t b = pairing == ProductRecord::Pairing::direct ? i2 : i1;
    for (int k1 = single.k_min; k1 <= single.k_max; ++k1) {
      for (int k2 = single.k_min; k2 <= single.k_max; ++k2) {
        const cplx amp = single.s(a, k1) * single.s(b, k2);
        peak = std::max(peak, std::abs(amp));
        out.products.push_back({pairing, k1, k2, amp});
      }
    }
  }
  if (prune_tol > 0.0) {
    std::erase_if(out.products, [&](const ProductRecord& r) { return std::abs(r.amplitude) <= prune_tol * peak; });
  }
  for (const auto& g : connected) {
    ConnectedRecord rec;
    rec.k = g.k;
    rec.delta_grid = g.delta_grid;
    rec.values.reserve(g.delta_grid.size());
    for (std::size_t i = 0; i < g.delta_grid.size(); ++i) rec.values.push_back(g.value(i));
    out.connected.push_back(std::move(rec));
  }
  return out;
}

}  // namespace floqsmat
