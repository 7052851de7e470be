#include "floqsmat/floquet.hpp"

#include "floqsmat/errors.hpp"
#include "floqsmat/ode.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace floqsmat {

namespace {

// Uniform decay rate removed from the generator before integrating, so that long periods
// do not push the propagator below the absolute tolerance. U = exp(-shift t) U_shifted.
double decay_shift(const LadderSystem& sys, int n) {
  if (n == 0) return 0.0;
  const Matrix& g = sys.decay_block(n);
  return g.trace().real() / static_cast<double>(g.rows());
}

std::vector<Matrix> shifted_propagators(const LadderSystem& sys, int n, double t0, std::span<const double> times,
                                        const ToleranceSpec& tol, double shift) {
  const int d = sys.dim(n);
  const Eigen::Index dd = static_cast<Eigen::Index>(d) * d;
  ode::State x(static_cast<std::size_t>(dd), cplx(0.0, 0.0));
  for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i * d + i)] = 1.0;

  std::vector<Matrix> out;
  out.reserve(times.size());
  if (times.empty()) return out;

  const Matrix shift_id = Matrix::Identity(d, d) * cplx(0.0, shift);
  auto rhs = [&](const ode::State& y, ode::State& dydt, double t) {
    const Matrix gen = -I * (sys.h_eff(n, t) + shift_id);
    Eigen::Map<const Matrix> Y(y.data(), d, d);
    Eigen::Map<Matrix> dY(dydt.data(), d, d);
    dY.noalias() = gen * Y;
  };
  auto observe = [&](double, const ode::State& y) { out.emplace_back(Eigen::Map<const Matrix>(y.data(), d, d)); };
  if (sys.time_independent()) {
    // Exact exponential of the constant generator, evaluated at every requested time.
    const Matrix gen = -I * (sys.h_eff(n, t0) + shift_id);
    Eigen::ComplexEigenSolver<Matrix> es(gen);
    const Matrix& V = es.eigenvectors();
    Eigen::PartialPivLU<Matrix> lu(V);
    const Eigen::JacobiSVD<Matrix> svd(V);
    const double cond = svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);
    if (cond < 1e8) {
      const Matrix Vinv = lu.inverse();
      for (double t : times) {
        const Vector e = (es.eigenvalues() * (t - t0)).array().exp();
        out.push_back(V * e.asDiagonal() * Vinv);
      }
      return out;
    }
  }
  ode::integrate(rhs, x, t0, times.back(), tol, times, observe);
  return out;
}

void check_decomposition_inputs(const LadderSystem& sys, int n, const FloquetOptions& opts) {
  if (n < 0 || n > sys.n_max()) throw UnsupportedDimensionError("excitation number beyond the ladder");
  const int N = opts.samples;
  if (N < 4 || (N & (N - 1)) != 0) throw InvalidParameterError("sample count must be a power of two >= 4");
  if (opts.harmonic_cutoff < 0) throw InvalidParameterError("harmonic cutoff must be nonnegative");
  if (N < 4 * opts.harmonic_cutoff) throw InvalidParameterError("sample count must be at least 4 x harmonic cutoff");
}

}  // namespace

std::vector<Matrix> propagate_effective_at(const LadderSystem& sys, int n, double t0, std::span<const double> times,
                                           const ToleranceSpec& tol) {
  if (n < 0 || n > sys.n_max()) throw UnsupportedDimensionError("excitation number beyond the ladder");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t0 || (i > 0 && times[i] < times[i - 1])) {
      throw InvalidParameterError("propagation times must be ordered and not before t0");
    }
  }
  const double shift = decay_shift(sys, n);
  std::vector<Matrix> out = shifted_propagators(sys, n, t0, times, tol, shift);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= std::exp(-shift * (times[i] - t0));
  return out;
}

Matrix propagate_effective(const LadderSystem& sys, int n, double t0, double t1, const ToleranceSpec& tol) {
  if (t1 < t0) throw InvalidParameterError("propagate_effective needs t1 >= t0");
  const double times[] = {t1};
  return propagate_effective_at(sys, n, t0, times, tol).front();
}

FloquetDecomposition floquet_decompose(const LadderSystem& sys, int n, int harmonic_cutoff, int samples,
                                       const ToleranceSpec& tol) {
  FloquetOptions opts;
  opts.harmonic_cutoff = harmonic_cutoff;
  opts.samples = samples;
  opts.tol = tol;
  return floquet_decompose(sys, n, opts);
}

FloquetDecomposition floquet_decompose(const LadderSystem& sys, int n, const FloquetOptions& opts) {
  check_decomposition_inputs(sys, n, opts);
  const int N = opts.samples;
  const int K = opts.harmonic_cutoff;
  const double omega = sys.omega();
  const double T = sys.period();
  const int d = sys.dim(n);

  std::vector<double> times(static_cast<std::size_t>(N) + 1);
  for (int j = 0; j <= N; ++j) times[j] = T * j / N;
  times.back() = T;
  const double shift = decay_shift(sys, n);
  const std::vector<Matrix> C = shifted_propagators(sys, n, 0.0, times, opts.tol, shift);
  const Matrix& M = C.back();

  Eigen::ComplexEigenSolver<Matrix> es(M);
  if (es.info() != Eigen::Success) throw DegenerateFloquetError("monodromy eigendecomposition failed");
  Matrix V = es.eigenvectors();
  for (int k = 0; k < d; ++k) V.col(k).normalize();
  const Eigen::JacobiSVD<Matrix> svd(V);
  const auto& sv = svd.singularValues();
  const double cond = sv(0) / sv(sv.size() - 1);
  if (!(cond <= opts.condition_limit)) {
    std::ostringstream os;
    os << "monodromy of subspace " << n << " is defective or nearly so (eigenvector condition " << cond << ")";
    throw DegenerateFloquetError(os.str());
  }

  FloquetDecomposition dec;
  dec.n = n;
  dec.omega = omega;
  dec.harmonic_cutoff = K;
  dec.sample_grid = N;
  dec.provenance = {opts.tol.rtol, opts.tol.atol, sys.fingerprint(), "monodromy"};

  std::vector<cplx> lam_shifted(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    const cplx mu_shifted = es.eigenvalues()[k];
    const double log_abs = std::log(std::abs(mu_shifted)) - shift * T;
    if (log_abs > std::log1p(opts.passivity_tol)) {
      std::ostringstream os;
      os << "Floquet multiplier of modulus exp(" << log_abs << ") > 1 in subspace " << n;
      throw PassivityViolationError(os.str());
    }
    // lambda = i ln(mu) / T on the principal branch, then folded.
    const cplx lam = I * std::log(mu_shifted) / T;
    lam_shifted[k] = cplx(fold_quasi_energy(lam.real(), omega), lam.imag());
    dec.lambdas.emplace_back(lam_shifted[k].real(), lam.imag() - shift);
  }

  // Periodic states on the grid and their discrete Fourier coefficients over the full range.
  std::vector<Matrix> phi(static_cast<std::size_t>(N));
  std::vector<Matrix> chi(static_cast<std::size_t>(N));
  for (int j = 0; j < N; ++j) {
    Vector phase(d);
    for (int k = 0; k < d; ++k) phase[k] = std::exp(I * lam_shifted[k] * times[j]);
    phi[j] = C[j] * V * phase.asDiagonal();
    chi[j] = phi[j].partialPivLu().inverse();
  }
  const int half = N / 2;
  std::vector<Matrix> right_all(static_cast<std::size_t>(N), Matrix::Zero(d, d));
  std::vector<Matrix> left_all(static_cast<std::size_t>(N), Matrix::Zero(d, d));
  std::vector<cplx> twiddle(static_cast<std::size_t>(N));
  for (int j = 0; j < N; ++j) twiddle[j] = std::exp(I * (2.0 * pi * j / N));
  for (int mi = 0; mi < N; ++mi) {
    const int m = mi - half;
    for (int j = 0; j < N; ++j) {
      const cplx w = twiddle[static_cast<std::size_t>(((static_cast<long>(m) * j) % N + N) % N)] / static_cast<double>(N);
      right_all[mi] += w * phi[j];
      left_all[mi] += w * chi[j];
    }
  }
  const auto wrap = [&](int m) { return static_cast<std::size_t>(((m + half) % N + N) % N); };

  dec.right_fourier.assign(static_cast<std::size_t>(2 * K + 1), Matrix::Zero(d, d));
  dec.left_fourier.assign(static_cast<std::size_t>(2 * K + 1), Matrix::Zero(d, d));
  dec.harmonic_shift.assign(static_cast<std::size_t>(d), 0);
  for (int k = 0; k < d; ++k) {
    // Recentre the harmonic content of mode k around m = 0 (gauge lambda + s omega).
    double weight = 0.0;
    double moment = 0.0;
    for (int mi = 0; mi < N; ++mi) {
      const double w = right_all[mi].col(k).squaredNorm();
      weight += w;
      moment += w * (mi - half);
    }
    const int s = weight > 0.0 ? static_cast<int>(std::lround(moment / weight)) : 0;
    dec.harmonic_shift[k] = s;
    for (int m = -K; m <= K; ++m) {
      dec.right_fourier[m + K].col(k) = right_all[wrap(m + s)].col(k);
      dec.left_fourier[m + K].row(k) = left_all[wrap(m - s)].row(k);
    }
  }

  double peak = 0.0;
  for (const auto& b : dec.right_fourier) peak = std::max(peak, b.norm());
  for (const auto& b : dec.left_fourier) peak = std::max(peak, b.norm());
  const double tail = std::max({dec.right(K).norm(), dec.right(-K).norm(), dec.left(K).norm(), dec.left(-K).norm()});
  if (tail > opts.tail_tol * peak) {
    std::ostringstream os;
    os << "subspace " << n << ": harmonic tail |block(+-" << K << ")| / max = " << tail / peak
       << " exceeds " << opts.tail_tol << "; increase harmonic_cutoff";
    dec.warnings.push_back(os.str());
  }
  return dec;
}

Matrix reconstruct_propagator(const FloquetDecomposition& dec, double t, double s) {
  const Matrix phi = dec.right_states(t);
  const Matrix chi = dec.left_states(s);
  Vector e(dec.modes());
  for (int k = 0; k < dec.modes(); ++k) e[k] = std::exp(-I * dec.quasi_energy(k) * (t - s));
  return phi * e.asDiagonal() * chi;
}

double floquet_residual(const LadderSystem& sys, const FloquetDecomposition& dec, int t_samples) {
  double worst = 0.0;
  const Vector lam = dec.quasi_energies();
  for (int j = 0; j < t_samples; ++j) {
    const double t = dec.period() * j / t_samples;
    const Matrix phi = dec.right_states(t);
    const Matrix r = sys.h_eff(dec.n, t) * phi - I * dec.right_states_derivative(t) - phi * lam.asDiagonal();
    for (int k = 0; k < dec.modes(); ++k) worst = std::max(worst, r.col(k).norm());
  }
  return worst;
}

double floquet_left_residual(const LadderSystem& sys, const FloquetDecomposition& dec, int t_samples) {
  double worst = 0.0;
  const Vector lam = dec.quasi_energies();
  for (int j = 0; j < t_samples; ++j) {
    const double t = dec.period() * j / t_samples;
    const Matrix chi = dec.left_states(t);
    const Matrix r = chi * sys.h_eff(dec.n, t) + I * dec.left_states_derivative(t) - lam.asDiagonal() * chi;
    for (int k = 0; k < dec.modes(); ++k) worst = std::max(worst, r.row(k).norm());
  }
  return worst;
}

double biorthonormality_deviation(const FloquetDecomposition& dec, std::span<const double> times) {
  double worst = 0.0;
  const Matrix id = Matrix::Identity(dec.modes(), dec.modes());
  for (double t : times) worst = std::max(worst, (dec.left_states(t) * dec.right_states(t) - id).norm());
  return worst;
}

FloquetDecomposition refold(const FloquetDecomposition& dec, int k, int zones) {
  if (k < 0 || k >= dec.modes()) throw InvalidParameterError("mode index out of range");
  FloquetDecomposition out = dec;
  const int K = dec.harmonic_cutoff;
  out.harmonic_shift[k] += zones;
  for (int m = -K; m <= K; ++m) {
    const int src_r = m + zones;
    const int src_l = m - zones;
    out.right_fourier[m + K].col(k) = dec.has_harmonic(src_r) ? Vector(dec.right(src_r).col(k)) : Vector::Zero(dec.dim());
    out.left_fourier[m + K].row(k) =
        dec.has_harmonic(src_l) ? RowVector(dec.left(src_l).row(k)) : RowVector::Zero(dec.dim());
  }
  return out;
}

}  // namespace floqsmat
