#include "floqsmat/models.hpp"

#include "floqsmat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>

namespace floqsmat {

namespace {

std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void require_positive(double x, const char* name) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw InvalidParameterError(std::string(name) + " must be positive and finite, got " + fmt_double(x));
  }
}

Matrix scalar(cplx x) {
  Matrix m(1, 1);
  m(0, 0) = x;
  return m;
}

// Bessel J_m(x) for integer m and any real x.
double bessel_j(int m, double x) {
  const int am = std::abs(m);
  double sign = 1.0;
  if (m < 0 && (am % 2) != 0) sign = -sign;
  if (x < 0.0) {
    x = -x;
    if ((am % 2) != 0) sign = -sign;
  }
  return sign * std::cyl_bessel_j(static_cast<double>(am), x);
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Waveform

Waveform Waveform::sinusoid(double depth, double omega) {
  require_positive(omega, "modulation omega");
  Waveform w;
  w.kind_ = Kind::sinusoid;
  w.omega_ = omega;
  w.depth_ = depth;
  return w;
}

Waveform Waveform::table(std::vector<double> samples, double omega) {
  require_positive(omega, "modulation omega");
  if (samples.empty()) throw InvalidParameterError("tabulated waveform needs at least one sample");
  Waveform w;
  w.kind_ = Kind::table;
  w.omega_ = omega;
  w.depth_ = 0.0;
  for (double s : samples) w.depth_ = std::max(w.depth_, std::abs(s));
  w.spline_ = PeriodicCubicSpline<double>(std::move(samples), 2.0 * pi / omega);
  return w;
}

double Waveform::operator()(double t) const {
  if (kind_ == Kind::sinusoid) return depth_ * std::sin(omega_ * t);
  return spline_(t);
}

double Waveform::phase(double t) const {
  if (kind_ == Kind::sinusoid) return depth_ / omega_ * (1.0 - std::cos(omega_ * t));
  return spline_.integral(t);
}

double Waveform::mean() const {
  if (kind_ == Kind::sinusoid) return 0.0;
  return spline_.period_integral() / spline_.period();
}

bool Waveform::is_constant() const {
  if (kind_ == Kind::sinusoid) return depth_ == 0.0;
  const auto& y = spline_.samples();
  return std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); });
}

Waveform KerrCavityParams::waveform() const {
  if (table.empty()) return Waveform::sinusoid(delta0, omega);
  return Waveform::table(table, omega);
}

// ---------------------------------------------------------------------------
// LadderSystem

LadderSystem::LadderSystem(double omega, std::vector<int> subspace_dims, BlockFn h_block,
                           std::vector<Matrix> l_blocks, bool time_independent, std::uint64_t fingerprint)
    : omega_(omega),
      dims_(std::move(subspace_dims)),
      h_(std::move(h_block)),
      l_(std::move(l_blocks)),
      static_(time_independent),
      fingerprint_(fingerprint) {
  require_positive(omega_, "omega");
  if (dims_.empty()) throw InvalidParameterError("ladder needs at least the ground subspace");
  if (dims_.front() != 1) throw InvalidParameterError("the ground subspace must be one-dimensional");
  for (int d : dims_) {
    if (d < 1) throw InvalidParameterError("subspace dimensions must be positive");
  }
  if (l_.size() != dims_.size() - 1) {
    throw InvalidParameterError("expected one lowering block per excited subspace");
  }
  decay_.reserve(l_.size());
  for (std::size_t i = 0; i < l_.size(); ++i) {
    const Matrix& l = l_[i];
    if (l.rows() != dims_[i] || l.cols() != dims_[i + 1]) {
      std::ostringstream os;
      os << "lowering block " << i + 1 << " has shape " << l.rows() << "x" << l.cols() << ", expected "
         << dims_[i] << "x" << dims_[i + 1];
      throw InvalidParameterError(os.str());
    }
    decay_.push_back(l.adjoint() * l);
  }
}

void LadderSystem::check_level(int n, int lowest) const {
  if (n < lowest || n > n_max()) {
    std::ostringstream os;
    os << "excitation number " << n << " outside [" << lowest << ", " << n_max() << "]";
    throw UnsupportedDimensionError(os.str());
  }
}

int LadderSystem::dim(int n) const {
  check_level(n, 0);
  return dims_[static_cast<std::size_t>(n)];
}

Matrix LadderSystem::h_block(int n, double t) const {
  check_level(n, 0);
  if (n == 0) return Matrix::Zero(1, 1);
  return h_(n, t);
}

const Matrix& LadderSystem::l_block(int n) const {
  check_level(n, 1);
  return l_[static_cast<std::size_t>(n - 1)];
}

const Matrix& LadderSystem::decay_block(int n) const {
  check_level(n, 1);
  return decay_[static_cast<std::size_t>(n - 1)];
}

Matrix LadderSystem::h_eff(int n, double t) const {
  if (n == 0) return h_block(0, t);
  return h_block(n, t) - I * decay_block(n);
}

// ---------------------------------------------------------------------------
// Builders

LadderSystem build_kerr_cavity(const KerrCavityParams& params, int n_max) {
  require_positive(params.kappa, "kappa");
  require_positive(params.omega, "omega");
  if (params.chi < 0.0) throw InvalidParameterError("Kerr shift chi must be nonnegative");
  if (n_max < 1) throw UnsupportedDimensionError("Kerr cavity needs n_max >= 1");
  const Waveform wave = params.waveform();
  const double scale = 1.0 + wave.depth();
  if (std::abs(wave.mean()) > 1e-9 * scale) {
    throw InvalidParameterError("modulation waveform must have zero mean over one period, mean = " +
                                fmt_double(wave.mean()));
  }

  std::vector<Matrix> l;
  for (int n = 1; n <= n_max; ++n) l.push_back(scalar(std::sqrt(n * params.kappa / 2.0)));

  const double chi = params.chi;
  auto h = [wave, chi](int n, double t) {
    return scalar(static_cast<double>(n) * wave(t) + chi * n * (n - 1));
  };

  std::ostringstream fp;
  fp << "kerr;" << fmt_double(params.kappa) << ';' << fmt_double(chi) << ';' << fmt_double(params.delta0) << ';'
     << fmt_double(params.omega) << ';' << n_max;
  for (double v : params.table) fp << ';' << fmt_double(v);

  return LadderSystem(params.omega, std::vector<int>(static_cast<std::size_t>(n_max) + 1, 1), std::move(h),
                      std::move(l), wave.is_constant(), fnv1a(fp.str()));
}

namespace {

std::vector<Matrix> jc_lowering(double kappa, int n_max) {
  const double c = std::sqrt(kappa / 2.0);
  std::vector<Matrix> l;
  Matrix l1(1, 2);
  l1 << 0.0, c;
  l.push_back(l1);
  if (n_max >= 2) {
    Matrix l2(2, 2);
    l2 << c, 0.0, 0.0, c * std::sqrt(2.0);
    l.push_back(l2);
  }
  return l;
}

Matrix jc_block(double omega_e, double omega_c, cplx g, int n) {
  Matrix h(2, 2);
  if (n == 1) {
    h << omega_e, g, std::conj(g), omega_c;
  } else {
    const double r2 = std::sqrt(2.0);
    h << omega_e + omega_c, r2 * g, r2 * std::conj(g), 2.0 * omega_c;
  }
  return h;
}

void check_jc(const JaynesCummingsParams& params, int n_max) {
  require_positive(params.kappa, "kappa");
  if (n_max < 1) throw UnsupportedDimensionError("Jaynes-Cummings model needs n_max >= 1");
  if (n_max > 2) {
    throw UnsupportedDimensionError("Jaynes-Cummings ladder is implemented for n_max <= 2, got " +
                                    std::to_string(n_max));
  }
}

std::string jc_fingerprint(const JaynesCummingsParams& params, int n_max) {
  std::ostringstream fp;
  fp << "jc;" << fmt_double(params.omega_e) << ';' << fmt_double(params.omega_c) << ';'
     << fmt_double(params.kappa) << ';' << n_max;
  return fp.str();
}

}  // namespace

LadderSystem build_jaynes_cummings(const JaynesCummingsParams& params, cplx g, int n_max, double omega) {
  check_jc(params, n_max);
  const double w = params.g_loop ? params.g_loop->omega() : omega;
  const double we = params.omega_e;
  const double wc = params.omega_c;
  auto h = [we, wc, g](int n, double) { return jc_block(we, wc, g, n); };
  const std::string fp = jc_fingerprint(params, n_max) + ";static;" + fmt_double(g.real()) + ';' +
                         fmt_double(g.imag()) + ';' + fmt_double(w);
  std::vector<int> dims(static_cast<std::size_t>(n_max) + 1, 2);
  dims[0] = 1;
  return LadderSystem(w, std::move(dims), std::move(h), jc_lowering(params.kappa, n_max), true, fnv1a(fp));
}

LadderSystem build_jaynes_cummings_modulated(const JaynesCummingsParams& params, int n_max) {
  if (!params.g_loop) throw InvalidParameterError("modulated Jaynes-Cummings model needs a g loop");
  if (params.g_loop->dim() != 2) throw InvalidParameterError("g loop must be two-dimensional (Re g, Im g)");
  return jaynes_cummings_family(params, n_max).along(*params.g_loop);
}

LadderSystem build_generic(double omega, std::vector<std::vector<Matrix>> h_samples, std::vector<Matrix> l_blocks) {
  require_positive(omega, "omega");
  if (h_samples.empty()) throw InvalidParameterError("generic model needs the ground block");
  if (l_blocks.size() + 1 != h_samples.size()) {
    throw InvalidParameterError("generic model needs one lowering block per excited subspace");
  }
  const double period = 2.0 * pi / omega;
  std::vector<int> dims;
  bool time_independent = true;
  std::ostringstream fp;
  fp << "generic;" << fmt_double(omega);

  struct Block {
    int dim = 0;
    Matrix constant;
    std::vector<PeriodicCubicSpline<cplx>> entries;  // column-major
  };
  auto blocks = std::make_shared<std::vector<Block>>();
  for (std::size_t n = 0; n < h_samples.size(); ++n) {
    auto& samples = h_samples[n];
    if (samples.empty()) throw InvalidParameterError("generic block " + std::to_string(n) + " has no samples");
    const auto d = samples.front().rows();
    Block b;
    b.dim = static_cast<int>(d);
    for (const Matrix& m : samples) {
      if (m.rows() != d || m.cols() != d) {
        throw InvalidParameterError("generic block " + std::to_string(n) + " samples must be square and equal-sized");
      }
      for (Eigen::Index i = 0; i < m.size(); ++i) {
        fp << ';' << fmt_double(m.data()[i].real()) << ',' << fmt_double(m.data()[i].imag());
      }
    }
    if (samples.size() == 1) {
      b.constant = samples.front();
    } else {
      time_independent = false;
      for (Eigen::Index e = 0; e < d * d; ++e) {
        std::vector<cplx> ys;
        ys.reserve(samples.size());
        for (const Matrix& m : samples) ys.push_back(m.data()[e]);
        b.entries.emplace_back(std::move(ys), period);
      }
    }
    dims.push_back(b.dim);
    blocks->push_back(std::move(b));
  }
  for (const Matrix& l : l_blocks) {
    for (Eigen::Index i = 0; i < l.size(); ++i) {
      fp << ';' << fmt_double(l.data()[i].real()) << ',' << fmt_double(l.data()[i].imag());
    }
  }
  auto h = [blocks](int n, double t) {
    const Block& b = (*blocks)[static_cast<std::size_t>(n)];
    if (b.entries.empty()) return b.constant;
    Matrix m(b.dim, b.dim);
    for (Eigen::Index e = 0; e < m.size(); ++e) m.data()[e] = b.entries[static_cast<std::size_t>(e)](t);
    return m;
  };
  return LadderSystem(omega, std::move(dims), std::move(h), std::move(l_blocks), time_independent,
                      fnv1a(fp.str()));
}

// ---------------------------------------------------------------------------
// Validation

bool ValidationReport::ok(double tol) const {
  return ground_dim_ok && lowering_shapes_ok && periodicity_deviation <= tol && commutator_deviation <= tol &&
         number_conservation <= tol && ground_energy_deviation <= tol;
}

ValidationReport validate_ladder(const LadderSystem& sys, int t_samples) {
  if (t_samples < 1) throw InvalidParameterError("validate_ladder needs at least one time sample");
  ValidationReport rep;
  const int n_max = sys.n_max();
  rep.ground_dim_ok = sys.dim(0) == 1;

  std::vector<Eigen::Index> offset(static_cast<std::size_t>(n_max) + 2, 0);
  for (int n = 0; n <= n_max; ++n) offset[n + 1] = offset[n] + sys.dim(n);
  const Eigen::Index total = offset.back();

  rep.lowering_shapes_ok = true;
  Matrix L = Matrix::Zero(total, total);
  Matrix mu = Matrix::Zero(total, total);
  for (int n = 0; n <= n_max; ++n) {
    for (Eigen::Index i = offset[n]; i < offset[n + 1]; ++i) mu(i, i) = static_cast<double>(n);
  }
  for (int n = 1; n <= n_max; ++n) {
    const Matrix& l = sys.l_block(n);
    if (l.rows() != sys.dim(n - 1) || l.cols() != sys.dim(n)) {
      rep.lowering_shapes_ok = false;
      continue;
    }
    L.block(offset[n - 1], offset[n], l.rows(), l.cols()) = l;
  }
  rep.commutator_deviation = (L * mu - mu * L - L).cwiseAbs().maxCoeff();

  const double T = sys.period();
  for (int j = 0; j < t_samples; ++j) {
    // Offset grid so that a sinusoid's zero crossings do not hide a periodicity defect.
    const double t = (j + 0.3183098861837907) * T / t_samples;
    Matrix H = Matrix::Zero(total, total);
    for (int n = 0; n <= n_max; ++n) {
      const Matrix h = sys.h_block(n, t);
      const Matrix h_next = sys.h_block(n, t + T);
      rep.periodicity_deviation = std::max(rep.periodicity_deviation, (h_next - h).cwiseAbs().maxCoeff());
      H.block(offset[n], offset[n], h.rows(), h.cols()) = h;
      if (n == 0) rep.ground_energy_deviation = std::max(rep.ground_energy_deviation, std::abs(h(0, 0)));
    }
    rep.number_conservation = std::max(rep.number_conservation, (H * mu - mu * H).cwiseAbs().maxCoeff());
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Closed-form Kerr Floquet data

FloquetDecomposition kerr_analytic_floquet(const KerrCavityParams& params, int n, int harmonic_cutoff, int samples) {
  require_positive(params.kappa, "kappa");
  if (n < 1) throw UnsupportedDimensionError("analytic Kerr Floquet data need n >= 1");
  if (harmonic_cutoff < 0) throw InvalidParameterError("harmonic cutoff must be nonnegative");
  const Waveform wave = params.waveform();
  const double omega = params.omega;
  const int K = harmonic_cutoff;

  FloquetDecomposition dec;
  dec.n = n;
  dec.omega = omega;
  dec.harmonic_cutoff = K;
  dec.sample_grid = samples;
  dec.provenance.method = "kerr_analytic";

  const double eps = params.chi * n * (n - 1);
  const double folded = fold_quasi_energy(eps, omega);
  dec.lambdas = {cplx(folded, -n * params.kappa / 2.0)};
  dec.harmonic_shift = {static_cast<int>(std::lround((eps - folded) / omega))};

  // Coefficients f_m of exp(-i n phi(t)) in the basis exp(-i m omega t).
  std::vector<cplx> f(static_cast<std::size_t>(2 * K + 1));
  if (wave.kind() == Waveform::Kind::sinusoid) {
    const double z = n * params.delta0 / omega;
    const cplx lead = std::exp(-I * z);
    for (int m = -K; m <= K; ++m) f[m + K] = lead * std::pow(I, m) * bessel_j(m, z);
  } else {
    if (samples < 1) throw InvalidParameterError("sample grid must be positive");
    const double T = 2.0 * pi / omega;
    for (int j = 0; j < samples; ++j) {
      const double t = j * T / samples;
      const cplx v = std::exp(-I * (n * wave.phase(t)));
      for (int m = -K; m <= K; ++m) f[m + K] += v * std::exp(I * (m * omega * t)) / static_cast<double>(samples);
    }
  }
  for (int m = -K; m <= K; ++m) {
    dec.right_fourier.push_back(scalar(f[m + K]));
    dec.left_fourier.push_back(scalar(std::conj(f[-m + K])));
  }
  return dec;
}

// ---------------------------------------------------------------------------
// Parametric families

ParametricFamily::ParametricFamily(int n_params, std::vector<int> subspace_dims, BlockFn h_block,
                                   std::vector<Matrix> l_blocks, DerivFn dh_block, std::uint64_t fingerprint)
    : n_params_(n_params),
      dims_(std::move(subspace_dims)),
      h_(std::move(h_block)),
      l_(std::move(l_blocks)),
      dh_(std::move(dh_block)),
      fingerprint_(fingerprint) {
  if (n_params_ < 0) throw InvalidParameterError("parameter count must be nonnegative");
  if (dims_.empty() || dims_.front() != 1) throw InvalidParameterError("family needs a one-dimensional ground block");
  if (l_.size() + 1 != dims_.size()) throw InvalidParameterError("family needs one lowering block per excited level");
}

Matrix ParametricFamily::h_block(int n, std::span<const double> p) const {
  if (n == 0) return Matrix::Zero(1, 1);
  return h_(n, p);
}

Matrix ParametricFamily::h_eff(int n, std::span<const double> p) const {
  if (n == 0) return Matrix::Zero(1, 1);
  const Matrix& l = l_block(n);
  return h_(n, p) - I * (l.adjoint() * l);
}

Matrix ParametricFamily::dh_block(int n, int j, std::span<const double> p) const {
  if (!dh_) throw DerivativeUnavailableError("parametric family has no parameter-derivative blocks");
  if (j < 0 || j >= n_params_) throw InvalidParameterError("parameter index out of range");
  if (n == 0) return Matrix::Zero(1, 1);
  return dh_(n, j, p);
}

const Matrix& ParametricFamily::l_block(int n) const {
  if (n < 1 || n > n_max()) throw UnsupportedDimensionError("lowering block index out of range");
  return l_[static_cast<std::size_t>(n - 1)];
}

ParametricFamily ParametricFamily::with_finite_difference_derivatives(double h) const {
  if (dh_) return *this;
  auto hf = h_;
  auto fd = [hf, h](int n, int j, std::span<const double> p) {
    std::vector<double> a(p.begin(), p.end());
    std::vector<double> b(p.begin(), p.end());
    a[static_cast<std::size_t>(j)] += h;
    b[static_cast<std::size_t>(j)] -= h;
    return Matrix((hf(n, a) - hf(n, b)) / (2.0 * h));
  };
  ParametricFamily out(n_params_, dims_, h_, l_, fd, fingerprint_);
  out.approximate_ = true;
  return out;
}

LadderSystem ParametricFamily::at(std::span<const double> p, double omega) const {
  std::vector<double> pv(p.begin(), p.end());
  auto hf = h_;
  auto h = [hf, pv](int n, double) { return hf(n, pv); };
  std::string fp = "family-at;" + std::to_string(fingerprint_);
  for (double v : pv) fp += ';' + fmt_double(v);
  return LadderSystem(omega, dims_, std::move(h), l_, true, fnv1a(fp));
}

LadderSystem ParametricFamily::along(const ParameterLoop& loop) const {
  if (loop.dim() != n_params_) throw InvalidParameterError("loop dimension does not match the parameter chart");
  auto hf = h_;
  auto h = [hf, loop](int n, double t) {
    const Eigen::VectorXd p = loop.position(t);
    return hf(n, std::span<const double>(p.data(), static_cast<std::size_t>(p.size())));
  };
  std::ostringstream fp;
  fp << "family-along;" << fingerprint_ << ';' << fmt_double(loop.period());
  for (int j = 0; j < 16; ++j) {
    const Eigen::VectorXd p = loop.position(j * loop.period() / 16.0);
    for (double v : p) fp << ';' << fmt_double(v);
  }
  return LadderSystem(loop.omega(), dims_, std::move(h), l_, false, fnv1a(fp.str()));
}

ParametricFamily jaynes_cummings_family(const JaynesCummingsParams& params, int n_max) {
  check_jc(params, n_max);
  const double we = params.omega_e;
  const double wc = params.omega_c;
  auto h = [we, wc](int n, std::span<const double> p) { return jc_block(we, wc, cplx(p[0], p[1]), n); };
  auto dh = [](int n, int j, std::span<const double>) {
    const double c = n == 1 ? 1.0 : std::sqrt(2.0);
    Matrix d(2, 2);
    if (j == 0) {
      d << 0.0, c, c, 0.0;
    } else {
      d << 0.0, c * I, -c * I, 0.0;
    }
    return d;
  };
  std::vector<int> dims(static_cast<std::size_t>(n_max) + 1, 2);
  dims[0] = 1;
  return ParametricFamily(2, std::move(dims), std::move(h), jc_lowering(params.kappa, n_max), std::move(dh),
                          fnv1a(jc_fingerprint(params, n_max)));
}

ParametricFamily kerr_family(double kappa, double chi, int n_max) {
  require_positive(kappa, "kappa");
  if (n_max < 1) throw UnsupportedDimensionError("Kerr family needs n_max >= 1");
  std::vector<Matrix> l;
  for (int n = 1; n <= n_max; ++n) l.push_back(scalar(std::sqrt(n * kappa / 2.0)));
  auto h = [chi](int n, std::span<const double> p) { return scalar(n * p[0] + chi * n * (n - 1)); };
  auto dh = [](int n, int, std::span<const double>) { return scalar(static_cast<double>(n)); };
  const std::string fp = "kerr-family;" + fmt_double(kappa) + ';' + fmt_double(chi) + ';' + std::to_string(n_max);
  return ParametricFamily(1, std::vector<int>(static_cast<std::size_t>(n_max) + 1, 1), std::move(h), std::move(l),
                          std::move(dh), fnv1a(fp));
}

}  // namespace floqsmat
