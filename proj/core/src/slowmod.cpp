#include "floqsmat/slowmod.hpp"

#include "floqsmat/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <sstream>

namespace floqsmat {

namespace {

constexpr double kMinRcond = 1e-14;

double factorial(int N) {
  double f = 1.0;
  for (int i = 2; i <= N; ++i) f *= i;
  return f;
}

cplx minus_i_pow(int N) {
  cplx r = 1.0;
  for (int i = 0; i < N; ++i) r *= -I;
  return r;
}

void check_order(int N, int n_max) {
  if (N < 1) throw InvalidParameterError("photon number must be at least 1");
  if (N > n_max) throw UnsupportedDimensionError("photon number exceeds the ladder truncation");
}

// Factorized resolvents and the chain v_n = R_n l_n^dag v_{n-1} at one parameter point.
struct Chain {
  std::vector<Eigen::PartialPivLU<Matrix>> lu;  // index n - 1
  std::vector<Vector> v;                        // index n, v[0] = |g>
  RowVector w;                                  // <g| l_1 ... l_N
};

template <class HeffFn, class LFn>
Chain build_chain(const HeffFn& heff, const LFn& lblock, double nu, int N) {
  Chain c;
  c.v.push_back(Vector::Ones(1));
  for (int n = 1; n <= N; ++n) {
    Matrix A = heff(n);
    A.diagonal().array() -= static_cast<double>(n) * nu;
    Eigen::PartialPivLU<Matrix> lu(A);
    const double rc = lu.rcond();
    if (!(rc > kMinRcond)) {
      std::ostringstream os;
      os << "resolvent of subspace " << n << " is singular at nu = " << nu << " (rcond " << rc << ")";
      throw ResolventSingularError(os.str());
    }
    c.v.push_back(lu.solve(lblock(n).adjoint() * c.v.back()));
    c.lu.push_back(std::move(lu));
  }
  c.w = RowVector::Ones(1);
  for (int n = 1; n <= N; ++n) c.w = c.w * lblock(n);
  return c;
}

Chain family_chain(const ParametricFamily& family, std::span<const double> p, double nu, int N) {
  check_order(N, family.n_max());
  return build_chain([&](int n) { return family.h_eff(n, p); }, [&](int n) -> const Matrix& { return family.l_block(n); },
                     nu, N);
}

}  // namespace

cplx instantaneous_g0(const ParametricFamily& family, std::span<const double> p, double nu, int N) {
  const Chain c = family_chain(family, p, nu, N);
  return minus_i_pow(N) * (c.w * c.v[N])(0);
}

cplx instantaneous_g0(const LadderSystem& sys, double nu, int N) {
  check_order(N, sys.n_max());
  const Chain c = build_chain([&](int n) { return sys.h_eff(n, 0.0); },
                              [&](int n) -> const Matrix& { return sys.l_block(n); }, nu, N);
  return minus_i_pow(N) * (c.w * c.v[N])(0);
}

Vector instantaneous_g1(const ParametricFamily& family, std::span<const double> p, double nu, int N) {
  return instantaneous_amplitudes(family, p, nu, N).g1;
}

InstantAmplitudes instantaneous_amplitudes(const ParametricFamily& family, std::span<const double> p, double nu,
                                           int N) {
  if (!family.has_derivatives()) {
    throw DerivativeUnavailableError("first-order amplitude needs parameter derivatives of the Hamiltonian");
  }
  const Chain c = family_chain(family, p, nu, N);
  InstantAmplitudes out;
  out.g0 = minus_i_pow(N) * (c.w * c.v[N])(0);

  // Bras b_N = w, b_k = b_{k+1} R_{k+1} l_{k+1}^dag.
  std::vector<RowVector> bR(static_cast<std::size_t>(N) + 1);
  RowVector b = c.w;
  for (int k = N; k >= 1; --k) {
    const auto& lu = c.lu[static_cast<std::size_t>(k - 1)];
    bR[k] = b * lu.inverse();
    if (k > 1) b = bR[k] * family.l_block(k).adjoint();
  }

  const int M = family.n_params();
  out.g1 = Vector::Zero(M);
  for (int j = 0; j < M; ++j) {
    // dv_n = R_n (l_n^dag dv_{n-1} - dH_n v_n), dv_0 = 0.
    Vector dv = Vector::Zero(1);
    cplx acc = 0.0;
    for (int n = 1; n <= N; ++n) {
      const Vector src = family.l_block(n).adjoint() * dv - family.dh_block(n, j, p) * c.v[n];
      dv = c.lu[static_cast<std::size_t>(n - 1)].solve(src);
      acc += (bR[n] * dv)(0);
    }
    out.g1[j] = minus_i_pow(N - 1) * acc;
  }
  return out;
}

double g_zeroth(const ParameterLoop& loop, const ParametricFamily& family, double nu, int N,
                const QuadratureSpec& quad) {
  check_order(N, family.n_max());
  const double T = loop.period();
  auto f = [&](double t) {
    const Eigen::VectorXd p = loop.position(t);
    return std::norm(instantaneous_g0(family, std::span<const double>(p.data(), static_cast<std::size_t>(p.size())), nu, N));
  };
  double error = 0.0;
  const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, 0.0, T, static_cast<unsigned>(quad.max_depth), 1e-2 * quad.tol, &error);
  const double value = factorial(N) * integral / T;
  const double abs_error = factorial(N) * error / T;
  if (!(abs_error <= quad.tol) || !std::isfinite(value)) {
    std::ostringstream os;
    os << "zeroth-order quadrature did not converge: estimate " << value << ", error " << abs_error;
    throw AccuracyError(os.str(), value, abs_error);
  }
  return value;
}

double g_first(const ParameterLoop& loop, const ParametricFamily& family, double nu, int N) {
  check_order(N, family.n_max());
  // A closed curve in one dimension retraces itself, so the line integral of any function of p vanishes.
  if (loop.length() == 0.0 || loop.dim() == 1) return 0.0;
  const auto& pts = loop.loop_points();
  const auto& tan = loop.tangents();
  const double ds = loop.length() / static_cast<double>(pts.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    const auto& p = pts[j];
    const InstantAmplitudes a =
        instantaneous_amplitudes(family, std::span<const double>(p.data(), static_cast<std::size_t>(p.size())), nu, N);
    cplx dot = 0.0;
    for (Eigen::Index i = 0; i < a.g1.size(); ++i) dot += a.g1[i] * tan[j][i];
    acc += (std::conj(a.g0) * dot).real();
  }
  const double value = factorial(N) / pi * acc * ds;
  if (!std::isfinite(value)) throw AccuracyError("first-order loop integral is not finite", value, INFINITY);
  return value;
}

double g_first_time_sampled(const ParameterLoop& loop, const ParametricFamily& family, double nu, int N, int samples) {
  check_order(N, family.n_max());
  if (samples < 1) throw InvalidParameterError("time sampling needs at least one sample");
  const double T = loop.period();
  double acc = 0.0;
  for (int j = 0; j < samples; ++j) {
    const double t = T * j / samples;
    const Eigen::VectorXd p = loop.position(t);
    const Eigen::VectorXd v = loop.velocity(t);
    const InstantAmplitudes a =
        instantaneous_amplitudes(family, std::span<const double>(p.data(), static_cast<std::size_t>(p.size())), nu, N);
    cplx dot = 0.0;
    for (Eigen::Index i = 0; i < a.g1.size(); ++i) dot += a.g1[i] * v[i];
    acc += (std::conj(a.g0) * dot).real();
  }
  return factorial(N) / pi * acc * T / samples;
}

double extrapolate_to_zero(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.empty()) throw InvalidParameterError("extrapolation needs matching nonempty data");
  std::vector<double> p(ys.begin(), ys.end());
  const std::size_t n = p.size();
  // Neville's tableau evaluated at x = 0.
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = 0; i + level < n; ++i) {
      const double xi = xs[i];
      const double xj = xs[i + level];
      p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
    }
  }
  return p[0];
}

SlowmodValidation slowmod_validate_against_exact(const ParameterLoop& loop, const ParametricFamily& family,
                                                 std::span<const double> nu_grid, int N,
                                                 std::span<const double> omegas, const WindowSpec& window) {
  check_order(N, family.n_max());
  if (omegas.empty()) throw InvalidParameterError("validation needs at least one modulation frequency");
  SlowmodValidation rep;
  rep.nu_grid.assign(nu_grid.begin(), nu_grid.end());
  rep.omegas.assign(omegas.begin(), omegas.end());
  for (double nu : nu_grid) {
    rep.g0.push_back(g_zeroth(loop, family, nu, N));
    rep.g1.push_back(g_first(loop, family, nu, N));
  }
  for (double omega : omegas) {
    if (!(omega > 0.0)) throw InvalidParameterError("modulation frequencies must be positive");
    const ParameterLoop scaled = loop.with_period(2.0 * pi / omega);
    const LadderSystem sys = family.along(scaled);
    std::vector<double> exact;
    std::vector<double> slope;
    for (std::size_t i = 0; i < nu_grid.size(); ++i) {
      const double g = oracle_equal_time_gn(sys, nu_grid[i], N, window);
      exact.push_back(g);
      slope.push_back((g - rep.g0[i]) / omega);
    }
    rep.exact.push_back(std::move(exact));
    rep.slopes.push_back(std::move(slope));
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < nu_grid.size(); ++i) {
    std::vector<double> ys;
    for (const auto& s : rep.slopes) ys.push_back(s[i]);
    const double e = extrapolate_to_zero(omegas, ys);
    rep.extrapolated_slope.push_back(e);
    num += (e - rep.g1[i]) * (e - rep.g1[i]);
    den += rep.g1[i] * rep.g1[i];
  }
  rep.relative_deviation = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  return rep;
}

}  // namespace floqsmat
