#include "floqsmat/oracle.hpp"

#include "floqsmat/errors.hpp"
#include "floqsmat/ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

namespace floqsmat {

namespace {

using ode::State;

double state_norm(const State& x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::norm(x[i]);
  return std::sqrt(s);
}

double default_span(const LadderSystem& sys, int n_top, const WindowSpec& w) {
  if (w.max_span > 0.0) return w.max_span;
  double rate = 0.0;
  for (int n = 1; n <= n_top; ++n) {
    const Matrix& g = sys.decay_block(n);
    const double r = g.trace().real() / static_cast<double>(g.rows());
    rate = n == 1 ? r : std::min(rate, r);
  }
  if (!(rate > 0.0)) throw TruncationError("oracle: no decay, the steady state does not exist", INFINITY);
  return 400.0 / rate + 8.0 * sys.period();
}

// Integrates whole periods from t_start in direction dir until the first n_track components
// have settled; returns the time reached (t_start + dir * J * T).
double settle(const ode::Rhs& rhs, State& x, double t_start, double period, int dir, std::size_t n_track,
              const WindowSpec& w, double max_span) {
  double t = t_start;
  double prev_change = -1.0;
  for (int j = 0;; ++j) {
    const State before = x;
    ode::integrate(rhs, x, t, t + dir * period, w.tol);
    t += dir * period;
    double change = 0.0;
    for (std::size_t i = 0; i < n_track; ++i) change += std::norm(x[i] - before[i]);
    change = std::sqrt(change);
    const double scale = state_norm(x, n_track);
    if (scale == 0.0) return t;
    double remaining = change;
    if (change <= std::max(1e-2 * w.settle_tol, 10.0 * w.tol.rtol) * scale) {
      // At the integrator's error floor the ratio of successive changes carries no information.
      remaining = 0.0;
    } else if (prev_change > 0.0 && change < prev_change) {
      const double rho = change / prev_change;
      remaining = change * rho / (1.0 - rho);
    } else if (prev_change >= 0.0 && change == 0.0) {
      remaining = 0.0;
    }
    if (j >= 1 && remaining <= w.settle_tol * scale) return t;
    if (std::abs(t - t_start) > max_span) {
      std::ostringstream os;
      os << "oracle: steady state not reached within a window of " << max_span << " (relative change "
         << remaining / scale << ")";
      throw TruncationError(os.str(), remaining / scale);
    }
    prev_change = change;
  }
}

// Adds -i (H - shift) v to dv for a column vector block.
void apply_generator(const Matrix& h, double shift, const cplx* v, cplx* dv, int d) {
  for (int r = 0; r < d; ++r) {
    cplx acc = 0.0;
    for (int c = 0; c < d; ++c) acc += h(r, c) * v[c];
    acc -= shift * v[r];
    dv[r] += -I * acc;
  }
}

struct ChainLayout {
  int d1 = 0;
  int d2 = 0;
  bool two_drives = false;  // separate first-stage amplitudes for each input frequency
  std::size_t psi1a = 0;
  std::size_t psi1b = 0;
  std::size_t psi2 = 0;
  std::size_t size = 0;
};

// Forward driven chain: psi1' = -i (H1 - nu_b) psi1 + l1^dag, psi2' = -i (H2 - nu1 - nu2) psi2 + l2^dag psi1,
// with psi1 summed over both absorption orders when the input frequencies differ.
struct DrivenChain {
  const LadderSystem& sys;
  int top;
  double nu1;
  double nu2;
  ChainLayout lay;
  Vector drive1;
  Matrix l2_dag;

  DrivenChain(const LadderSystem& s, int top_level, double a, double b) : sys(s), top(top_level), nu1(a), nu2(b) {
    lay.d1 = sys.dim(1);
    lay.two_drives = top == 2 && a != b;
    lay.psi1a = 0;
    lay.psi1b = lay.two_drives ? static_cast<std::size_t>(lay.d1) : 0;
    lay.psi2 = static_cast<std::size_t>(lay.d1) * (lay.two_drives ? 2 : 1);
    lay.d2 = top == 2 ? sys.dim(2) : 0;
    lay.size = lay.psi2 + static_cast<std::size_t>(lay.d2);
    drive1 = sys.l_block(1).adjoint().col(0);
    if (top == 2) l2_dag = sys.l_block(2).adjoint();
  }

  void operator()(const State& x, State& dx, double t) const {
    std::fill(dx.begin(), dx.begin() + static_cast<std::ptrdiff_t>(lay.size), cplx(0.0, 0.0));
    const Matrix h1 = sys.h_block(1, t) - I * sys.decay_block(1);
    const int d1 = lay.d1;
    const double first_a = top == 2 ? nu2 : nu1;
    apply_generator(h1, first_a, &x[lay.psi1a], &dx[lay.psi1a], d1);
    for (int r = 0; r < d1; ++r) dx[lay.psi1a + r] += drive1[r];
    if (lay.two_drives) {
      apply_generator(h1, nu1, &x[lay.psi1b], &dx[lay.psi1b], d1);
      for (int r = 0; r < d1; ++r) dx[lay.psi1b + r] += drive1[r];
    }
    if (top == 2) {
      const Matrix h2 = sys.h_block(2, t) - I * sys.decay_block(2);
      apply_generator(h2, nu1 + nu2, &x[lay.psi2], &dx[lay.psi2], lay.d2);
      // Both absorption orders feed the second stage; equal inputs give the same order twice.
      const double weight = lay.two_drives ? 1.0 : 2.0;
      for (int r = 0; r < lay.d2; ++r) {
        cplx acc = 0.0;
        for (int c = 0; c < d1; ++c) {
          cplx src = x[lay.psi1a + c];
          if (lay.two_drives) src += x[lay.psi1b + c];
          acc += l2_dag(r, c) * src;
        }
        dx[lay.psi2 + r] += weight * acc;
      }
    }
  }
};

// Settles the chain and returns the settled time (a whole number of periods after 0).
double settle_chain(const DrivenChain& chain, State& x, const WindowSpec& w) {
  const double span = default_span(chain.sys, chain.top, w);
  auto rhs = [&chain](const State& y, State& dy, double t) { chain(y, dy, t); };
  return settle(rhs, x, 0.0, chain.sys.period(), +1, chain.lay.size, w, span);
}

// Propagates a vector in subspace n from t_from to t_to under H_eff^n.
Vector propagate_vector(const LadderSystem& sys, int n, Vector v, double t_from, double t_to,
                        const ToleranceSpec& tol) {
  if (n == 0 || t_to == t_from) return v;
  const int d = sys.dim(n);
  State x(v.data(), v.data() + d);
  auto rhs = [&](const State& y, State& dy, double t) {
    std::fill(dy.begin(), dy.end(), cplx(0.0, 0.0));
    const Matrix h = sys.h_block(n, t) - I * sys.decay_block(n);
    apply_generator(h, 0.0, y.data(), dy.data(), d);
  };
  ode::integrate(rhs, x, t_from, t_to, tol);
  return Eigen::Map<const Vector>(x.data(), d);
}

}  // namespace

cplx green_single(const LadderSystem& sys, double t, double s, const ToleranceSpec& tol) {
  if (t < s) throw InvalidParameterError("green_single needs t >= s");
  const Vector v = propagate_vector(sys, 1, sys.l_block(1).adjoint().col(0), s, t, tol);
  return (sys.l_block(1) * v)(0);
}

cplx green_two(const LadderSystem& sys, double t1, double t2, double s1, double s2, const ToleranceSpec& tol) {
  if (sys.n_max() < 2) throw UnsupportedDimensionError("two-excitation Green's function needs n_max >= 2");
  struct Event {
    double time;
    bool lower;  // L (emission) when true, L^dagger otherwise
  };
  std::array<Event, 4> ev{{{s1, false}, {s2, false}, {t1, true}, {t2, true}}};
  std::sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) {
    if (a.time != b.time) return a.time < b.time;
    return !a.lower && b.lower;
  });
  int n = 0;
  Vector v = Vector::Ones(1);
  double now = ev.front().time;
  for (const Event& e : ev) {
    v = propagate_vector(sys, n, std::move(v), now, e.time, tol);
    now = e.time;
    if (e.lower) {
      if (n == 0) return 0.0;
      v = sys.l_block(n) * v;
      --n;
    } else {
      ++n;
      v = sys.l_block(n).adjoint() * v;
    }
  }
  return v(0);
}

std::vector<cplx> oracle_sk_window(const LadderSystem& sys, double nu, int k_lo, int k_hi, const WindowSpec& window) {
  if (k_hi < k_lo) throw InvalidParameterError("empty harmonic window");
  const DrivenChain chain(sys, 1, nu, nu);
  State x(chain.lay.size, cplx(0.0, 0.0));
  const double t_s = settle_chain(chain, x, window);

  const int nk = k_hi - k_lo + 1;
  const double T = sys.period();
  const double omega = sys.omega();
  const RowVector l1 = sys.l_block(1);
  const std::size_t base = chain.lay.size;
  x.resize(base + static_cast<std::size_t>(nk), cplx(0.0, 0.0));
  auto rhs = [&](const State& y, State& dy, double t) {
    chain(y, dy, t);
    cplx a = 0.0;
    for (int r = 0; r < chain.lay.d1; ++r) a += l1[r] * y[r];
    const double tau = t - t_s;
    for (int j = 0; j < nk; ++j) dy[base + j] = a * std::exp(I * ((k_lo + j) * omega * tau)) / T;
  };
  ode::integrate(rhs, x, t_s, t_s + T, window.tol);
  return std::vector<cplx>(x.begin() + static_cast<std::ptrdiff_t>(base), x.end());
}

cplx oracle_sk(const LadderSystem& sys, double nu, int k, const WindowSpec& window) {
  return oracle_sk_window(sys, nu, k, k, window).front();
}

double oracle_equal_time_gn(const LadderSystem& sys, double nu, int N, const WindowSpec& window, double t0) {
  if (N < 1 || N > 2) throw UnsupportedDimensionError("equal-time oracle supports N = 1 and N = 2");
  if (N > sys.n_max()) throw UnsupportedDimensionError("system ladder is truncated below N");
  const DrivenChain chain(sys, N, nu, nu);
  State x(chain.lay.size, cplx(0.0, 0.0));
  const double t_s = settle_chain(chain, x, window);
  const double T = sys.period();
  const double offset = t0 - T * std::floor(t0 / T);

  Matrix lower = sys.l_block(1);
  if (N == 2) lower = sys.l_block(1) * sys.l_block(2);
  const std::size_t top = N == 2 ? chain.lay.psi2 : chain.lay.psi1a;
  const int d_top = sys.dim(N);
  const std::size_t base = chain.lay.size;
  x.resize(base + 1, cplx(0.0, 0.0));
  auto rhs = [&](const State& y, State& dy, double t) {
    chain(y, dy, t);
    cplx w = 0.0;
    for (int r = 0; r < d_top; ++r) w += lower(0, r) * y[top + r];
    dy[base] = std::norm(w);
  };
  if (offset > 0.0) {
    ode::integrate(rhs, x, t_s, t_s + offset, window.tol);
    x[base] = 0.0;
  }
  ode::integrate(rhs, x, t_s + offset, t_s + offset + T, window.tol);
  // The chain amplitude already sums both absorption orders, so G_2 = (1 / (2 T)) int |w|^2.
  const double factorial = N == 2 ? 2.0 : 1.0;
  return x[base].real() / (factorial * T);
}

std::vector<cplx> oracle_equal_time_two_photon_harmonics(const LadderSystem& sys, double nu1, double nu2, int k_lo,
                                                         int k_hi, const WindowSpec& window) {
  if (sys.n_max() < 2) throw UnsupportedDimensionError("two-photon oracle needs n_max >= 2");
  const DrivenChain chain(sys, 2, nu1, nu2);
  State x(chain.lay.size, cplx(0.0, 0.0));
  const double t_s = settle_chain(chain, x, window);
  const double T = sys.period();
  const double omega = sys.omega();
  const Matrix lower = sys.l_block(1) * sys.l_block(2);
  const int nk = k_hi - k_lo + 1;
  const std::size_t base = chain.lay.size;
  x.resize(base + static_cast<std::size_t>(nk), cplx(0.0, 0.0));
  auto rhs = [&](const State& y, State& dy, double t) {
    chain(y, dy, t);
    cplx w = 0.0;
    for (int r = 0; r < chain.lay.d2; ++r) w += lower(0, r) * y[chain.lay.psi2 + r];
    const double tau = t - t_s;
    for (int j = 0; j < nk; ++j) dy[base + j] = w * std::exp(I * ((k_lo + j) * omega * tau)) / T;
  };
  ode::integrate(rhs, x, t_s, t_s + T, window.tol);
  return std::vector<cplx>(x.begin() + static_cast<std::ptrdiff_t>(base), x.end());
}

std::vector<cplx> oracle_connected_s2(const LadderSystem& sys, int k, double nu1, double nu2,
                                      std::span<const double> delta_grid, const WindowSpec& window) {
  if (sys.n_max() < 2) throw UnsupportedDimensionError("two-photon oracle needs n_max >= 2");
  const double T = sys.period();
  const double omega = sys.omega();
  const int M = window.grid_samples;
  if (M < 4) throw InvalidParameterError("oracle grid needs at least four samples per period");

  // Second-stage amplitude (sum over absorption orders) on the grid t_j = j T / M.
  const DrivenChain chain(sys, 2, nu1, nu2);
  State x(chain.lay.size, cplx(0.0, 0.0));
  const double t_s = settle_chain(chain, x, window);
  std::vector<double> times(static_cast<std::size_t>(M));
  for (int j = 0; j < M; ++j) times[j] = t_s + T * j / M;
  std::vector<Vector> psi2;
  psi2.reserve(static_cast<std::size_t>(M));
  auto rhs = [&chain](const State& y, State& dy, double t) { chain(y, dy, t); };
  auto grab = [&](double, const State& y) {
    psi2.emplace_back(Eigen::Map<const Vector>(y.data() + chain.lay.psi2, chain.lay.d2));
  };
  ode::integrate(rhs, x, t_s, t_s + T, window.tol, times, grab);
  const Matrix l2 = sys.l_block(2);
  std::vector<Vector> l2psi;
  for (const auto& p : psi2) l2psi.emplace_back(l2 * p);

  // Backward row eta' = -<g|L + i eta (H1 - w), periodic steady state sampled on the same grid.
  const int d1 = sys.dim(1);
  const Matrix l1 = sys.l_block(1);
  const double span = default_span(sys, 1, window);
  std::map<double, std::vector<RowVector>> eta_cache;
  const auto eta_for = [&](double w) -> const std::vector<RowVector>& {
    auto it = eta_cache.find(w);
    if (it != eta_cache.end()) return it->second;
    auto erhs = [&, w](const State& y, State& dy, double t) {
      const Matrix h1 = sys.h_block(1, t) - I * sys.decay_block(1);
      for (int c = 0; c < d1; ++c) {
        cplx acc = 0.0;
        for (int r = 0; r < d1; ++r) acc += y[r] * h1(r, c);
        acc -= w * y[c];
        dy[c] = -l1(0, c) + I * acc;
      }
    };
    State e(static_cast<std::size_t>(d1), cplx(0.0, 0.0));
    const double t_end = settle(erhs, e, 0.0, T, -1, static_cast<std::size_t>(d1), window, span);
    // One more backward period with samples; times descend from t_end to t_end - T.
    std::vector<double> back(static_cast<std::size_t>(M));
    for (int j = 0; j < M; ++j) back[j] = t_end - T * j / M;
    std::vector<RowVector> rows(static_cast<std::size_t>(M));
    std::size_t idx = 0;
    auto grab_row = [&](double, const State& y) {
      // back[idx] = t_end - idx T / M  which is congruent to grid point (M - idx) mod M.
      const std::size_t slot = idx == 0 ? 0 : static_cast<std::size_t>(M) - idx;
      rows[slot] = Eigen::Map<const RowVector>(y.data(), d1);
      ++idx;
    };
    ode::integrate(erhs, e, t_end, t_end - T, window.tol, back, grab_row);
    return eta_cache.emplace(w, std::move(rows)).first->second;
  };

  std::vector<cplx> out;
  out.reserve(delta_grid.size());
  for (double delta : delta_grid) {
    const double total = nu1 + nu2 + k * omega;
    const double w1 = (total + delta) / 2.0;
    const double w2 = (total - delta) / 2.0;
    const auto& e1 = eta_for(w1);
    const auto& e2 = eta_for(w2);
    cplx acc = 0.0;
    for (int j = 0; j < M; ++j) {
      const cplx f = (e1[j] * l2psi[j])(0) + (e2[j] * l2psi[j])(0);
      acc += f * std::exp(I * (k * omega * (T * j / M)));
    }
    out.push_back(acc / static_cast<double>(M) / (2.0 * pi));
  }
  return out;
}

}  // namespace floqsmat
