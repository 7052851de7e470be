#include "floqsmat/ode.hpp"

#include "floqsmat/errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace floqsmat::ode {

namespace odeint = boost::numeric::odeint;

namespace {

constexpr double kRelativeStepFloor = 1e-13;
constexpr long kMaxSteps = 50'000'000;

[[noreturn]] void throw_stiff(const char* why, double t) {
  std::ostringstream os;
  os << "propagator: " << why << " at t = " << t;
  throw StiffnessError(os.str(), t);
}

}  // namespace

void integrate(const Rhs& rhs, State& x, double t0, double t1, const ToleranceSpec& tol,
               std::span<const double> times, const Observer& observe) {
  std::size_t next = 0;
  if (t1 == t0) {
    for (; next < times.size(); ++next) {
      if (observe) observe(times[next], x);
    }
    return;
  }
  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);

  // Steps are clipped to land on every observation time and on t1, so sampled states carry
  // the full step accuracy instead of the lower-order interpolant error.
  auto system = [&rhs](const State& y, State& dydt, double t) { rhs(y, dydt, t); };
  auto stepper = odeint::make_controlled(tol.atol, tol.rtol, odeint::runge_kutta_dopri5<State>());
  double t = t0;
  double dt = dir * std::min(span, 1e-3 * std::max(1.0, span));
  long steps = 0;
  long rejected = 0;
  while (dir * (t1 - t) > 0.0) {
    while (next < times.size() && dir * (times[next] - t) <= 0.0) {
      if (observe) observe(times[next], x);
      ++next;
    }
    const double target = next < times.size() ? times[next] : t1;
    const double room = target - t;
    const bool clipped = std::abs(dt) >= std::abs(room);
    double h = clipped ? room : dt;
    const double planned = dt;
    const auto result = stepper.try_step(system, x, t, h);
    if (result == odeint::success) {
      rejected = 0;
      if (clipped) {
        t = target;  // remove rounding drift from t += h
        dt = std::abs(h) > std::abs(planned) ? h : planned;
      } else {
        dt = h;
      }
      if (++steps > kMaxSteps) throw_stiff("step budget exhausted", t);
    } else {
      dt = h;
      if (std::abs(dt) < kRelativeStepFloor * std::max(1.0, std::abs(t))) throw_stiff("step size underflow", t);
      if (++rejected > 500) throw_stiff("step adjustment failed", t);
    }
  }
  for (; next < times.size(); ++next) {
    if (observe) observe(times[next], x);
  }
}

}  // namespace floqsmat::ode
