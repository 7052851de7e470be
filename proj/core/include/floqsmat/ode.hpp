#pragma once

#include "floqsmat/types.hpp"

#include <functional>
#include <span>
#include <vector>

namespace floqsmat::ode {

using State = std::vector<cplx>;
using Rhs = std::function<void(const State& x, State& dxdt, double t)>;
using Observer = std::function<void(double t, const State& x)>;

// Integrates dx/dt = rhs(x, t) from t0 to t1 (t1 < t0 integrates backward) with
// Dormand-Prince 5(4) and dense output. `observe` is called at each entry of `times`,
// which must be ordered along the direction of integration and lie between t0 and t1.
// Throws StiffnessError when the step size underflows.
void integrate(const Rhs& rhs, State& x, double t0, double t1, const ToleranceSpec& tol,
               std::span<const double> times = {}, const Observer& observe = nullptr);

}  // namespace floqsmat::ode
