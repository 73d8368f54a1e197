#pragma once

#include <cmath>
#include <cstdlib>

#include "greenpol/errors.hpp"

namespace greenpol {

struct StepControl {
  // Per-step error target, relative to max(1, |state|).
  double tol = 1e-12;
  double min_step = 1e-12;  // below this the integration aborts
  // Also bounds the knot spacing of strip interpolants; the cubic Hermite
  // error over one knot interval stays below the transport tolerances.
  double max_step = 0.05;
};

// Classic RK4 with adaptive halving. The error estimate compares one full
// step against two half steps (the usual RK4/RK5-style local estimate);
// the half-step solution is kept. State must support +, scalar *, and a
// norm() member (Eigen vectors/matrices qualify).
template <class State, class Deriv>
State rk4_step(const Deriv& f, double t, const State& y, double h) {
  State k1 = f(t, y);
  State k2 = f(t + 0.5 * h, State(y + (0.5 * h) * k1));
  State k3 = f(t + 0.5 * h, State(y + (0.5 * h) * k2));
  State k4 = f(t + h, State(y + h * k3));
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Integrates from t0 to t1 (either direction). Calls `emit(t, y)` after
// every accepted step, including the initial state.
template <class State, class Deriv, class Emit>
State integrate_adaptive(const Deriv& f, double t0, double t1, State y, const StepControl& ctrl,
                         const Emit& emit) {
  emit(t0, y);
  if (t0 == t1) return y;
  double dir = (t1 > t0) ? 1.0 : -1.0;
  double t = t0;
  double h = std::min(ctrl.max_step, std::abs(t1 - t0));
  while (dir * (t1 - t) > 0.0) {
    h = std::min(h, std::abs(t1 - t));
    for (;;) {
      State full = rk4_step(f, t, y, dir * h);
      State half = rk4_step(f, t, y, dir * h * 0.5);
      State two = rk4_step(f, t + dir * h * 0.5, half, dir * h * 0.5);
      double err = (full - two).norm() / 15.0;
      double budget = ctrl.tol * std::max(1.0, two.norm());
      bool acceptable = err <= budget;  // NaN-safe: NaN compares false
      if (acceptable || h <= ctrl.min_step) {
        if (!acceptable)
          throw StepCollapseError("adaptive step collapsed below the minimum step size");
        t += dir * h;
        y = two;
        emit(t, y);
        // Grow cautiously when the estimate leaves headroom.
        if (err < 0.01 * budget) h = std::min(ctrl.max_step, 2.0 * h);
        break;
      }
      h *= 0.5;
    }
  }
  return y;
}

}  // namespace greenpol
