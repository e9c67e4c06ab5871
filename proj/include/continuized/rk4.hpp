#pragma once

#include <cmath>
#include <stdexcept>

namespace continuized::detail {

/// One classical fourth-order Runge-Kutta step of dy/ds = rhs(s, y).
template <class State, class Rhs>
State rk4_step(const Rhs& rhs, double s, const State& y, double h) {
  const State k1 = rhs(s, y);
  const State k2 = rhs(s + 0.5 * h, State(y + (0.5 * h) * k1));
  const State k3 = rhs(s + 0.5 * h, State(y + (0.5 * h) * k2));
  const State k4 = rhs(s + h, State(y + h * k3));
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Number of fixed steps covering [s0, s1] with nominal step h; the effective
/// step is (s1 - s0) / n so the endpoint is hit exactly.
inline long fixed_step_count(double s0, double s1, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("step size must be > 0");
  const double n = std::ceil((s1 - s0) / h - 1e-9);
  return n < 1.0 ? 1 : static_cast<long>(n);
}

}  // namespace continuized::detail
