#include "continuized/jumpflow.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "continuized/rk4.hpp"

namespace continuized {

double exponential_from_uniform(double u) {
  if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("u must lie in [0, 1)");
  return -std::log1p(-u);
}

double sample_interarrival(RandomStream& rng) {
  double u = rng.uniform();
  while (u == 0.0) u = rng.uniform();
  return exponential_from_uniform(u);
}

JumpClock::JumpClock(RandomStream rng) : rng_(std::move(rng)) {
  t_next_ = sample_interarrival(rng_);
}

double JumpClock::advance() {
  t_current_ = t_next_;
  ++k_;
  t_next_ = t_current_ + sample_interarrival(rng_);
  return t_current_;
}

namespace {

void check_state(const MixState& s) {
  if (s.x.size() != s.z.size()) throw std::invalid_argument("x and z dimensions differ");
  if (!s.x.allFinite() || !s.z.allFinite()) throw std::invalid_argument("non-finite mix state");
}

}  // namespace

MixState mix_convex(const MixState& s, double t0, double t1) {
  check_state(s);
  if (!(t0 >= 0.0)) throw std::invalid_argument("t0 must be >= 0");
  if (!(t1 > t0)) throw std::invalid_argument("mix_convex requires t1 > t0");
  if (t0 == 0.0) return {s.z, s.z};
  const double r = t0 / t1;
  const double w = 1.0 - r * r;
  return {s.x + w * (s.z - s.x), s.z};
}

MixState mix_strongly_convex(const MixState& s, double mu, double L, double dt) {
  check_state(s);
  if (!(dt > 0.0)) throw std::invalid_argument("mix_strongly_convex requires dt > 0");
  if (!(mu > 0.0) || !(L > 0.0)) throw std::invalid_argument("mu and L must be > 0");
  const double c = -0.5 * std::expm1(-2.0 * std::sqrt(mu / L) * dt);
  const Vector diff = s.z - s.x;
  return {s.x + c * diff, s.z - c * diff};
}

MixState mix(const ContinuousSchedule& sched, const MixState& s, double t0, double t1) {
  if (t1 == t0) return s;
  if (sched.regime() == Regime::convex) return mix_convex(s, t0, t1);
  if (!(t1 > t0)) throw std::invalid_argument("mix requires t1 >= t0");
  return mix_strongly_convex(s, sched.mu(), sched.L(), t1 - t0);
}

MixState mix_numeric(const MixState& s, const std::function<double(double)>& eta,
                     const std::function<double(double)>& eta_prime, double t0, double t1,
                     double h) {
  check_state(s);
  if (!(t1 > t0)) throw std::invalid_argument("mix_numeric requires t1 > t0");
  if (!(h > 0.0) || h > (t1 - t0) * (1.0 + 1e-12))
    throw std::invalid_argument("step h must lie in (0, t1 - t0]");

  const Eigen::Index d = s.x.size();
  Vector y(2 * d);
  y << s.x, s.z;
  auto rhs = [&](double t, const Vector& v) -> Vector {
    const double e = eta(t);
    const double ep = eta_prime(t);
    if (!std::isfinite(e) || !std::isfinite(ep))
      throw std::domain_error("mixing rate is not finite on the integration interval");
    Vector out(2 * d);
    const auto x = v.head(d);
    const auto z = v.tail(d);
    out.head(d) = e * (z - x);
    out.tail(d) = ep * (x - z);
    return out;
  };

  const long n = detail::fixed_step_count(t0, t1, h);
  const double step = (t1 - t0) / static_cast<double>(n);
  double t = t0;
  for (long i = 0; i < n; ++i) {
    y = detail::rk4_step<Vector>(rhs, t, y, step);
    t = t0 + static_cast<double>(i + 1) * step;
  }
  if (!y.allFinite()) throw std::domain_error("numeric mixing diverged");
  return {y.head(d), y.tail(d)};
}

MixState gradient_jump(const MixState& s, const Vector& g, double gamma, double gamma_prime) {
  return {s.x - gamma * g, s.z - gamma_prime * g};
}

namespace {

// Integrates the second-order system x'' = accel(s, x, x') as (x, v).
template <class Accel>
Trajectory integrate_second_order(const Objective& obj, Vector x, Vector v, double s0,
                                  double s_max, double h, int stride, const Accel& accel) {
  if (!(h > 0.0)) throw std::invalid_argument("step h must be > 0");
  if (!(s_max > s0)) throw std::invalid_argument("s_max must exceed the start time");
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  const Eigen::Index d = x.size();
  Vector y(2 * d);
  y << x, v;
  auto rhs = [&](double s, const Vector& state) -> Vector {
    Vector out(2 * d);
    out.head(d) = state.tail(d);
    out.tail(d) = accel(s, Vector(state.head(d)), Vector(state.tail(d)));
    return out;
  };

  const long n = detail::fixed_step_count(s0, s_max, h);
  const double step = (s_max - s0) / static_cast<double>(n);
  Trajectory traj;
  traj.reserve(static_cast<std::size_t>(n / stride + 2));
  traj.push_back({s0, y.head(d), obj.gap(y.head(d))});
  for (long i = 1; i <= n; ++i) {
    const double s = s0 + static_cast<double>(i - 1) * step;
    y = detail::rk4_step<Vector>(rhs, s, y, step);
    if (!y.allFinite()) throw std::domain_error("limit ODE integration diverged");
    if (i % stride == 0 || i == n)
      traj.push_back({s0 + static_cast<double>(i) * step, y.head(d), obj.gap(y.head(d))});
  }
  return traj;
}

}  // namespace

Trajectory integrate_limit_convex(const Objective& obj, const Vector& x0, double s_max, double h,
                                  int stride) {
  if (!(h > 0.0)) throw std::invalid_argument("step h must be > 0");
  const Vector g0 = obj.grad(x0);
  Vector x = x0 - (h * h / 8.0) * g0;
  Vector v = -(h / 4.0) * g0;
  auto accel = [&obj](double s, const Vector& xs, const Vector& vs) -> Vector {
    return -(3.0 / s) * vs - obj.grad(xs);
  };
  return integrate_second_order(obj, std::move(x), std::move(v), h, s_max, h, stride, accel);
}

Trajectory integrate_limit_strongly_convex(const Objective& obj, double mu, const Vector& x0,
                                           double s_max, double h, int stride) {
  if (!(mu > 0.0)) throw std::invalid_argument("mu must be > 0");
  if (!(h > 0.0)) throw std::invalid_argument("step h must be > 0");
  const double damping = 2.0 * std::sqrt(mu);
  auto accel = [&obj, damping](double, const Vector& xs, const Vector& vs) -> Vector {
    return -damping * vs - obj.grad(xs);
  };
  obj.grad(x0);  // validates x0
  return integrate_second_order(obj, x0, Vector::Zero(x0.size()), 0.0, s_max, h, stride, accel);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const Eigen::Index d = traj.empty() ? 0 : traj.front().x.size();
  out << "s";
  for (Eigen::Index i = 1; i <= d; ++i) out << ",x" << i;
  out << ",f_gap\n";
  for (const auto& p : traj) {
    out << fmt::format("{:.17g}", p.s);
    for (Eigen::Index i = 0; i < d; ++i) out << fmt::format(",{:.17g}", p.x[i]);
    out << fmt::format(",{:.17g}\n", p.f_gap);
  }
}

}  // namespace continuized
