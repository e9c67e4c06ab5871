#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "continuized/oracle.hpp"
#include "continuized/random.hpp"
#include "continuized/schedules.hpp"

namespace continuized {

/// -ln(1 - u): inverse CDF of Exp(1).
double exponential_from_uniform(double u);

/// One Exp(1) interarrival, strictly positive.
double sample_interarrival(RandomStream& rng);

/// Poisson clock of rate 1. The upcoming jump time is drawn ahead so callers
/// can compare it with a deadline before committing to the jump.
class JumpClock {
 public:
  explicit JumpClock(RandomStream rng);

  /// Last jump time T_k (0 before the first jump).
  double time() const { return t_current_; }
  /// Upcoming jump time T_{k+1}.
  double next_time() const { return t_next_; }
  /// Jumps taken so far.
  long count() const { return k_; }

  /// Moves to the upcoming jump, returns its time and draws the following one.
  double advance();

 private:
  RandomStream rng_;
  double t_current_ = 0.0;
  double t_next_ = 0.0;
  long k_ = 0;
};

struct MixState {
  Vector x;
  Vector z;
};

/// Closed-form flow of dx = (2/t)(z - x) dt, dz = 0 from t0 to t1.
/// At t0 = 0 the flow sends x to z.
MixState mix_convex(const MixState& s, double t0, double t1);

/// Closed-form flow of dx = q (z - x) dt, dz = q (x - z) dt, q = sqrt(mu/L),
/// over a duration dt.
MixState mix_strongly_convex(const MixState& s, double mu, double L, double dt);

/// Closed-form mixing for the schedule's regime over [t0, t1]. Identity if
/// t1 == t0.
MixState mix(const ContinuousSchedule& sched, const MixState& s, double t0, double t1);

/// Fixed-step RK4 integration of dx = eta(t)(z - x) dt, dz = eta'(t)(x - z) dt.
MixState mix_numeric(const MixState& s, const std::function<double(double)>& eta,
                     const std::function<double(double)>& eta_prime, double t0, double t1,
                     double h);

/// Gradient jump x -= gamma g, z -= gamma' g.
MixState gradient_jump(const MixState& s, const Vector& g, double gamma, double gamma_prime);

// ---------------------------------------------------------------------------
// Scaling-limit ODEs.

struct TrajectorySample {
  double s = 0.0;
  Vector x;
  double f_gap = 0.0;
};

using Trajectory = std::vector<TrajectorySample>;

/// x'' + (3/s) x' + grad f(x) = 0 on [h, s_max]. The singular start is
/// replaced by the regular series x(h) = x0 - grad f(x0) h^2/8,
/// x'(h) = -grad f(x0) h/4. Samples every `stride` steps plus the endpoint.
Trajectory integrate_limit_convex(const Objective& obj, const Vector& x0, double s_max, double h,
                                  int stride = 1);

/// x'' + 2 sqrt(mu) x' + grad f(x) = 0 on [0, s_max] with x'(0) = 0.
Trajectory integrate_limit_strongly_convex(const Objective& obj, double mu, const Vector& x0,
                                           double s_max, double h, int stride = 1);

/// CSV rows (s, x_1..x_d, f_gap) with a header line.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace continuized
