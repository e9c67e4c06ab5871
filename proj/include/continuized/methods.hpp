#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "continuized/jumpflow.hpp"
#include "continuized/oracle.hpp"
#include "continuized/schedules.hpp"

namespace continuized {

enum class Method { gd, nesterov, continuized };

std::string_view to_string(Method method);
Method parse_method(std::string_view text);

/// Iterate tuple. `y` holds the last extrapolated point; `t` is the jump time
/// T_k for continuized runs and 0 for deterministic ones.
struct MethodState {
  Vector x;
  Vector z;
  Vector y;
  long k = 0;
  double t = 0.0;

  static MethodState start_at(const Vector& x0);
};

struct RunRecord {
  long k = 0;
  double t = 0.0;
  double f_gap = 0.0;
  std::optional<double> lyap;
};

enum class StartPoint { origin, optimum };

struct MethodConfig {
  Method method = Method::continuized;
  Regime regime = Regime::convex;
  double mu = 0.0;
  double L = 1.0;
  std::optional<NoiseModel> noise;
  std::uint64_t seed = 0;
  long steps = 1;
  /// Defaults to the optimum when noise is present, the origin otherwise.
  std::optional<StartPoint> start;

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
  StartPoint effective_start() const;
};

struct RunTrace {
  MethodConfig config;
  Vector x0;  // x_0 = z_0
  std::vector<RunRecord> records;
};

/// Raised when a step fails; carries the gradient-step index.
class StepError : public std::runtime_error {
 public:
  StepError(long k, const std::string& what);
  long k() const { return k_; }

 private:
  long k_;
};

/// Stream ids used to split a replicate seed.
inline constexpr std::uint64_t kClockStream = 0;
inline constexpr std::uint64_t kNoiseStream = 1;

MethodState gd_step(MethodState state, GradientOracle& oracle, double gamma);
MethodState gd_step(MethodState state, const Objective& obj, double gamma);

/// y = x + tau (z - x); x = y - gamma g; z = z + tau' (y - z) - gamma' g with a
/// single gradient g = grad f(y).
MethodState nesterov_step(MethodState state, const NesterovParams& params,
                          GradientOracle& oracle);
MethodState nesterov_step(MethodState state, const NesterovParams& params, const Objective& obj);

/// Continuized step to a given next jump time T_next > state.t.
MethodState continuized_step_to(MethodState state, GradientOracle& oracle, Regime regime,
                                double mu, double L, double T_next);

/// Continuized step at the clock's upcoming jump. The clock must sit at
/// state.t; it is advanced by one jump.
MethodState continuized_step(MethodState state, GradientOracle& oracle, Regime regime, double mu,
                             double L, JumpClock& clock);

/// Runs a configured method for config.steps gradient steps, recording
/// k = 0..steps. Deterministic in (config, objective).
RunTrace run(const MethodConfig& config, const Objective& obj);

Vector start_point(const MethodConfig& config, const Objective& obj);

}  // namespace continuized
