#include "continuized/methods.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "continuized/diagnostics.hpp"

namespace continuized {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::gd:
      return "gd";
    case Method::nesterov:
      return "nesterov";
    case Method::continuized:
      return "continuized";
  }
  return "unknown";
}

Method parse_method(std::string_view text) {
  if (text == "gd") return Method::gd;
  if (text == "nesterov") return Method::nesterov;
  if (text == "continuized") return Method::continuized;
  throw std::invalid_argument("unknown method '" + std::string(text) + "'");
}

MethodState MethodState::start_at(const Vector& x0) { return {x0, x0, x0, 0, 0.0}; }

void MethodConfig::validate() const {
  if (steps <= 0) throw std::invalid_argument("steps must be > 0");
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("L must be finite and > 0");
  if (!(mu >= 0.0)) throw std::invalid_argument("mu must be >= 0");
  if (method != Method::gd) validate_regime_constants(regime, mu, L);
  if (noise && !(noise->sigma_g2 >= 0.0)) throw std::invalid_argument("sigma_g2 must be >= 0");
}

StartPoint MethodConfig::effective_start() const {
  if (start) return *start;
  return noise && noise->sigma_g2 > 0.0 ? StartPoint::optimum : StartPoint::origin;
}

StepError::StepError(long k, const std::string& what)
    : std::runtime_error("step " + std::to_string(k) + ": " + what), k_(k) {}

MethodState gd_step(MethodState state, GradientOracle& oracle, double gamma) {
  const Vector g = oracle(state.x);
  state.y = state.x;
  state.x -= gamma * g;
  state.z = state.x;
  ++state.k;
  return state;
}

MethodState gd_step(MethodState state, const Objective& obj, double gamma) {
  GradientOracle oracle(obj);
  return gd_step(std::move(state), oracle, gamma);
}

MethodState nesterov_step(MethodState state, const NesterovParams& p, GradientOracle& oracle) {
  state.y = state.x + p.tau * (state.z - state.x);
  const Vector g = oracle(state.y);
  state.x = state.y - p.gamma * g;
  state.z += p.tau_prime * (state.y - state.z) - p.gamma_prime * g;
  ++state.k;
  return state;
}

MethodState nesterov_step(MethodState state, const NesterovParams& params, const Objective& obj) {
  GradientOracle oracle(obj);
  return nesterov_step(std::move(state), params, oracle);
}

MethodState continuized_step_to(MethodState state, GradientOracle& oracle, Regime regime,
                                double mu, double L, double T_next) {
  const DiscreteStepParams p = discrete_params(regime, mu, L, state.t, T_next);
  state.y = state.x + p.tau * (state.z - state.x);
  // One draw serves both updates so x and z see the same noise realization.
  const Vector g = oracle(state.y);
  state.x = state.y - p.gamma_step * g;
  state.z += p.tau_prime * (state.y - state.z) - p.gamma_prime_step * g;
  state.t = T_next;
  ++state.k;
  return state;
}

MethodState continuized_step(MethodState state, GradientOracle& oracle, Regime regime, double mu,
                             double L, JumpClock& clock) {
  if (clock.time() != state.t)
    throw std::invalid_argument("jump clock is not synchronized with the state time");
  const double T_next = clock.next_time();
  state = continuized_step_to(std::move(state), oracle, regime, mu, L, T_next);
  clock.advance();
  return state;
}

Vector start_point(const MethodConfig& config, const Objective& obj) {
  return config.effective_start() == StartPoint::optimum ? Vector(obj.x_star())
                                                         : Vector(Vector::Zero(obj.dim()));
}

RunTrace run(const MethodConfig& config, const Objective& obj) {
  config.validate();
  RunTrace trace{config, start_point(config, obj), {}};
  trace.records.reserve(static_cast<std::size_t>(config.steps) + 1);

  RandomStream noise_rng(config.seed, kNoiseStream);
  GradientOracle oracle = config.noise ? GradientOracle(obj, *config.noise, noise_rng)
                                       : GradientOracle(obj);
  MethodState state = MethodState::start_at(trace.x0);

  std::optional<ContinuousSchedule> sched;
  if (config.method == Method::continuized)
    sched.emplace(config.regime, config.mu, config.L);

  auto record = [&](const MethodState& s) {
    RunRecord r;
    r.k = s.k;
    r.t = config.method == Method::continuized ? s.t : static_cast<double>(s.k);
    r.f_gap = obj.gap(s.x);
    if (sched) r.lyap = lyapunov_value(s.t, s.x, s.z, obj, *sched);
    trace.records.push_back(r);
  };
  record(state);

  switch (config.method) {
    case Method::gd: {
      const double gamma = 1.0 / config.L;
      for (long k = 0; k < config.steps; ++k) {
        try {
          state = gd_step(std::move(state), oracle, gamma);
          record(state);
        } catch (const std::exception& e) {
          throw StepError(k, e.what());
        }
      }
      break;
    }
    case Method::nesterov: {
      NesterovSchedule schedule(config.regime, config.mu, config.L);
      for (long k = 0; k < config.steps; ++k) {
        try {
          state = nesterov_step(std::move(state), schedule.at(k), oracle);
          record(state);
        } catch (const std::exception& e) {
          throw StepError(k, e.what());
        }
      }
      break;
    }
    case Method::continuized: {
      JumpClock clock(RandomStream(config.seed, kClockStream));
      for (long k = 0; k < config.steps; ++k) {
        try {
          state = continuized_step(std::move(state), oracle, config.regime, config.mu, config.L,
                                   clock);
          record(state);
        } catch (const std::exception& e) {
          throw StepError(k, e.what());
        }
      }
      break;
    }
  }
  return trace;
}

}  // namespace continuized
