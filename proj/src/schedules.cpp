#include "continuized/schedules.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace continuized {

std::string_view to_string(Regime regime) {
  return regime == Regime::convex ? "convex" : "strongly-convex";
}

Regime parse_regime(std::string_view text) {
  if (text == "convex") return Regime::convex;
  if (text == "strongly-convex" || text == "strongly_convex") return Regime::strongly_convex;
  throw std::invalid_argument("unknown regime '" + std::string(text) + "'");
}

void validate_regime_constants(Regime regime, double mu, double L) {
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("L must be finite and > 0");
  if (regime == Regime::strongly_convex) {
    if (!(mu > 0.0)) throw std::invalid_argument("strongly convex regime requires mu > 0");
    if (mu > L) throw std::invalid_argument("mu must not exceed L");
  } else if (!(mu >= 0.0)) {
    throw std::invalid_argument("mu must be >= 0");
  }
}

double nesterov_A(long k) {
  if (k < 0) throw std::invalid_argument("k must be >= 0");
  double A = 0.0;
  for (long i = 0; i < k; ++i) A += 0.5 * (1.0 + std::sqrt(4.0 * A + 1.0));
  return A;
}

NesterovSchedule::NesterovSchedule(Regime regime, double mu, double L)
    : regime_(regime), mu_(mu), L_(L) {
  validate_regime_constants(regime, mu, L);
}

double NesterovSchedule::A(long k) {
  while (static_cast<long>(A_.size()) <= k) {
    const double a = A_.back();
    A_.push_back(a + 0.5 * (1.0 + std::sqrt(4.0 * a + 1.0)));
  }
  return A_[k];
}

NesterovParams NesterovSchedule::at(long k) {
  if (k < 0) throw std::invalid_argument("k must be >= 0");
  NesterovParams p;
  p.gamma = 1.0 / L_;
  if (regime_ == Regime::convex) {
    const double a = A(k);
    const double a_next = A(k + 1);
    p.A = a;
    p.tau = 1.0 - a / a_next;
    p.tau_prime = 0.0;
    p.gamma_prime = (a_next - a) / L_;
  } else {
    const double q = std::sqrt(mu_ / L_);
    p.tau = q / (1.0 + q);
    p.tau_prime = q;
    p.gamma_prime = 1.0 / std::sqrt(mu_ * L_);
  }
  return p;
}

NesterovParams nesterov_params(Regime regime, double mu, double L, long k) {
  return NesterovSchedule(regime, mu, L).at(k);
}

ContinuousSchedule::ContinuousSchedule(Regime regime, double mu, double L)
    : regime_(regime), mu_(mu), L_(L) {
  validate_regime_constants(regime, mu, L);
  rate_ = regime == Regime::strongly_convex ? std::sqrt(mu / L) : 0.0;
}

double ContinuousSchedule::eta(double t) const {
  if (regime_ == Regime::convex)
    return t > 0.0 ? 2.0 / t : std::numeric_limits<double>::infinity();
  return rate_;
}

double ContinuousSchedule::eta_prime(double) const {
  return regime_ == Regime::convex ? 0.0 : rate_;
}

double ContinuousSchedule::gamma(double) const { return 1.0 / L_; }

double ContinuousSchedule::gamma_prime(double t) const {
  if (regime_ == Regime::convex) return t / (2.0 * L_);
  return 1.0 / std::sqrt(mu_ * L_);
}

double ContinuousSchedule::A(double t) const {
  if (regime_ == Regime::convex) return t * t / (2.0 * L_);
  return std::exp(rate_ * t);
}

double ContinuousSchedule::B(double t) const {
  if (regime_ == Regime::convex) return 1.0;
  return 0.5 * mu_ * A(t);
}

ContinuousSchedule continuized_schedule(Regime regime, double mu, double L) {
  return ContinuousSchedule(regime, mu, L);
}

LyapunovWeights lyapunov_weights(const ContinuousSchedule& sched, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("t must be >= 0");
  return {sched.A(t), sched.B(t)};
}

DiscreteStepParams discrete_params(Regime regime, double mu, double L, double T_k,
                                   double T_next) {
  validate_regime_constants(regime, mu, L);
  if (!(T_k >= 0.0)) throw std::invalid_argument("T_k must be >= 0");
  if (!(T_next > T_k)) throw std::invalid_argument("T_next must exceed T_k");
  DiscreteStepParams p;
  p.gamma_step = 1.0 / L;
  if (regime == Regime::convex) {
    const double r = T_k / T_next;
    p.tau = 1.0 - r * r;
    p.tau_prime = 0.0;
    p.gamma_prime_step = T_k / (2.0 * L);
  } else {
    const double qd = std::sqrt(mu / L) * (T_next - T_k);
    p.tau = -0.5 * std::expm1(-2.0 * qd);
    p.tau_prime = std::tanh(qd);
    p.gamma_prime_step = 1.0 / std::sqrt(mu * L);
  }
  return p;
}

}  // namespace continuized
