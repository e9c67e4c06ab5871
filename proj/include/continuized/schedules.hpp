#pragma once

#include <string_view>
#include <vector>

namespace continuized {

enum class Regime { convex, strongly_convex };

std::string_view to_string(Regime regime);
/// Accepts "convex", "strongly-convex" and "strongly_convex".
Regime parse_regime(std::string_view text);

/// Rejects L <= 0 and, in the strongly convex regime, mu <= 0 or mu > L.
void validate_regime_constants(Regime regime, double mu, double L);

// ---------------------------------------------------------------------------
// Deterministic Nesterov parameters.

struct NesterovParams {
  double tau = 0.0;
  double tau_prime = 0.0;
  double gamma = 0.0;
  double gamma_prime = 0.0;
  double A = 0.0;  // A_k; convex regime only.
};

/// A_0 = 0, A_{k+1} = A_k + (1 + sqrt(4 A_k + 1)) / 2, by iteration.
double nesterov_A(long k);

/// Parameter generator for one run. Caches the A_k sequence so stepping
/// through k costs O(1) per step.
class NesterovSchedule {
 public:
  NesterovSchedule(Regime regime, double mu, double L);

  NesterovParams at(long k);

  Regime regime() const { return regime_; }

 private:
  double A(long k);

  Regime regime_;
  double mu_;
  double L_;
  std::vector<double> A_{0.0};
};

NesterovParams nesterov_params(Regime regime, double mu, double L, long k);

// ---------------------------------------------------------------------------
// Continuous-time schedules.

struct LyapunovWeights {
  double A = 0.0;
  double B = 0.0;
};

/// Mixing rates eta_t, eta'_t, jump sizes gamma_t, gamma'_t and the
/// Lyapunov weights A_t, B_t of the continuized dynamics.
///
/// Convex: eta = 2/t, eta' = 0, gamma = 1/L, gamma' = t/(2L), A = t^2/(2L),
/// B = 1. Strongly convex (A_0 = 1): eta = eta' = sqrt(mu/L), gamma = 1/L,
/// gamma' = 1/sqrt(mu L), A = exp(sqrt(mu/L) t), B = mu/2 A.
class ContinuousSchedule {
 public:
  ContinuousSchedule(Regime regime, double mu, double L);

  Regime regime() const { return regime_; }
  double mu() const { return mu_; }
  double L() const { return L_; }

  double eta(double t) const;
  double eta_prime(double t) const;
  double gamma(double t) const;
  double gamma_prime(double t) const;
  double A(double t) const;
  double B(double t) const;

 private:
  Regime regime_;
  double mu_;
  double L_;
  double rate_;  // sqrt(mu/L); 0 in the convex regime
};

ContinuousSchedule continuized_schedule(Regime regime, double mu, double L);

LyapunovWeights lyapunov_weights(const ContinuousSchedule& sched, double t);

// ---------------------------------------------------------------------------
// Random parameters of the exact discretization between jumps T_k < T_next.

struct DiscreteStepParams {
  double tau = 0.0;
  double tau_prime = 0.0;
  double gamma_step = 0.0;
  double gamma_prime_step = 0.0;
};

/// Convex: tau = 1 - (T_k/T_next)^2, tau' = 0, gamma = 1/L, gamma' = T_k/(2L).
/// Strongly convex, with d = T_next - T_k and q = sqrt(mu/L):
/// tau = (1 - exp(-2 q d))/2, tau' = tanh(q d), gamma = 1/L,
/// gamma' = 1/sqrt(mu L).
DiscreteStepParams discrete_params(Regime regime, double mu, double L, double T_k,
                                   double T_next);

}  // namespace continuized
