#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "continuized/schedules.hpp"

namespace {

using continuized::ContinuousSchedule;
using continuized::Regime;

TEST(NesterovA, HandValues) {
  EXPECT_EQ(continuized::nesterov_A(0), 0.0);
  EXPECT_DOUBLE_EQ(continuized::nesterov_A(1), 1.0);
  EXPECT_NEAR(continuized::nesterov_A(2), 1.0 + 0.5 * (1.0 + std::sqrt(5.0)), 1e-12);
  EXPECT_NEAR(continuized::nesterov_A(2), 2.6180339887, 1e-9);
}

TEST(NesterovA, IncreasingWithQuadraticGrowth) {
  continuized::NesterovSchedule sched(Regime::convex, 0.0, 1.0);
  double prev = sched.at(0).A;
  for (long k = 1; k <= 10000; ++k) {
    const double a = sched.at(k).A;
    ASSERT_GT(a, prev) << "k=" << k;
    ASSERT_GE(a, k * static_cast<double>(k) / 4.0) << "k=" << k;
    prev = a;
  }
  EXPECT_DOUBLE_EQ(sched.at(137).A, continuized::nesterov_A(137));
}

TEST(NesterovParams, ConvexFirstStep) {
  const auto p = continuized::nesterov_params(Regime::convex, 0.0, 2.0, 0);
  EXPECT_EQ(p.tau, 1.0);
  EXPECT_EQ(p.tau_prime, 0.0);
  EXPECT_DOUBLE_EQ(p.gamma, 0.5);
  EXPECT_DOUBLE_EQ(p.gamma_prime, 0.5);
}

TEST(NesterovParams, ConvexTauDecreases) {
  continuized::NesterovSchedule sched(Regime::convex, 0.0, 1.0);
  double prev = 2.0;
  for (long k = 0; k < 1000; ++k) {
    const auto p = sched.at(k);
    ASSERT_GT(p.tau, 0.0);
    ASSERT_LE(p.tau, 1.0);
    ASSERT_LT(p.tau, prev);
    prev = p.tau;
    const double a0 = continuized::nesterov_A(k), a1 = continuized::nesterov_A(k + 1);
    ASSERT_NEAR(p.tau, 1.0 - a0 / a1, 1e-15);
    ASSERT_NEAR(p.gamma_prime, a1 - a0, 1e-9);
  }
}

TEST(NesterovParams, StronglyConvexConstants) {
  const auto p = continuized::nesterov_params(Regime::strongly_convex, 0.01, 1.0, 17);
  EXPECT_NEAR(p.tau, 0.1 / 1.1, 1e-15);
  EXPECT_NEAR(p.tau, 0.0909090909, 1e-10);
  EXPECT_NEAR(p.tau_prime, 0.1, 1e-15);
  EXPECT_DOUBLE_EQ(p.gamma, 1.0);
  EXPECT_NEAR(p.gamma_prime, 10.0, 1e-12);
}

TEST(NesterovParams, RejectsMissingStrongConvexity) {
  EXPECT_THROW(continuized::nesterov_params(Regime::strongly_convex, 0.0, 1.0, 0),
               std::invalid_argument);
  EXPECT_THROW(continuized::nesterov_params(Regime::convex, 0.0, 0.0, 0), std::invalid_argument);
}

TEST(ContinuousSchedule, ConvexFormulas) {
  const ContinuousSchedule s = continuized::continuized_schedule(Regime::convex, 0.0, 1.0);
  EXPECT_DOUBLE_EQ(s.gamma_prime(4.0), 2.0);
  EXPECT_EQ(s.A(0.0), 0.0);
  EXPECT_DOUBLE_EQ(s.eta(4.0), 0.5);
  EXPECT_EQ(s.eta_prime(4.0), 0.0);
  EXPECT_DOUBLE_EQ(s.gamma(4.0), 1.0);
  EXPECT_DOUBLE_EQ(s.B(7.0), 1.0);
  const ContinuousSchedule s2(Regime::convex, 0.0, 2.0);
  EXPECT_DOUBLE_EQ(s2.A(3.0), 9.0 / 4.0);
  EXPECT_DOUBLE_EQ(s2.gamma_prime(3.0), 0.75);
}

TEST(ContinuousSchedule, StronglyConvexConstantParameters) {
  const ContinuousSchedule s(Regime::strongly_convex, 0.01, 1.0);
  for (double t : {0.0, 0.5, 3.0, 100.0}) {
    EXPECT_NEAR(s.eta(t), 0.1, 1e-15);
    EXPECT_NEAR(s.eta_prime(t), 0.1, 1e-15);
    EXPECT_DOUBLE_EQ(s.gamma(t), 1.0);
    EXPECT_NEAR(s.gamma_prime(t), 10.0, 1e-12);
    EXPECT_NEAR(s.A(t), std::exp(0.1 * t), 1e-12 * std::exp(0.1 * t));
    EXPECT_NEAR(s.B(t), 0.005 * s.A(t), 1e-15 * s.A(t));
  }
}

TEST(ContinuousSchedule, ConsistencyIdentitiesOnGrid) {
  for (Regime regime : {Regime::convex, Regime::strongly_convex}) {
    const double mu = regime == Regime::convex ? 0.0 : 0.01;
    const double L = 1.0;
    const ContinuousSchedule s(regime, mu, L);
    for (int i = 1; i <= 1000; ++i) {
      const double t = 0.1 * i;
      const double A = s.A(t), B = s.B(t);
      const double gp = std::sqrt(A / (2.0 * L * B));
      EXPECT_NEAR(s.gamma_prime(t), gp, 1e-10 * gp);
      const double eta = std::sqrt(2.0 * B / (L * A));
      EXPECT_NEAR(s.eta(t), eta, 1e-10 * eta);
      EXPECT_NEAR(s.eta_prime(t), mu * gp, 1e-10 * std::max(mu * gp, 1e-300));
    }
  }
}

TEST(LyapunovWeights, Values) {
  const ContinuousSchedule c(Regime::convex, 0.0, 1.0);
  auto w = continuized::lyapunov_weights(c, 2.0);
  EXPECT_DOUBLE_EQ(w.A, 2.0);
  EXPECT_DOUBLE_EQ(w.B, 1.0);
  w = continuized::lyapunov_weights(c, 0.0);
  EXPECT_EQ(w.A, 0.0);
  EXPECT_EQ(w.B, 1.0);
  const ContinuousSchedule s(Regime::strongly_convex, 0.01, 1.0);
  w = continuized::lyapunov_weights(s, 10.0);
  EXPECT_NEAR(w.A, std::exp(1.0), 1e-14);
  EXPECT_NEAR(w.B, 0.005 * std::exp(1.0), 1e-16);
  EXPECT_THROW(continuized::lyapunov_weights(s, -1.0), std::invalid_argument);
}

TEST(DiscreteParams, ConvexHandValues) {
  const auto p = continuized::discrete_params(Regime::convex, 0.0, 1.0, 1.0, 2.0);
  EXPECT_DOUBLE_EQ(p.tau, 0.75);
  EXPECT_EQ(p.tau_prime, 0.0);
  EXPECT_DOUBLE_EQ(p.gamma_step, 1.0);
  EXPECT_DOUBLE_EQ(p.gamma_prime_step, 0.5);

  const auto first = continuized::discrete_params(Regime::convex, 0.0, 1.0, 0.0, 0.37);
  EXPECT_EQ(first.tau, 1.0);
  EXPECT_EQ(first.gamma_prime_step, 0.0);
}

TEST(DiscreteParams, StronglyConvexHandValues) {
  const auto p = continuized::discrete_params(Regime::strongly_convex, 0.01, 1.0, 3.0, 8.0);
  EXPECT_NEAR(p.tau, 0.3160602794, 1e-9);
  EXPECT_NEAR(p.tau_prime, 0.4621171573, 1e-9);
  EXPECT_DOUBLE_EQ(p.gamma_step, 1.0);
  EXPECT_NEAR(p.gamma_prime_step, 10.0, 1e-12);
  // Only the gap matters.
  const auto q = continuized::discrete_params(Regime::strongly_convex, 0.01, 1.0, 100.0, 105.0);
  EXPECT_NEAR(q.tau, p.tau, 1e-12);
  EXPECT_NEAR(q.tau_prime, p.tau_prime, 1e-12);
}

TEST(DiscreteParams, TauPrimeRelation) {
  for (double dt : {1e-6, 0.01, 0.3, 1.0, 5.0, 40.0}) {
    const auto p = continuized::discrete_params(Regime::strongly_convex, 0.01, 1.0, 0.0, dt);
    EXPECT_NEAR(p.tau_prime, p.tau / (1.0 - p.tau), 1e-12) << dt;
    EXPECT_GE(p.tau, 0.0);
    EXPECT_LT(p.tau, 0.5);
    EXPECT_LT(p.tau_prime, 1.0);
  }
}

TEST(DiscreteParams, ZeroGapLimit) {
  const auto p = continuized::discrete_params(Regime::strongly_convex, 0.01, 1.0, 2.0, 2.0 + 1e-12);
  EXPECT_LT(p.tau, 1e-12);
  EXPECT_LT(p.tau_prime, 1e-12);
  EXPECT_GT(p.tau, 0.0);
}

TEST(DiscreteParams, RejectsNonIncreasingTimes) {
  EXPECT_THROW(continuized::discrete_params(Regime::convex, 0.0, 1.0, 2.0, 2.0),
               std::invalid_argument);
  EXPECT_THROW(continuized::discrete_params(Regime::strongly_convex, 0.01, 1.0, 2.0, 1.0),
               std::invalid_argument);
}

TEST(Regime, ParseAndPrint) {
  EXPECT_EQ(continuized::parse_regime("strongly-convex"), Regime::strongly_convex);
  EXPECT_EQ(continuized::parse_regime("strongly_convex"), Regime::strongly_convex);
  EXPECT_EQ(continuized::parse_regime("convex"), Regime::convex);
  EXPECT_EQ(continuized::to_string(Regime::strongly_convex), "strongly-convex");
  EXPECT_THROW(continuized::parse_regime("concave"), std::invalid_argument);
}

}  // namespace
