#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "continuized/diagnostics.hpp"
#include "continuized/jumpflow.hpp"
#include "continuized/methods.hpp"

namespace {

using continuized::GradientOracle;
using continuized::JumpClock;
using continuized::Method;
using continuized::MethodConfig;
using continuized::MethodState;
using continuized::NoiseModel;
using continuized::Objective;
using continuized::RandomStream;
using continuized::Regime;
using continuized::StartPoint;
using continuized::Vector;

MethodConfig config(Method m, Regime r, double mu, double L, long steps) {
  MethodConfig c;
  c.method = m;
  c.regime = r;
  c.mu = mu;
  c.L = L;
  c.steps = steps;
  return c;
}

TEST(GdStep, FixedPointAndOneDimensionalExactness) {
  const Objective f = continuized::make_quad3(0.01, 1.0);
  const MethodState s = continuized::gd_step(MethodState::start_at(f.x_star()), f, 1.0);
  EXPECT_EQ(s.x, f.x_star());
  EXPECT_EQ(s.k, 1);

  const Objective line = continuized::make_diagonal_quadratic(
      "line", Vector::Constant(1, 4.0), Vector::Zero(1));
  const MethodState t = continuized::gd_step(MethodState::start_at(Vector::Ones(1)), line, 0.25);
  EXPECT_EQ(t.x[0], 0.0);
}

TEST(GdRun, LinearRateOnQuad3) {
  const Objective f = continuized::make_quad3(0.01, 1.0);
  const auto trace = continuized::run(config(Method::gd, Regime::convex, 0.0, 1.0, 600), f);
  const double d0 = (trace.x0 - f.x_star()).squaredNorm();
  for (const auto& r : trace.records) {
    EXPECT_LE(r.f_gap, 0.5 * std::pow(0.99, r.k) * d0 * (1.0 + 1e-9)) << r.k;
    EXPECT_EQ(r.t, static_cast<double>(r.k));
    EXPECT_FALSE(r.lyap.has_value());
  }
}

TEST(GdRun, SublinearRateOnQuad100) {
  const Objective f = continuized::make_quad100();
  const auto trace = continuized::run(config(Method::gd, Regime::convex, 0.0, 1.0, 1000), f);
  const double d0 = (trace.x0 - f.x_star()).squaredNorm();
  for (const auto& r : trace.records) EXPECT_LE(r.f_gap, 2.0 * d0 / (r.k + 4.0) * (1 + 1e-9));
}

// Three-sequence recursion written out directly.
struct ReferenceNesterov {
  Vector x, z;
  void step(const Objective& f, double tau, double tau_p, double gamma, double gamma_p) {
    const Vector y = x + tau * (z - x);
    const Vector g = f.grad(y);
    x = y - gamma * g;
    z = z + tau_p * (y - z) - gamma_p * g;
  }
};

TEST(NesterovStep, MatchesReferenceConvex) {
  const Objective f = continuized::make_quad100();
  ReferenceNesterov ref{Vector::Zero(100), Vector::Zero(100)};
  const auto trace = continuized::run(config(Method::nesterov, Regime::convex, 0.0, 1.0, 50), f);
  double A = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double A1 = A + 0.5 * (1.0 + std::sqrt(4.0 * A + 1.0));
    ref.step(f, 1.0 - A / A1, 0.0, 1.0, A1 - A);
    A = A1;
    EXPECT_NEAR(trace.records[k + 1].f_gap, f.gap(ref.x), 1e-13);
  }
}

TEST(NesterovStep, MatchesReferenceStronglyConvex) {
  const Objective f = continuized::make_quad3(0.01, 1.0);
  ReferenceNesterov ref{Vector::Zero(3), Vector::Zero(3)};
  const auto trace =
      continuized::run(config(Method::nesterov, Regime::strongly_convex, 0.01, 1.0, 100), f);
  for (int k = 0; k < 100; ++k) {
    ref.step(f, 0.1 / 1.1, 0.1, 1.0, 10.0);
    EXPECT_NEAR(trace.records[k + 1].f_gap, f.gap(ref.x), 1e-13);
  }
}

TEST(NesterovStep, OneGradientPerStep) {
  const Objective f = continuized::make_quad3(0.01, 1.0);
  GradientOracle oracle(f);
  MethodState s = MethodState::start_at(Vector::Zero(3));
  const auto p = continuized::nesterov_params(Regime::strongly_convex, 0.01, 1.0, 0);
  for (int i = 0; i < 7; ++i) s = continuized::nesterov_step(s, p, oracle);
  EXPECT_EQ(oracle.evaluations(), 7);
  EXPECT_EQ(s.k, 7);
}

TEST(NesterovRun, ConvexBound) {
  const Objective f = continuized::make_quad100();
  const auto trace = continuized::run(config(Method::nesterov, Regime::convex, 0.0, 1.0, 1000), f);
  const double d0 = (trace.x0 - f.x_star()).squaredNorm();
  for (const auto& r : trace.records) {
    if (r.k == 0) continue;
    EXPECT_LE(r.f_gap, 2.0 * d0 / (double(r.k) * r.k) * (1 + 1e-9)) << r.k;
  }
}

TEST(NesterovRun, StronglyConvexBound) {
  const Objective f = continuized::make_quad3(0.01, 1.0);
  const auto trace =
      continuized::run(config(Method::nesterov, Regime::strongly_convex, 0.01, 1.0, 600), f);
  const double phi0 = f.gap(trace.x0) + 0.005 * (trace.x0 - f.x_star()).squaredNorm();
  for (const auto& r : trace.records) EXPECT_LE(r.f_gap, phi0 * std::pow(0.9, r.k) * (1 + 1e-9));
}

TEST(ContinuizedStep, PinnedTimesMatchJumpflowComposition) {
  const Objective f = continuized::make_quad3(0.01, 1.0);
  MethodState s = MethodState::start_at(Vector::Zero(3));
  s.z = Vector::Constant(3, 2.0);
  s.t = 1.0;
  GradientOracle oracle(f);
  const MethodState out = continuized::continuized_step_to(s, oracle, Regime::convex, 0.0, 1.0, 2.0);
  // tau = 3/4, gamma = 1, gamma' = T_k / 2 = 1/2
  const Vector y = s.x + 0.75 * (s.z - s.x);
  const Vector g = f.grad(y);
  EXPECT_LE((out.x - (y - g)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((out.z - (s.z - 0.5 * g)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(out.t, 2.0);
  EXPECT_EQ(out.k, 1);

  const auto mixed = continuized::mix_convex({s.x, s.z}, 1.0, 2.0);
  const auto jumped = continuized::gradient_jump(mixed, f.grad(mixed.x), 1.0, 0.5);
  EXPECT_LE((out.x - jumped.x).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((out.z - jumped.z).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ContinuizedStep, StronglyConvexMatchesComposition) {
  const Objective f = continuized::make_quad3(0.01, 1.0);
  RandomStream rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    MethodState s = MethodState::start_at(Vector::Random(3));
    s.z = Vector::Random(3) * 3.0;
    s.t = 5.0 * rng.uniform();
    const double t1 = s.t + continuized::sample_interarrival(rng);
    GradientOracle oracle(f);
    const MethodState out =
        continuized::continuized_step_to(s, oracle, Regime::strongly_convex, 0.01, 1.0, t1);
    const auto mixed = continuized::mix_strongly_convex({s.x, s.z}, 0.01, 1.0, t1 - s.t);
    const auto jumped = continuized::gradient_jump(mixed, f.grad(mixed.x), 1.0, 10.0);
    EXPECT_LE((out.x - jumped.x).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((out.z - jumped.z).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(ContinuizedStep, ClockMustMatchState) {
  const Objective f = continuized::make_quad3(0.01, 1.0);
  GradientOracle oracle(f);
  JumpClock clock(RandomStream(1));
  MethodState s = MethodState::start_at(Vector::Zero(3));
  const double t1 = clock.next_time();
  s = continuized::continuized_step(s, oracle, Regime::convex, 0.0, 1.0, clock);
  EXPECT_EQ(s.t, t1);
  EXPECT_EQ(clock.count(), 1);
  MethodState stale = s;
  stale.t = 0.0;
  EXPECT_THROW(continuized::continuized_step(stale, oracle, Regime::convex, 0.0, 1.0, clock),
               std::invalid_argument);
}

TEST(Run, FixedPointAllMethods) {
  for (Method m : {Method::gd, Method::nesterov, Method::continuized}) {
    for (Regime r : {Regime::convex, Regime::strongly_convex}) {
      const Objective f = continuized::make_quad3(0.01, 1.0);
      MethodConfig c = config(m, r, r == Regime::convex ? 0.0 : 0.01, 1.0, 1000);
      c.start = StartPoint::optimum;
      c.seed = 3;
      const auto trace = continuized::run(c, f);
      for (const auto& rec : trace.records) ASSERT_LE(std::abs(rec.f_gap), 1e-24);
    }
  }
}

TEST(Run, SeededDeterminism) {
  const Objective f = continuized::make_quad3(0.01, 1.0);
  MethodConfig c = config(Method::continuized, Regime::strongly_convex, 0.01, 1.0, 300);
  c.noise = NoiseModel::isotropic(1e-4, 3);
  c.seed = 99;
  const auto a = continuized::run(c, f);
  const auto b = continuized::run(c, f);
  ASSERT_EQ(a.records.size(), 301u);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].t, b.records[i].t);
    EXPECT_EQ(a.records[i].f_gap, b.records[i].f_gap);
    EXPECT_EQ(*a.records[i].lyap, *b.records[i].lyap);
  }
  c.seed = 100;
  EXPECT_NE(continuized::run(c, f).records[5].t, a.records[5].t);
}

TEST(Run, ContinuizedTimesAndLyapunov) {
  const Objective f = continuized::make_quad100();
  MethodConfig c = config(Method::continuized, Regime::convex, 0.0, 1.0, 200);
  c.seed = 4;
  const auto trace = continuized::run(c, f);
  EXPECT_EQ(trace.records.front().t, 0.0);
  const continuized::ContinuousSchedule sched(Regime::convex, 0.0, 1.0);
  JumpClock clock(RandomStream(4, continuized::kClockStream));
  for (std::size_t i = 1; i < trace.records.size(); ++i) {
    EXPECT_GT(trace.records[i].t, trace.records[i - 1].t);
    EXPECT_EQ(trace.records[i].t, clock.advance());
    ASSERT_TRUE(trace.records[i].lyap.has_value());
    EXPECT_GE(*trace.records[i].lyap, 0.0);
  }
  // phi_0 = |z_0 - x*|^2 in the convex regime
  EXPECT_NEAR(*trace.records.front().lyap, f.x_star().squaredNorm(), 1e-14);
}

TEST(Run, NoisyContinuizedUsesOneDrawPerStep) {
  // With the noise stream reproduced by hand, the first step must consume
  // exactly dim normal draws.
  const Objective f = continuized::make_quad3(0.01, 1.0);
  MethodConfig c = config(Method::continuized, Regime::strongly_convex, 0.01, 1.0, 1);
  c.noise = NoiseModel::isotropic(1e-4, 3);
  c.seed = 8;
  const auto trace = continuized::run(c, f);

  RandomStream noise(8, continuized::kNoiseStream);
  Vector xi(3);
  for (int i = 0; i < 3; ++i) xi[i] = 1e-2 * noise.normal();
  const double t1 = trace.records[1].t;
  const Vector x0 = f.x_star();
  const auto mixed = continuized::mix_strongly_convex({x0, x0}, 0.01, 1.0, t1);
  const Vector g = f.grad(mixed.x) + xi;
  const Vector x1 = mixed.x - g;
  EXPECT_NEAR(trace.records[1].f_gap, f.gap(x1), 1e-15);
}

TEST(Run, ConfigValidation) {
  const Objective f = continuized::make_quad3(0.01, 1.0);
  EXPECT_THROW(continuized::run(config(Method::nesterov, Regime::strongly_convex, 0.0, 1.0, 10), f),
               std::invalid_argument);
  EXPECT_THROW(continuized::run(config(Method::continuized, Regime::convex, 0.0, 1.0, 0), f),
               std::invalid_argument);
  EXPECT_NO_THROW(continuized::run(config(Method::gd, Regime::strongly_convex, 0.0, 1.0, 3), f));
}

TEST(Run, DivergenceReportsStep) {
  const Objective f = continuized::make_quad3(0.01, 1.0);
  // Step size 1e6 / L blows up within a few hundred steps.
  try {
    continuized::run(config(Method::gd, Regime::convex, 0.0, 1e-6, 1000), f);
    FAIL() << "expected divergence";
  } catch (const continuized::StepError& e) {
    EXPECT_GT(e.k(), 0);
    EXPECT_LT(e.k(), 1000);
  }
}

TEST(Run, StartPoints) {
  const Objective f = continuized::make_quad3(0.01, 1.0);
  MethodConfig c = config(Method::gd, Regime::convex, 0.0, 1.0, 1);
  EXPECT_EQ(continuized::start_point(c, f), Vector::Zero(3));
  c.noise = NoiseModel::isotropic(1e-4, 3);
  EXPECT_EQ(continuized::start_point(c, f), f.x_star());
  c.start = StartPoint::origin;
  EXPECT_EQ(continuized::start_point(c, f), Vector::Zero(3));
}

TEST(Method, ParseAndPrint) {
  EXPECT_EQ(continuized::parse_method("gd"), Method::gd);
  EXPECT_EQ(continuized::parse_method("nesterov"), Method::nesterov);
  EXPECT_EQ(continuized::to_string(Method::continuized), "continuized");
  EXPECT_THROW(continuized::parse_method("adam"), std::invalid_argument);
}

}  // namespace
