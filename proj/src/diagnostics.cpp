#include "continuized/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "continuized/jumpflow.hpp"
#include "continuized/parallel.hpp"

namespace continuized {

double lyapunov_value(double t, const Vector& x, const Vector& z, const Objective& obj,
                      const ContinuousSchedule& sched) {
  const LyapunovWeights w = lyapunov_weights(sched, t);
  const double gap = obj.gap(x);
  const double dist2 = (z - obj.x_star()).squaredNorm();
  // A_0 = 0 in the convex regime; skip the product so an unbounded gap at t = 0
  // cannot turn into NaN.
  const double a_term = w.A == 0.0 ? 0.0 : w.A * gap;
  return a_term + w.B * dist2;
}

SampleSummary summarize(std::span<const double> values) {
  SampleSummary s;
  s.n = values.size();
  if (s.n == 0) return s;
  s.min = values.front();
  s.max = values.front();
  double sum = 0.0;
  for (double v : values) {
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.variance = ss / static_cast<double>(s.n - 1);
    s.sem = std::sqrt(s.variance / static_cast<double>(s.n));
  }
  return s;
}

namespace {

SampleSummary summarize_column(const Eigen::MatrixXd& m, Eigen::Index col) {
  const Vector c = m.col(col);
  return summarize(std::span<const double>(c.data(), static_cast<std::size_t>(c.size())));
}

void require_continuized(const MethodConfig& config) {
  if (config.method != Method::continuized)
    throw std::invalid_argument("continuous-time sampling requires the continuized method");
}

}  // namespace

GridSamples sample_on_grid(const MethodConfig& config, const Objective& obj,
                           const std::vector<double>& grid, int replicates, int jobs) {
  require_continuized(config);
  config.validate();
  if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  if (grid.empty()) throw std::invalid_argument("grid must not be empty");
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (!(grid[j] >= 0.0) || (j > 0 && grid[j] < grid[j - 1]))
      throw std::invalid_argument("grid times must be non-negative and non-decreasing");
  }

  GridSamples out;
  out.config = config;
  out.x0 = start_point(config, obj);
  out.grid = grid;
  out.f_gap.resize(replicates, static_cast<Eigen::Index>(grid.size()));
  out.phi.resize(replicates, static_cast<Eigen::Index>(grid.size()));
  const ContinuousSchedule sched(config.regime, config.mu, config.L);

  detail::parallel_for(static_cast<std::size_t>(replicates), jobs, [&](std::size_t r) {
    const std::uint64_t seed = config.seed + r;
    RandomStream noise_rng(seed, kNoiseStream);
    GradientOracle oracle = config.noise ? GradientOracle(obj, *config.noise, noise_rng)
                                         : GradientOracle(obj);
    JumpClock clock(RandomStream(seed, kClockStream));
    MethodState state = MethodState::start_at(out.x0);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double tg = grid[j];
      while (clock.next_time() <= tg) {
        try {
          state = continuized_step(std::move(state), oracle, config.regime, config.mu, config.L,
                                   clock);
        } catch (const std::exception& e) {
          throw StepError(state.k, e.what());
        }
      }
      const MixState flowed = mix(sched, {state.x, state.z}, state.t, tg);
      const auto row = static_cast<Eigen::Index>(r);
      const auto col = static_cast<Eigen::Index>(j);
      out.f_gap(row, col) = obj.gap(flowed.x);
      out.phi(row, col) = lyapunov_value(tg, flowed.x, flowed.z, obj, sched);
    }
  });
  return out;
}

LyapunovCertificate certify_supermartingale(const GridSamples& samples) {
  LyapunovCertificate cert;
  cert.grid = samples.grid;
  const Eigen::Index cols = samples.phi.cols();
  for (Eigen::Index j = 0; j < cols; ++j) {
    const SampleSummary s = summarize_column(samples.phi, j);
    cert.mean_phi.push_back(s.mean);
    cert.sem.push_back(s.sem);
  }
  cert.monotone_ok = true;
  cert.max_violation = 0.0;
  for (Eigen::Index j = 0; j + 1 < cols; ++j) {
    const Vector inc = samples.phi.col(j + 1) - samples.phi.col(j);
    const SampleSummary s =
        summarize(std::span<const double>(inc.data(), static_cast<std::size_t>(inc.size())));
    cert.increment_sem.push_back(s.sem);
    cert.max_violation = std::max(cert.max_violation, s.mean);
    if (s.mean > kStatisticalSlackSems * s.sem) cert.monotone_ok = false;
  }
  return cert;
}

LyapunovCertificate supermartingale_check(const MethodConfig& config, const Objective& obj,
                                          const std::vector<double>& grid, int replicates,
                                          int jobs) {
  if (config.noise && config.noise->sigma_g2 > 0.0)
    throw std::invalid_argument("supermartingale check requires a noiseless configuration");
  if (replicates < 100) throw std::invalid_argument("supermartingale check needs >= 100 replicates");
  return certify_supermartingale(sample_on_grid(config, obj, grid, replicates, jobs));
}

std::string_view to_string(DeterministicBound bound) {
  switch (bound) {
    case DeterministicBound::thm1_cvx:
      return "thm1_cvx";
    case DeterministicBound::thm1_str:
      return "thm1_str";
    case DeterministicBound::thm2_cvx:
      return "thm2_cvx";
    case DeterministicBound::thm2_str:
      return "thm2_str";
  }
  return "unknown";
}

std::string_view to_string(ContinuizedBound bound) {
  switch (bound) {
    case ContinuizedBound::thm5_cvx:
      return "thm5_cvx";
    case ContinuizedBound::thm5_str:
      return "thm5_str";
    case ContinuizedBound::thm6_cvx:
      return "thm6_cvx";
    case ContinuizedBound::thm6_str:
      return "thm6_str";
  }
  return "unknown";
}

namespace {

void finish_report(BoundReport& report, double rel_tol) {
  report.satisfied = true;
  report.worst_ratio = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < report.lhs.size(); ++i) {
    const double lhs = report.lhs[i];
    const double rhs = report.rhs[i];
    if (!(lhs <= rhs * (1.0 + rel_tol))) report.satisfied = false;
    const double ratio = rhs > 0.0 ? lhs / rhs
                                   : (lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    report.worst_ratio = std::max(report.worst_ratio, ratio);
  }
  if (report.lhs.empty()) report.worst_ratio = 0.0;
}

// Initial Lyapunov value of the strongly convex schedule with A_0 = 1.
double strongly_convex_numerator(const Objective& obj, const Vector& x0, double mu) {
  return obj.gap(x0) + 0.5 * mu * (x0 - obj.x_star()).squaredNorm();
}

}  // namespace

BoundReport bound_check_deterministic(const RunTrace& trace, const Objective& obj,
                                      DeterministicBound bound) {
  const MethodConfig& c = trace.config;
  const bool thm1 = bound == DeterministicBound::thm1_cvx || bound == DeterministicBound::thm1_str;
  const bool strongly =
      bound == DeterministicBound::thm1_str || bound == DeterministicBound::thm2_str;
  if (thm1 && c.method != Method::gd)
    throw std::invalid_argument(std::string(to_string(bound)) + " applies to gradient descent");
  if (!thm1) {
    if (c.method != Method::nesterov)
      throw std::invalid_argument(std::string(to_string(bound)) + " applies to Nesterov runs");
    if (strongly != (c.regime == Regime::strongly_convex))
      throw std::invalid_argument(std::string(to_string(bound)) + " does not match the run regime");
  }
  if (strongly && !(c.mu > 0.0)) throw std::invalid_argument("strongly convex bound needs mu > 0");

  const double L = c.L;
  const double mu = c.mu;
  const double dist2 = (trace.x0 - obj.x_star()).squaredNorm();
  const double numerator = strongly_convex_numerator(obj, trace.x0, mu);

  BoundReport report;
  report.bound_name = std::string(to_string(bound));
  for (const RunRecord& r : trace.records) {
    const double k = static_cast<double>(r.k);
    double rhs = 0.0;
    switch (bound) {
      case DeterministicBound::thm1_cvx:
        rhs = 2.0 * L * dist2 / (k + 4.0);
        break;
      case DeterministicBound::thm1_str:
        rhs = 0.5 * L * std::pow(1.0 - mu / L, k) * dist2;
        break;
      case DeterministicBound::thm2_cvx:
        if (r.k < 1) continue;
        rhs = 2.0 * L * dist2 / (k * k);
        break;
      case DeterministicBound::thm2_str:
        rhs = numerator * std::pow(1.0 - std::sqrt(mu / L), k);
        break;
    }
    report.at.push_back(k);
    report.lhs.push_back(r.f_gap);
    report.rhs.push_back(rhs);
  }
  finish_report(report, kDeterministicBoundTol);
  return report;
}

BoundReport bound_check_continuized(const std::vector<RunTrace>& traces, const Objective& obj,
                                    ContinuizedBound bound, const std::vector<long>& k_grid) {
  if (bound == ContinuizedBound::thm6_cvx || bound == ContinuizedBound::thm6_str)
    throw std::invalid_argument("thm6 bounds are checked on fixed-time samples");
  if (traces.size() < 100) throw std::invalid_argument("stopped bounds need >= 100 replicates");
  const MethodConfig& c = traces.front().config;
  const bool strongly = bound == ContinuizedBound::thm5_str;
  if (c.method != Method::continuized)
    throw std::invalid_argument("stopped bounds apply to continuized runs");
  if (strongly != (c.regime == Regime::strongly_convex))
    throw std::invalid_argument(std::string(to_string(bound)) + " does not match the run regime");
  for (const RunTrace& t : traces) {
    if (t.config.method != c.method || t.config.regime != c.regime || t.config.mu != c.mu ||
        t.config.L != c.L || t.x0 != traces.front().x0)
      throw std::invalid_argument("traces come from different configurations");
  }

  const Vector& x0 = traces.front().x0;
  const double dist2 = (x0 - obj.x_star()).squaredNorm();
  const double rhs = strongly ? strongly_convex_numerator(obj, x0, c.mu) : 2.0 * c.L * dist2;
  const double rate = strongly ? std::sqrt(c.mu / c.L) : 0.0;

  BoundReport report;
  report.bound_name = std::string(to_string(bound));
  std::vector<double> values(traces.size());
  for (long k : k_grid) {
    for (std::size_t r = 0; r < traces.size(); ++r) {
      const auto& recs = traces[r].records;
      if (k < 0 || static_cast<std::size_t>(k) >= recs.size() || recs[k].k != k)
        throw std::invalid_argument("trace has no record for k = " + std::to_string(k));
      const RunRecord& rec = recs[k];
      values[r] = strongly ? std::exp(rate * rec.t) * rec.f_gap : rec.t * rec.t * rec.f_gap;
    }
    const SampleSummary s = summarize(values);
    report.at.push_back(static_cast<double>(k));
    report.lhs.push_back(s.mean - kStatisticalSlackSems * s.sem);
    report.rhs.push_back(rhs);
  }
  finish_report(report, 0.0);
  return report;
}

BoundReport bound_check_continuized(const GridSamples& samples, const Objective& obj,
                                    ContinuizedBound bound) {
  if (bound != ContinuizedBound::thm6_cvx && bound != ContinuizedBound::thm6_str)
    throw std::invalid_argument("stopped bounds are checked on jump-time traces");
  if (samples.f_gap.rows() < 100) throw std::invalid_argument("noise bounds need >= 100 replicates");
  const MethodConfig& c = samples.config;
  const bool strongly = bound == ContinuizedBound::thm6_str;
  if (strongly != (c.regime == Regime::strongly_convex))
    throw std::invalid_argument(std::string(to_string(bound)) + " does not match the run regime");

  const double sigma2 = c.noise ? c.noise->sigma2_bound : 0.0;
  const double dist2 = (samples.x0 - obj.x_star()).squaredNorm();
  const double numerator = strongly ? strongly_convex_numerator(obj, samples.x0, c.mu) : 0.0;

  BoundReport report;
  report.bound_name = std::string(to_string(bound));
  for (std::size_t j = 0; j < samples.grid.size(); ++j) {
    const double t = samples.grid[j];
    double rhs = 0.0;
    if (strongly) {
      rhs = numerator * std::exp(-std::sqrt(c.mu / c.L) * t) + sigma2 / std::sqrt(c.mu * c.L);
    } else {
      if (!(t > 0.0)) throw std::invalid_argument("thm6_cvx needs grid times > 0");
      rhs = 2.0 * c.L * dist2 / (t * t) + sigma2 * t / (3.0 * c.L);
    }
    const SampleSummary s = summarize_column(samples.f_gap, static_cast<Eigen::Index>(j));
    report.at.push_back(t);
    report.lhs.push_back(s.mean - kStatisticalSlackSems * s.sem);
    report.rhs.push_back(rhs);
  }
  finish_report(report, 0.0);
  return report;
}

double erlang_cdf(long k, double x) {
  if (k < 1) throw std::invalid_argument("Erlang shape must be >= 1");
  if (!(x > 0.0)) return 0.0;
  // 1 - exp(-x) sum_{n<k} x^n / n!, each term formed in log space.
  const double log_x = std::log(x);
  double tail = 0.0;
  for (long n = 0; n < k; ++n)
    tail += std::exp(-x + static_cast<double>(n) * log_x - std::lgamma(static_cast<double>(n) + 1.0));
  return std::clamp(1.0 - tail, 0.0, 1.0);
}

double ks_critical(double alpha, std::size_t n) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

double ks_pvalue(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

ErlangStats erlang_report(const std::vector<double>& samples, long k) {
  if (samples.size() < 1000) throw std::invalid_argument("erlang_report needs >= 1000 samples");
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  const SampleSummary s = summarize(samples);
  ErlangStats out;
  out.k = k;
  out.n = s.n;
  out.mean = s.mean;
  out.variance = s.variance;
  out.mean_sem = s.sem;
  out.ks_distance = ks_distance(samples, [k](double x) { return erlang_cdf(k, x); });
  out.ks_pvalue = ks_pvalue(out.ks_distance, s.n);
  return out;
}

double sqrt_A_ode_residual(const std::function<double(double)>& A, double mu, double L, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("ODE residual needs t > 0");
  const double h = std::min(1e-2, t / 10.0);
  const double f0 = std::sqrt(A(t));
  const double fm = std::sqrt(A(t - h));
  const double fp = std::sqrt(A(t + h));
  const double second = (fp - 2.0 * f0 + fm) / (h * h);
  return std::abs(second - mu / (4.0 * L) * f0) / f0;
}

namespace {

double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace

ScheduleResiduals schedule_residuals(const ContinuousSchedule& sched,
                                     const std::vector<double>& grid) {
  const double L = sched.L();
  const double mu = sched.regime() == Regime::convex ? 0.0 : sched.mu();
  auto A = [&sched](double t) { return sched.A(t); };
  ScheduleResiduals res;
  for (double t : grid) {
    if (!(t > 0.0)) throw std::invalid_argument("schedule residual grid must be > 0");
    const double a = sched.A(t);
    const double b = sched.B(t);
    const double gp = std::sqrt(a / (2.0 * L * b));
    res.consistency = std::max({res.consistency, rel_diff(sched.gamma_prime(t), gp),
                                rel_diff(sched.eta(t), std::sqrt(2.0 * b / (L * a))),
                                rel_diff(sched.eta_prime(t), mu * gp)});
    res.ode = std::max(res.ode, sqrt_A_ode_residual(A, mu, L, t));
  }
  return res;
}

LogSlopeFit fit_log_slope(const std::vector<RunRecord>& records, long k_lo, long k_hi,
                          double floor) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (const RunRecord& r : records) {
    if (r.k < k_lo || r.k > k_hi || !(r.f_gap > floor)) continue;
    const double x = static_cast<double>(r.k);
    const double y = std::log(r.f_gap);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw std::invalid_argument("too few points above the floor to fit a slope");
  const double nn = static_cast<double>(n);
  const double denom = nn * sxx - sx * sx;
  LogSlopeFit fit;
  fit.points = n;
  fit.slope = (nn * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / nn;
  return fit;
}

double f_gap_noise_floor(const Objective& obj) {
  const double eps = std::numeric_limits<double>::epsilon();
  const double scale = eps * std::max(1.0, obj.x_star().norm());
  return 64.0 * obj.L() * scale * scale;
}

nlohmann::json to_json(const LyapunovCertificate& cert) {
  return {{"grid", cert.grid},
          {"mean_phi", cert.mean_phi},
          {"sem", cert.sem},
          {"increment_sem", cert.increment_sem},
          {"monotone_ok", cert.monotone_ok},
          {"max_violation", cert.max_violation}};
}

nlohmann::json to_json(const BoundReport& report) {
  return {{"bound_name", report.bound_name}, {"at", report.at},
          {"lhs", report.lhs},               {"rhs", report.rhs},
          {"satisfied", report.satisfied},   {"worst_ratio", report.worst_ratio}};
}

nlohmann::json to_json(const ErlangStats& stats) {
  return {{"k", stats.k},
          {"n", stats.n},
          {"mean", stats.mean},
          {"variance", stats.variance},
          {"mean_sem", stats.mean_sem},
          {"ks_distance", stats.ks_distance},
          {"ks_pvalue", stats.ks_pvalue}};
}

}  // namespace continuized
