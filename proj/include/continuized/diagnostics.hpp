#pragma once

#include <algorithm>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "continuized/methods.hpp"
#include "continuized/oracle.hpp"
#include "continuized/schedules.hpp"

namespace continuized {

/// phi_t = A_t (f(x) - f_star) + B_t |z - x_star|^2.
double lyapunov_value(double t, const Vector& x, const Vector& z, const Objective& obj,
                      const ContinuousSchedule& sched);

/// Sample statistics; sem is the standard error of the mean (0 for n = 1).
struct SampleSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;
  double sem = 0.0;
  double min = 0.0;
  double max = 0.0;
};

SampleSummary summarize(std::span<const double> values);

// ---------------------------------------------------------------------------
// Continuous-time sampling of continuized runs.

/// f-gap and phi of each replicate at fixed times. Between jumps the state is
/// carried to the grid time by the closed-form mixing flow.
struct GridSamples {
  MethodConfig config;
  Vector x0;
  std::vector<double> grid;
  Eigen::MatrixXd f_gap;  // replicates x grid
  Eigen::MatrixXd phi;    // replicates x grid
};

/// Replicate r uses seed config.seed + r. Requires a continuized config and a
/// non-decreasing grid of times >= 0.
GridSamples sample_on_grid(const MethodConfig& config, const Objective& obj,
                           const std::vector<double>& grid, int replicates, int jobs = 1);

struct LyapunovCertificate {
  std::vector<double> grid;
  std::vector<double> mean_phi;
  std::vector<double> sem;
  /// Standard error of the paired increment phi(t_{j+1}) - phi(t_j).
  std::vector<double> increment_sem;
  bool monotone_ok = false;
  /// Largest observed increase of mean phi between consecutive grid times.
  double max_violation = 0.0;
};

/// Mean phi is accepted as non-increasing when every increment is at most
/// 3 standard errors of the paired increment.
LyapunovCertificate certify_supermartingale(const GridSamples& samples);

/// Requires a noiseless continuized config and replicates >= 100.
LyapunovCertificate supermartingale_check(const MethodConfig& config, const Objective& obj,
                                          const std::vector<double>& grid, int replicates,
                                          int jobs = 1);

// ---------------------------------------------------------------------------
// Bound certification.

enum class DeterministicBound { thm1_cvx, thm1_str, thm2_cvx, thm2_str };
enum class ContinuizedBound { thm5_cvx, thm5_str, thm6_cvx, thm6_str };

std::string_view to_string(DeterministicBound bound);
std::string_view to_string(ContinuizedBound bound);

struct BoundReport {
  std::string bound_name;
  std::vector<double> at;  // k or t for each entry
  std::vector<double> lhs;
  std::vector<double> rhs;
  bool satisfied = false;
  double worst_ratio = 0.0;
};

inline constexpr double kDeterministicBoundTol = 1e-9;
inline constexpr double kStatisticalSlackSems = 3.0;

/// Pointwise f_gap(k) against the named rate bound with 1e-9 relative slack.
/// Constants come from the trace's configuration; the method/regime of the
/// trace must match the bound.
BoundReport bound_check_deterministic(const RunTrace& trace, const Objective& obj,
                                      DeterministicBound bound);

/// Stopped bounds at jump counts k: mean of T_k^2 f_gap (thm5_cvx) or
/// exp(sqrt(mu/L) T_k) f_gap (thm5_str), minus 3 SEM, against phi_0 scaled to
/// the bound. Needs >= 100 traces of one continuized configuration.
BoundReport bound_check_continuized(const std::vector<RunTrace>& traces, const Objective& obj,
                                    ContinuizedBound bound, const std::vector<long>& k_grid);

/// Fixed-time bounds thm6_cvx / thm6_str: mean f_gap(t) minus 3 SEM against
/// the rate term plus the noise term (sigma^2 = noise.sigma2_bound).
BoundReport bound_check_continuized(const GridSamples& samples, const Objective& obj,
                                    ContinuizedBound bound);

// ---------------------------------------------------------------------------
// Jump-time statistics.

/// CDF of Erlang(k, 1) (sum of k Exp(1) variables).
double erlang_cdf(long k, double x);

/// Kolmogorov-Smirnov distance between the empirical CDF of `samples` and `cdf`.
template <class Cdf>
double ks_distance(std::vector<double> samples, const Cdf& cdf);

/// Asymptotic one-sample KS critical distance at level alpha.
double ks_critical(double alpha, std::size_t n);
/// Asymptotic p-value of a KS distance d with n samples.
double ks_pvalue(double d, std::size_t n);

struct ErlangStats {
  long k = 0;
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;
  double mean_sem = 0.0;
  double ks_distance = 0.0;
  double ks_pvalue = 0.0;
};

/// Requires at least 1000 samples of T_k.
ErlangStats erlang_report(const std::vector<double>& samples, long k);

// ---------------------------------------------------------------------------
// Schedule identities.

/// Relative residual of d^2/dt^2 sqrt(A_t) = (mu / 4L) sqrt(A_t) at t > 0,
/// using a central second difference and normalized by sqrt(A_t).
double sqrt_A_ode_residual(const std::function<double(double)>& A, double mu, double L, double t);

struct ScheduleResiduals {
  /// Worst relative mismatch of gamma', eta, eta' against their expressions
  /// in terms of A_t and B_t.
  double consistency = 0.0;
  double ode = 0.0;
};

/// Evaluated on grid times > 0. The convex regime uses mu = 0.
ScheduleResiduals schedule_residuals(const ContinuousSchedule& sched,
                                     const std::vector<double>& grid);

// ---------------------------------------------------------------------------
// Rate fitting.

struct LogSlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};

/// Least squares of log f_gap against k over [k_lo, k_hi]; samples with
/// f_gap <= floor are dropped (they sit at the floating-point floor).
LogSlopeFit fit_log_slope(const std::vector<RunRecord>& records, long k_lo, long k_hi,
                          double floor);

/// Smallest f_gap distinguishable from rounding for an objective:
/// 64 L (eps max(1, |x_star|))^2.
double f_gap_noise_floor(const Objective& obj);

nlohmann::json to_json(const LyapunovCertificate& cert);
nlohmann::json to_json(const BoundReport& report);
nlohmann::json to_json(const ErlangStats& stats);

// ---------------------------------------------------------------------------

template <class Cdf>
double ks_distance(std::vector<double> samples, const Cdf& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double F = cdf(samples[i]);
    d = std::max(d, std::max(static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n));
  }
  return d;
}

}  // namespace continuized
