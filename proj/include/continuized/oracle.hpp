#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "continuized/random.hpp"

namespace continuized {

using Vector = Eigen::VectorXd;

/// Black-box first-order oracle with declared curvature bounds and a known
/// minimizer. Immutable after construction; safe to share between runs.
class Objective {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  using GradFn = std::function<Vector(const Vector&)>;

  /// Throws std::invalid_argument if L <= 0, mu < 0, mu > L, or x_star does
  /// not have `dim` finite coordinates.
  Objective(std::string name, int dim, ValueFn value_fn, GradFn grad_fn, double L, double mu,
            Vector x_star, double f_star);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  double L() const { return L_; }
  double mu() const { return mu_; }
  const Vector& x_star() const { return x_star_; }
  double f_star() const { return f_star_; }

  /// f(x). Rejects wrong dimension and non-finite coordinates.
  double value(const Vector& x) const;
  /// grad f(x). Same validation as value().
  Vector grad(const Vector& x) const;
  /// f(x) - f_star.
  double gap(const Vector& x) const { return value(x) - f_star_; }

 private:
  void check_point(const Vector& x) const;

  std::string name_;
  int dim_;
  ValueFn value_fn_;
  GradFn grad_fn_;
  double L_;
  double mu_;
  Vector x_star_;
  double f_star_;
};

/// Additive isotropic Gaussian gradient noise.
///
/// sigma_g2 is the per-coordinate variance; sigma2_bound is the resulting
/// bound on E|xi|^2, i.e. dim * sigma_g2.
struct NoiseModel {
  double sigma_g2 = 0.0;
  double sigma2_bound = 0.0;

  static NoiseModel isotropic(double sigma_g2, int dim);
};

/// f(x) = 1/2 sum_i c_i (x_i - b_i)^2 with L = max c_i and mu = min c_i.
Objective make_diagonal_quadratic(std::string name, Vector coeffs, Vector center);

/// mu/2 (x1-1)^2 + 3mu/2 (x2-1)^2 + L/2 (x3-1)^2. Requires 0 < 3 mu <= L.
Objective make_quad3(double mu, double L);

/// 1/2 sum_{i=1}^{100} (x_i - 1/i)^2 / i^2. Declared mu = 0.
Objective make_quad100();

/// Parses {"coeffs": [...], "center": [...]} into a diagonal quadratic.
Objective quadratic_from_json_text(const std::string& text, std::string name = "custom");
Objective load_quadratic(const std::filesystem::path& path);

Vector grad(const Objective& obj, const Vector& x);

/// grad f(x) + xi with xi ~ N(0, sigma_g2 I), drawn from `rng`.
Vector noisy_grad(const Objective& obj, const NoiseModel& noise, const Vector& x,
                  RandomStream& rng);

/// Gradient access used by the iteration engines. Wraps an objective, an
/// optional noise model, and counts evaluations.
class GradientOracle {
 public:
  explicit GradientOracle(const Objective& obj);
  GradientOracle(const Objective& obj, const NoiseModel& noise, RandomStream& rng);

  Vector operator()(const Vector& x);

  const Objective& objective() const { return *obj_; }
  std::int64_t evaluations() const { return evaluations_; }

 private:
  const Objective* obj_;
  std::optional<NoiseModel> noise_;
  RandomStream* rng_ = nullptr;
  std::int64_t evaluations_ = 0;
};

}  // namespace continuized
