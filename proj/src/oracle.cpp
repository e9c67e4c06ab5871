#include "continuized/oracle.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <json.hpp>

namespace continuized {

namespace {

bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace

Objective::Objective(std::string name, int dim, ValueFn value_fn, GradFn grad_fn, double L,
                     double mu, Vector x_star, double f_star)
    : name_(std::move(name)),
      dim_(dim),
      value_fn_(std::move(value_fn)),
      grad_fn_(std::move(grad_fn)),
      L_(L),
      mu_(mu),
      x_star_(std::move(x_star)),
      f_star_(f_star) {
  if (dim_ <= 0) throw std::invalid_argument("objective dimension must be positive");
  if (!(L_ > 0.0) || !std::isfinite(L_)) throw std::invalid_argument("L must be finite and > 0");
  if (!(mu_ >= 0.0) || mu_ > L_) throw std::invalid_argument("mu must lie in [0, L]");
  if (x_star_.size() != dim_ || !all_finite(x_star_))
    throw std::invalid_argument("x_star must have dim finite coordinates");
  if (!std::isfinite(f_star_)) throw std::invalid_argument("f_star must be finite");
  if (!value_fn_ || !grad_fn_) throw std::invalid_argument("value and gradient functions required");
}

void Objective::check_point(const Vector& x) const {
  if (x.size() != dim_)
    throw std::invalid_argument("point has " + std::to_string(x.size()) +
                                " coordinates, objective '" + name_ + "' expects " +
                                std::to_string(dim_));
  if (!all_finite(x)) throw std::invalid_argument("point has non-finite coordinates");
}

double Objective::value(const Vector& x) const {
  check_point(x);
  return value_fn_(x);
}

Vector Objective::grad(const Vector& x) const {
  check_point(x);
  return grad_fn_(x);
}

NoiseModel NoiseModel::isotropic(double sigma_g2, int dim) {
  if (!(sigma_g2 >= 0.0) || !std::isfinite(sigma_g2))
    throw std::invalid_argument("sigma_g2 must be finite and >= 0");
  if (dim <= 0) throw std::invalid_argument("noise dimension must be positive");
  return NoiseModel{sigma_g2, dim * sigma_g2};
}

Objective make_diagonal_quadratic(std::string name, Vector coeffs, Vector center) {
  if (coeffs.size() == 0 || coeffs.size() != center.size())
    throw std::invalid_argument("coeffs and center must be non-empty and of equal length");
  if (!all_finite(coeffs) || !all_finite(center))
    throw std::invalid_argument("coeffs and center must be finite");
  if ((coeffs.array() < 0.0).any()) throw std::invalid_argument("coeffs must be >= 0");
  const double L = coeffs.maxCoeff();
  const double mu = coeffs.minCoeff();
  if (!(L > 0.0)) throw std::invalid_argument("at least one coefficient must be positive");

  const int dim = static_cast<int>(coeffs.size());
  auto value = [coeffs, center](const Vector& x) {
    return 0.5 * (coeffs.array() * (x - center).array().square()).sum();
  };
  auto gradient = [coeffs, center](const Vector& x) -> Vector {
    return (coeffs.array() * (x - center).array()).matrix();
  };
  return Objective(std::move(name), dim, std::move(value), std::move(gradient), L, mu, center,
                   0.0);
}

Objective make_quad3(double mu, double L) {
  if (!(mu > 0.0)) throw std::invalid_argument("quad3 requires mu > 0");
  if (!(L > 0.0)) throw std::invalid_argument("quad3 requires L > 0");
  if (3.0 * mu > L) throw std::invalid_argument("quad3 requires 3 mu <= L");
  Vector c(3);
  c << mu, 3.0 * mu, L;
  return make_diagonal_quadratic("quad3", c, Vector::Ones(3));
}

Objective make_quad100() {
  constexpr int kDim = 100;
  Vector c(kDim), b(kDim);
  for (int i = 0; i < kDim; ++i) {
    const double n = i + 1;
    c[i] = 1.0 / (n * n);
    b[i] = 1.0 / n;
  }
  // The smallest coefficient 1e-4 is treated as zero: the problem is run in the
  // convex regime.
  const double L = c.maxCoeff();
  auto value = [c, b](const Vector& x) {
    return 0.5 * (c.array() * (x - b).array().square()).sum();
  };
  auto gradient = [c, b](const Vector& x) -> Vector {
    return (c.array() * (x - b).array()).matrix();
  };
  return Objective("quad100", kDim, std::move(value), std::move(gradient), L, 0.0, b, 0.0);
}

Objective quadratic_from_json_text(const std::string& text, std::string name) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed quadratic JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("coeffs") || !doc.contains("center"))
    throw std::invalid_argument("quadratic JSON needs \"coeffs\" and \"center\" arrays");
  std::vector<double> c, b;
  try {
    c = doc.at("coeffs").get<std::vector<double>>();
    b = doc.at("center").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("quadratic JSON arrays must be numeric: ") + e.what());
  }
  return make_diagonal_quadratic(std::move(name), Eigen::Map<Vector>(c.data(), c.size()),
                                 Eigen::Map<Vector>(b.data(), b.size()));
}

Objective load_quadratic(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open problem file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return quadratic_from_json_text(buf.str(), path.stem().string());
}

Vector grad(const Objective& obj, const Vector& x) { return obj.grad(x); }

Vector noisy_grad(const Objective& obj, const NoiseModel& noise, const Vector& x,
                  RandomStream& rng) {
  Vector g = obj.grad(x);
  if (noise.sigma_g2 > 0.0) {
    const double sd = std::sqrt(noise.sigma_g2);
    for (Eigen::Index i = 0; i < g.size(); ++i) g[i] += sd * rng.normal();
  }
  return g;
}

GradientOracle::GradientOracle(const Objective& obj) : obj_(&obj) {}

GradientOracle::GradientOracle(const Objective& obj, const NoiseModel& noise, RandomStream& rng)
    : obj_(&obj), noise_(noise), rng_(&rng) {}

Vector GradientOracle::operator()(const Vector& x) {
  ++evaluations_;
  Vector g = noise_ ? noisy_grad(*obj_, *noise_, x, *rng_) : obj_->grad(x);
  if (!g.allFinite()) throw std::domain_error("gradient evaluation produced non-finite values");
  return g;
}

}  // namespace continuized
