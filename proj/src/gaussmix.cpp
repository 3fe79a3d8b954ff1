#include "lucon/gaussmix.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lucon/error.hpp"
#include "lucon/normal.hpp"
#include "lucon/rng.hpp"

namespace lucon {

double GaussMixModel::theta_norm() const noexcept {
  double s = 0.0;
  for (double t : theta) s += t * t;
  return std::sqrt(s);
}

double GaussMixModel::projection(std::span<const float> x) const noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) s += theta[i] * static_cast<double>(x[i]);
  return s / theta_norm();
}

void GaussMixModel::validate() const {
  if (theta.empty() || !(theta_norm() > 0.0)) throw DomainError("theta must be non-zero");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be positive");
}

Dataset sample(const GaussMixModel& model, std::size_t m, std::uint64_t seed, SoftLabelMode mode) {
  model.validate();
  if (m == 0) throw DomainError("sample size must be at least 1");
  const std::size_t n = model.dim();
  std::vector<float> coords(m * n);
  LabelSet labels{std::vector<std::uint32_t>(m), 2};
  std::vector<double> dist(m * 2);
  std::vector<std::string> ids(m);

  std::vector<double> z(n + 1);
  for (std::size_t i = 0; i < m; ++i) {
    std::uint64_t mix = seed ^ (0xD1B54A32D192ED03ULL * (i + 1));
    Xoshiro256 rng(splitmix64(mix));
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; j += 2) {
      const double u1 = 1.0 - rng.uniform();
      const double u2 = rng.uniform();
      const double r = std::sqrt(-2.0 * std::log(u1));
      z[j] = r * std::cos(2.0 * std::numbers::pi * u2);
      z[j + 1] = r * std::sin(2.0 * std::numbers::pi * u2);
    }
    float* x = coords.data() + i * n;
    double dot = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      x[j] = static_cast<float>(sign * model.theta[j] + model.sigma * z[j]);
      dot += model.theta[j] * static_cast<double>(x[j]);
    }
    const std::uint32_t label = dot > 0.0 ? 1 : 0;
    labels.labels[i] = label;
    if (mode == SoftLabelMode::OneHot) {
      dist[2 * i + label] = 1.0;
    } else {
      const double p_plus = 1.0 / (1.0 + std::exp(-2.0 * dot / (model.sigma * model.sigma)));
      dist[2 * i] = 1.0 - p_plus;
      dist[2 * i + 1] = p_plus;
    }
    ids[i] = std::to_string(i);
  }

  Dataset d;
  d.points = PointSet(m, n, std::move(coords));
  d.labels = std::move(labels);
  d.soft = SoftLabelSet(2, std::move(dist));
  d.ids = std::move(ids);
  return d;
}

double gaussian_expansion(double alpha, double epsilon_std) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (!(epsilon_std >= 0.0)) throw DomainError("epsilon must be non-negative");
  return normal_cdf(normal_quantile(alpha) + epsilon_std);
}

HalfspaceMeasure halfspace_measure(const GaussMixModel& model, const HalfspaceSpec& spec) {
  model.validate();
  const double t = model.theta_norm();
  const double s = model.sigma;
  const double b = spec.offset;
  // Along theta/|theta| the components project to N(-|theta|, s^2) and N(|theta|, s^2).
  HalfspaceMeasure h;
  if (spec.side == HalfspaceSide::Minus) {
    h.mu_minus = normal_cdf((t - b) / s);
    h.mu_plus = normal_cdf((-b - t) / s);
  } else {
    h.mu_plus = normal_cdf((t - b) / s);
    h.mu_minus = normal_cdf((-b - t) / s);
  }
  h.mu = 0.5 * (h.mu_minus + h.mu_plus);
  return h;
}

double offset_for_alpha(const GaussMixModel& model, double alpha, HalfspaceSide side) {
  model.validate();
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  auto mu = [&](double b) { return halfspace_measure(model, {side, b}).mu; };

  const double scale = model.theta_norm() + model.sigma;
  double lo = -scale;
  double hi = scale;
  while (mu(lo) < alpha) lo *= 2.0;
  while (mu(hi) > alpha) hi *= 2.0;

  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double value = mu(mid);
    if (std::abs(value - alpha) <= 1e-10) return mid;
    if (mid == lo || mid == hi) return mid;
    (value > alpha ? lo : hi) = mid;
  }
  throw ConvergenceError("offset bisection did not converge for alpha=" + std::to_string(alpha));
}

HalfspaceMeasure expanded_halfspace_measure(const GaussMixModel& model, const HalfspaceSpec& spec,
                                            double epsilon) {
  if (!(epsilon >= 0.0)) throw DomainError("epsilon must be non-negative");
  return halfspace_measure(model, {spec.side, spec.offset - epsilon});
}

double analytic_concentration(const GaussMixModel& model, double alpha, double epsilon) {
  if (!(epsilon >= 0.0)) throw DomainError("epsilon must be non-negative");
  const double eps_std = epsilon / model.sigma;
  auto expand = [&](double component) {
    if (component <= 0.0) return 0.0;
    if (component >= 1.0) return 1.0;
    return gaussian_expansion(component, eps_std);
  };
  double best = 1.0;
  for (auto side : {HalfspaceSide::Minus, HalfspaceSide::Plus}) {
    const auto h = halfspace_measure(model, {side, offset_for_alpha(model, alpha, side)});
    best = std::min(best, 0.5 * expand(h.mu_minus) + 0.5 * expand(h.mu_plus));
  }
  return best;
}

double empirical_halfspace_expansion(const GaussMixModel& model, const HalfspaceSpec& spec,
                                     const PointSet& points, double epsilon) {
  model.validate();
  if (points.dim() != model.dim()) throw DimensionError("point dimension does not match theta");
  std::size_t inside = 0;
  for (std::size_t i = 0; i < points.count(); ++i) {
    const double z = model.projection(points.row(i));
    const bool hit = spec.side == HalfspaceSide::Minus ? z <= epsilon - spec.offset
                                                       : z >= spec.offset - epsilon;
    if (hit) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(points.count());
}

}  // namespace lucon
