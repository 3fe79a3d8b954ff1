#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lucon/dataset.hpp"

namespace lucon {

/// Mixture 1/2 N(-theta, sigma^2 I) + 1/2 N(theta, sigma^2 I) labeled by
/// c(x) = sgn(theta . x), encoded as class 1 for theta . x > 0 and 0 otherwise.
struct GaussMixModel {
  std::vector<double> theta;
  double sigma = 1.0;

  std::size_t dim() const noexcept { return theta.size(); }
  double theta_norm() const noexcept;
  /// theta . x / |theta|, the signed coordinate along theta.
  double projection(std::span<const float> x) const noexcept;
  /// Throws DomainError unless theta != 0 and sigma > 0.
  void validate() const;
};

enum class SoftLabelMode {
  OneHot,     ///< soft label equals the concept label
  Posterior,  ///< soft label is the component posterior 1 / (1 + exp(-2 theta.x / sigma^2))
};

/// m examples; example i draws from its own xoshiro256** stream derived from
/// (seed, i), so output does not depend on how generation is scheduled.
Dataset sample(const GaussMixModel& model, std::size_t m, std::uint64_t seed,
               SoftLabelMode mode = SoftLabelMode::OneHot);

/// Phi(Phi^-1(alpha) + epsilon_std): measure of a standard-Gaussian
/// halfspace of measure alpha after expansion by epsilon_std.
/// Throws DomainError unless alpha in (0, 1) and epsilon_std >= 0.
double gaussian_expansion(double alpha, double epsilon_std);

enum class HalfspaceSide { Minus, Plus };

/// Minus: {x : theta.x + b|theta| <= 0}. Plus: {x : theta.x - b|theta| >= 0}.
struct HalfspaceSpec {
  HalfspaceSide side = HalfspaceSide::Minus;
  double offset = 0.0;
};

struct HalfspaceMeasure {
  double mu = 0.0;        ///< mixture measure
  double mu_minus = 0.0;  ///< measure under N(-theta, sigma^2 I)
  double mu_plus = 0.0;   ///< measure under N(theta, sigma^2 I)
};

HalfspaceMeasure halfspace_measure(const GaussMixModel& model, const HalfspaceSpec& spec);

/// Offset b with mixture measure alpha, by bisection to |mu - alpha| <= 1e-10.
/// Throws DomainError unless alpha in (0, 1); ConvergenceError after 400 halvings.
double offset_for_alpha(const GaussMixModel& model, double alpha, HalfspaceSide side);

/// The halfspace's measure after expansion by epsilon in l2 (coordinate units).
HalfspaceMeasure expanded_halfspace_measure(const GaussMixModel& model, const HalfspaceSpec& spec,
                                            double epsilon);

/// Minimum l2 epsilon-expansion measure over all sets of measure alpha:
/// 1/2 Phi(Phi^-1(a_minus) + eps/sigma) + 1/2 Phi(Phi^-1(a_plus) + eps/sigma)
/// at the halfspace of measure alpha (smaller of the two sides).
double analytic_concentration(const GaussMixModel& model, double alpha, double epsilon);

/// Fraction of `points` inside the epsilon-expansion of the halfspace.
double empirical_halfspace_expansion(const GaussMixModel& model, const HalfspaceSpec& spec,
                                     const PointSet& points, double epsilon);

}  // namespace lucon
