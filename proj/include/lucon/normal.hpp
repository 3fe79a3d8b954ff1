#pragma once

namespace lucon {

/// Standard normal density.
double normal_pdf(double x) noexcept;

/// Standard normal CDF. |x| < 3 uses the odd power series
/// Phi(x) = 1/2 + phi(x) * (x + x^3/3 + x^5/(3*5) + ...), which has no
/// cancellation; the tails use the Laplace continued fraction
/// Q(z) = phi(z) / (z + 1/(z + 2/(z + 3/(z + ...)))) evaluated by modified
/// Lentz iteration. Absolute error is below 1e-15 over the real line.
double normal_cdf(double x) noexcept;

/// Inverse standard normal CDF for p in (0, 1): Acklam's rational
/// approximation (relative error ~1.2e-9) refined by two Halley steps
/// against normal_cdf. Throws DomainError outside (0, 1).
double normal_quantile(double p);

}  // namespace lucon
