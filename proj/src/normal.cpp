#include "lucon/normal.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "lucon/error.hpp"

namespace lucon {

namespace {

constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;

double upper_tail(double z) noexcept {
  // z >= 3
  constexpr double tiny = 1e-300;
  double f = z;
  double c = f;
  double d = 0.0;
  for (int i = 1; i < 5000; ++i) {
    const double a = i;
    d = z + a * d;
    if (d == 0.0) d = tiny;
    d = 1.0 / d;
    c = z + a / c;
    if (c == 0.0) c = tiny;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return normal_pdf(z) / f;
}

}  // namespace

double normal_pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) noexcept {
  if (std::isnan(x)) return x;
  if (x >= 3.0) return 1.0 - upper_tail(x);
  if (x <= -3.0) return upper_tail(-x);
  const double x2 = x * x;
  double term = x;
  double sum = x;
  for (int i = 1; i < 500; ++i) {
    term *= x2 / (2.0 * i + 1.0);
    const double next = sum + term;
    if (next == sum) break;
    sum = next;
  }
  return 0.5 + normal_pdf(x) * sum;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal quantile needs p in (0, 1)");

  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // Halley refinement. In the upper half the error is measured on the
  // complementary tail to keep relative accuracy there.
  for (int iter = 0; iter < 2; ++iter) {
    const double e = x > 0.0 ? (1.0 - p) - normal_cdf(-x) : normal_cdf(x) - p;
    const double u = e / normal_pdf(x);
    if (!std::isfinite(u)) break;
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

}  // namespace lucon
