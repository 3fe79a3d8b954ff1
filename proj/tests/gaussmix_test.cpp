#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lucon/error.hpp"
#include "lucon/gaussmix.hpp"
#include "lucon/normal.hpp"

using namespace lucon;

namespace {
const GaussMixModel kModel{{1.0, 0.0}, 1.0};
}

TEST_CASE("sampler moments") {
  const GaussMixModel model{{0.6, -0.8, 0.0}, 0.5};
  const std::size_t m = 100000;
  const auto d = sample(model, m, 2024);
  const double band = 3.0 / std::sqrt(static_cast<double>(m));
  double mean_proj = 0.0;
  std::size_t ones = 0;
  for (std::size_t i = 0; i < m; ++i) {
    mean_proj += model.projection(d.points.row(i));
    ones += d.labels.labels[i];
  }
  mean_proj /= static_cast<double>(m);
  // Projection has variance sigma^2 + |theta|^2 = 1.25.
  CHECK(std::abs(mean_proj) < band * std::sqrt(1.25));
  CHECK(std::abs(static_cast<double>(ones) / static_cast<double>(m) - 0.5) < band * 0.5);

  // Within a component the projection has variance sigma^2; the component of
  // each sample is recovered from the sign of its projection only when the
  // components are well separated, so check the pooled variance instead.
  double ss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double z = model.projection(d.points.row(i));
    ss += z * z;
  }
  const double var = ss / static_cast<double>(m);
  const double expected = model.sigma * model.sigma + 1.0;
  CHECK(std::abs(var - expected) < 0.02);
}

TEST_CASE("per-component projected variance") {
  // Far-apart components so the sign of theta.x identifies the component.
  const GaussMixModel model{{10.0, 0.0}, 2.0};
  const auto d = sample(model, 50000, 5);
  double s = 0.0, ss = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double z = model.projection(d.points.row(i));
    if (z > 0) {
      s += z;
      ss += z * z;
      ++n;
    }
  }
  const double mean = s / static_cast<double>(n);
  const double var = ss / static_cast<double>(n) - mean * mean;
  CHECK(mean == doctest::Approx(10.0).epsilon(0.01));
  CHECK(var == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("sampler is deterministic and prefix-stable") {
  const auto a = sample(kModel, 100, 9);
  const auto b = sample(kModel, 100, 9);
  const auto c = sample(kModel, 50, 9);
  CHECK(a.points == b.points);
  for (std::size_t i = 0; i < 50; ++i)
    CHECK(std::equal(c.points.row(i).begin(), c.points.row(i).end(), a.points.row(i).begin()));
  CHECK(sample(kModel, 100, 10).points != a.points);
}

TEST_CASE("posterior soft labels") {
  const auto d = sample(kModel, 500, 3, SoftLabelMode::Posterior);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double dot = d.points.row(i)[0];
    const double p = 1.0 / (1.0 + std::exp(-2.0 * dot));
    CHECK(d.soft->row(i)[1] == doctest::Approx(p).epsilon(1e-12));
    CHECK(d.labels.labels[i] == (dot > 0 ? 1u : 0u));
  }
  const auto h = sample(kModel, 10, 3);
  for (std::size_t i = 0; i < h.size(); ++i) CHECK(h.soft->row(i)[h.labels.labels[i]] == 1.0);
}

TEST_CASE("gaussian_expansion") {
  CHECK(gaussian_expansion(0.3, 0.0) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(std::abs(gaussian_expansion(0.5, 1.0) - 0.841345) < 1e-6);
  CHECK(std::abs(gaussian_expansion(0.0227501, 2.0) - 0.5) < 1e-5);
  CHECK(gaussian_expansion(0.2, 0.5) < gaussian_expansion(0.2, 0.6));
  CHECK(gaussian_expansion(0.2, 0.5) < gaussian_expansion(0.25, 0.5));
  CHECK_THROWS_AS(gaussian_expansion(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(gaussian_expansion(1.0, 1.0), DomainError);
  CHECK_THROWS_AS(gaussian_expansion(0.5, -1.0), DomainError);
}

TEST_CASE("halfspace_measure") {
  const auto at_mean = halfspace_measure(kModel, {HalfspaceSide::Minus, 1.0});
  CHECK(at_mean.mu_minus == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(halfspace_measure(kModel, {HalfspaceSide::Minus, 60.0}).mu < 1e-300);
  const auto plus = halfspace_measure(kModel, {HalfspaceSide::Plus, 1.0});
  CHECK(plus.mu_plus == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(plus.mu == doctest::Approx(at_mean.mu).epsilon(1e-15));
}

TEST_CASE("halfspace_measure matches Monte Carlo") {
  const auto pts = sample(kModel, 1000000, 31).points;
  for (auto side : {HalfspaceSide::Minus, HalfspaceSide::Plus}) {
    const HalfspaceSpec spec{side, 1.0};
    const double mc = empirical_halfspace_expansion(kModel, spec, pts, 0.0);
    CHECK(std::abs(mc - halfspace_measure(kModel, spec).mu) < 0.002);
  }
}

TEST_CASE("offset_for_alpha") {
  for (double alpha : {0.001, 0.01, 0.05, 0.3, 0.5, 0.9}) {
    const double b = offset_for_alpha(kModel, alpha, HalfspaceSide::Minus);
    CHECK(std::abs(halfspace_measure(kModel, {HalfspaceSide::Minus, b}).mu - alpha) <= 1e-10);
    CHECK(offset_for_alpha(kModel, alpha, HalfspaceSide::Plus) == doctest::Approx(b).epsilon(1e-9));
  }
  // alpha = 0.5 puts the boundary at the median of the projection, which the
  // sample median estimates.
  const double b = offset_for_alpha(kModel, 0.5, HalfspaceSide::Minus);
  const auto pts = sample(kModel, 200001, 4).points;
  std::vector<double> z;
  for (std::size_t i = 0; i < pts.count(); ++i) z.push_back(kModel.projection(pts.row(i)));
  std::nth_element(z.begin(), z.begin() + 100000, z.end());
  CHECK(std::abs(z[100000] - (-b)) < 0.02);
  CHECK_THROWS_AS(offset_for_alpha(kModel, 1.0, HalfspaceSide::Minus), DomainError);
}

TEST_CASE("analytic_concentration") {
  CHECK(analytic_concentration(kModel, 0.05, 0.0) == doctest::Approx(0.05).epsilon(1e-9));
  double prev_eps = 0.0;
  for (double eps = 0.0; eps <= 2.0; eps += 0.1) {
    const double h = analytic_concentration(kModel, 0.05, eps);
    CHECK(h >= 0.05 - 1e-10);
    CHECK(h >= prev_eps - 1e-12);
    prev_eps = h;
  }
  double prev_alpha = 0.0;
  for (double alpha = 0.01; alpha < 0.99; alpha += 0.02) {
    const double h = analytic_concentration(kModel, alpha, 0.5);
    CHECK(h >= prev_alpha);
    prev_alpha = h;
  }
  // Independent route: shift the optimal halfspace's offset by epsilon.
  const GaussMixModel model{{0.3, 0.4}, 0.7};
  for (double eps : {0.1, 0.5, 1.3}) {
    const double b = offset_for_alpha(model, 0.08, HalfspaceSide::Minus);
    const auto shifted = expanded_halfspace_measure(model, {HalfspaceSide::Minus, b}, eps);
    CHECK(analytic_concentration(model, 0.08, eps) == doctest::Approx(shifted.mu).epsilon(1e-9));
  }
}

TEST_CASE("analytic_concentration matches Monte Carlo expansion") {
  const double h = analytic_concentration(kModel, 0.05, 0.5);
  const double b = offset_for_alpha(kModel, 0.05, HalfspaceSide::Minus);
  const auto pts = sample(kModel, 1000000, 77).points;
  const double mc = empirical_halfspace_expansion(kModel, {HalfspaceSide::Minus, b}, pts, 0.5);
  CHECK(std::abs(mc - h) < 0.003);
}
