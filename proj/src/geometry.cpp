#include "lucon/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "lucon/error.hpp"
#include "lucon/parallel.hpp"

namespace lucon {

std::string_view to_string(Metric metric) noexcept {
  return metric == Metric::L2 ? "l2" : "linf";
}

Metric parse_metric(std::string_view text) {
  if (text == "l2") return Metric::L2;
  if (text == "linf") return Metric::Linf;
  throw ConfigError("unknown metric '" + std::string(text) + "' (expected l2 or linf)");
}

namespace {

double raw_distance(Metric metric, std::span<const float> x, std::span<const float> u) noexcept {
  const std::size_t n = x.size();
  if (metric == Metric::L2) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = static_cast<double>(x[i]) - static_cast<double>(u[i]);
      acc += d * d;
    }
    return std::sqrt(acc);
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    acc = std::max(acc, std::abs(static_cast<double>(x[i]) - static_cast<double>(u[i])));
  return acc;
}

}  // namespace

double distance(Metric metric, std::span<const float> x, std::span<const float> u) {
  if (x.size() != u.size())
    throw DimensionError("dimension mismatch: " + std::to_string(x.size()) + " vs " +
                         std::to_string(u.size()));
  return raw_distance(metric, x, u);
}

float stored_distance(Metric metric, std::span<const float> x, std::span<const float> u) noexcept {
  return static_cast<float>(raw_distance(metric, x, u));
}

double kth_neighbor_radius(const PointSet& points, std::span<const std::size_t> active,
                           std::size_t center, std::size_t k, Metric metric) {
  if (k == 0 || k > active.size())
    throw DomainError("k=" + std::to_string(k) + " outside [1, " + std::to_string(active.size()) +
                      "]");
  const auto u = points.row(center);
  std::vector<float> dists;
  dists.reserve(active.size());
  for (std::size_t i : active) dists.push_back(stored_distance(metric, points.row(i), u));
  auto kth = dists.begin() + static_cast<std::ptrdiff_t>(k - 1);
  std::nth_element(dists.begin(), kth, dists.end());
  return *kth;
}

std::vector<std::size_t> ball_members(const PointSet& points, std::span<const std::size_t> active,
                                      std::span<const float> center, double radius,
                                      Metric metric) {
  if (center.size() != points.dim()) throw DimensionError("ball center dimension mismatch");
  std::vector<std::size_t> members;
  for (std::size_t i : active)
    if (within(stored_distance(metric, points.row(i), center), radius)) members.push_back(i);
  return members;
}

bool Region::contains(std::span<const float> x, double epsilon) const noexcept {
  for (const auto& ball : balls)
    if (within(stored_distance(metric, x, ball.center), ball.radius, epsilon)) return true;
  return false;
}

std::vector<std::size_t> expansion_members(const Region& region, const PointSet& points,
                                           double epsilon, int threads) {
  if (!(epsilon >= 0.0)) throw DomainError("epsilon must be non-negative");
  for (const auto& ball : region.balls)
    if (ball.center.size() != points.dim()) throw DimensionError("region/point dimension mismatch");
  std::vector<char> inside(points.count(), 0);
  parallel_chunks(points.count(), threads, [&](std::size_t begin, std::size_t end, int) {
    for (std::size_t i = begin; i < end; ++i)
      inside[i] = region.contains(points.row(i), epsilon) ? 1 : 0;
  });
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < inside.size(); ++i)
    if (inside[i]) members.push_back(i);
  return members;
}

double empirical_measure(std::size_t total, std::size_t member_count) {
  if (total == 0) throw DomainError("empirical measure of an empty sample");
  if (member_count > total) throw DomainError("member count exceeds sample size");
  return static_cast<double>(member_count) / static_cast<double>(total);
}

nlohmann::ordered_json region_to_json(const Region& region) {
  nlohmann::ordered_json balls = nlohmann::ordered_json::array();
  for (const auto& ball : region.balls)
    balls.push_back({{"center_index", ball.center_index}, {"radius", ball.radius}});
  return {{"metric", to_string(region.metric)}, {"balls", std::move(balls)}};
}

Region region_from_json(const nlohmann::json& j, const PointSet& centers) {
  Region region;
  try {
    region.metric = parse_metric(j.at("metric").get<std::string>());
    for (const auto& b : j.at("balls")) {
      Ball ball;
      ball.center_index = b.at("center_index").get<std::size_t>();
      ball.radius = b.at("radius").get<double>();
      if (ball.center_index >= centers.count())
        throw FormatError("region center_index " + std::to_string(ball.center_index) +
                          " out of range");
      if (!(ball.radius >= 0.0)) throw FormatError("region radius must be non-negative");
      const auto c = centers.row(ball.center_index);
      ball.center.assign(c.begin(), c.end());
      region.balls.push_back(std::move(ball));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed region JSON: ") + e.what());
  }
  return region;
}

DistanceCache::DistanceCache(const PointSet& points, Metric metric, std::size_t mem_cap_bytes,
                             int threads)
    : points_(&points), metric_(metric) {
  const std::size_t m = points.count();
  if (m != 0 && m * m <= mem_cap_bytes / sizeof(float)) {
    matrix_.resize(m * m);
    const auto workers = chunk_count(m, threads);
    // Rows interleaved across workers for balance; entry (i, j) with i <= j is
    // written by the owner of row i only.
    parallel_chunks(workers, static_cast<int>(workers), [&](std::size_t, std::size_t, int w) {
      for (std::size_t i = static_cast<std::size_t>(w); i < m; i += workers) {
        const auto xi = points.row(i);
        matrix_[i * m + i] = 0.0f;
        for (std::size_t j = i + 1; j < m; ++j) {
          const float d = stored_distance(metric, xi, points.row(j));
          matrix_[i * m + j] = d;
          matrix_[j * m + i] = d;
        }
      }
    });
  }
}

std::span<const float> DistanceCache::row(std::size_t center, std::vector<float>& scratch) const {
  const std::size_t m = points_->count();
  if (cached()) return {matrix_.data() + center * m, m};
  scratch.resize(m);
  const auto u = points_->row(center);
  for (std::size_t j = 0; j < m; ++j) scratch[j] = stored_distance(metric_, points_->row(j), u);
  return scratch;
}

}  // namespace lucon
