#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lucon/dataset.hpp"

namespace lucon {

enum class Metric { L2, Linf };

std::string_view to_string(Metric metric) noexcept;
/// Accepts "l2" and "linf"; throws ConfigError otherwise.
Metric parse_metric(std::string_view text);

/// l2 or l-infinity distance accumulated in binary64.
/// Throws DimensionError when the dimensions differ.
double distance(Metric metric, std::span<const float> x, std::span<const float> u);

/// distance() rounded to binary32: the value every ball-membership test,
/// radius and distance cache in this library works with. Unchecked.
float stored_distance(Metric metric, std::span<const float> x, std::span<const float> u) noexcept;

/// Inclusive ball test against a radius widened by epsilon, compared in binary64.
inline bool within(float stored, double radius, double epsilon = 0.0) noexcept {
  return static_cast<double>(stored) <= radius + epsilon;
}

/// k-th smallest stored distance from points[center] to the active points
/// (order statistic of the multiset, so ties count with multiplicity). When
/// the center is active it is its own first neighbor at distance 0.
/// Throws DomainError if k == 0 or k > active.size().
double kth_neighbor_radius(const PointSet& points, std::span<const std::size_t> active,
                           std::size_t center, std::size_t k, Metric metric);

/// Active indices within `radius` (inclusive) of center, in the order of `active`.
std::vector<std::size_t> ball_members(const PointSet& points, std::span<const std::size_t> active,
                                      std::span<const float> center, double radius,
                                      Metric metric);

struct Ball {
  std::size_t center_index = 0;  ///< index into the set the search ran on
  std::vector<float> center;
  double radius = 0.0;

  friend bool operator==(const Ball&, const Ball&) = default;
};

/// Union of closed balls (hypercubes under l-infinity).
struct Region {
  Metric metric = Metric::L2;
  std::vector<Ball> balls;

  /// True when x lies within radius + epsilon of some center.
  bool contains(std::span<const float> x, double epsilon = 0.0) const noexcept;

  friend bool operator==(const Region&, const Region&) = default;
};

/// Indices of points inside the epsilon-expansion of the region, ascending.
/// With epsilon = 0 this is plain region membership.
std::vector<std::size_t> expansion_members(const Region& region, const PointSet& points,
                                           double epsilon, int threads = 1);

inline std::vector<std::size_t> region_members(const Region& region, const PointSet& points,
                                               int threads = 1) {
  return expansion_members(region, points, 0.0, threads);
}

/// member_count / total.
double empirical_measure(std::size_t total, std::size_t member_count);

/// `{"metric":"l2"|"linf","balls":[{"center_index":int,"radius":real}]}`
nlohmann::ordered_json region_to_json(const Region& region);
/// Rebuilds centers from `centers` (the set the search ran on).
Region region_from_json(const nlohmann::json& j, const PointSet& centers);

/// Full m x m matrix of stored distances when it fits the memory cap;
/// otherwise rows are computed on demand.
class DistanceCache {
 public:
  DistanceCache(const PointSet& points, Metric metric, std::size_t mem_cap_bytes, int threads = 1);

  bool cached() const noexcept { return !matrix_.empty(); }
  std::size_t size() const noexcept { return points_->count(); }
  Metric metric() const noexcept { return metric_; }

  /// Stored distances from points[center] to every point. Returns a view of
  /// the cached row, or fills `scratch` and returns a view of it.
  std::span<const float> row(std::size_t center, std::vector<float>& scratch) const;

 private:
  const PointSet* points_;
  Metric metric_;
  std::vector<float> matrix_;
};

}  // namespace lucon
