#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lucon/dataset.hpp"

namespace lucon {

/// Label uncertainty of one example: 1 - p[label] + max_{j != label} p[j].
/// The result lies in [0, 2]. Throws DomainError when label >= p.size().
double example_lu(std::span<const double> soft_row, std::uint32_t label);

/// Per-example scores for every example of d. Requires soft labels.
std::vector<double> example_scores(const Dataset& d);
std::vector<double> example_scores(const LabelSet& labels, const SoftLabelSet& soft);

// Region LU is accumulated in fixed point (units of 2^-44) so that sums are
// exact, independent of member order and of how work is partitioned.
inline constexpr int kLuFixedBits = 44;
inline constexpr double kLuFixedScale = 0x1.0p44;

using LuFixed = std::int64_t;

LuFixed to_fixed(double lu) noexcept;

/// ceil(gamma * 2^44); the smallest fixed-point mean that satisfies gamma.
LuFixed fixed_threshold(double gamma);

/// Exact running sum of fixed-point scores.
struct LuAccumulator {
  LuFixed sum = 0;
  std::size_t count = 0;

  void add(LuFixed v) noexcept {
    sum += v;
    ++count;
  }
  /// Mean in LU units; count must be positive.
  double mean() const noexcept;
  /// floor(sum / count) >= threshold, evaluated exactly.
  bool meets(LuFixed threshold) const noexcept;
};

bool meets_threshold(LuFixed sum, std::size_t count, LuFixed threshold) noexcept;
double fixed_mean(LuFixed sum, std::size_t count) noexcept;

/// Mean label uncertainty over the member examples.
/// Throws EmptyRegionError if members is empty, ConfigError without soft labels.
double region_lu(const Dataset& d, std::span<const std::size_t> members);

/// Same, over precomputed fixed-point scores.
double region_lu(std::span<const LuFixed> scores, std::span<const std::size_t> members);

struct Histogram {
  std::vector<double> bin_edges;
  std::vector<std::size_t> counts;
};

/// Bins are [e_i, e_{i+1}) except the last, which is closed. Edges must be
/// strictly ascending and cover [0, 2].
Histogram make_histogram(std::span<const double> scores, std::span<const double> bin_edges);

/// 0, 0.1, ..., 2.0
std::vector<double> default_bin_edges();

struct LuStats {
  Histogram histogram;
  double mean = 0.0;
  std::vector<double> scores;
};

LuStats lu_stats(const Dataset& d, std::span<const double> bin_edges);
LuStats lu_stats(std::vector<double> scores, std::span<const double> bin_edges);

std::size_t count_below(std::span<const double> scores, double threshold);
std::size_t count_above(std::span<const double> scores, double threshold);

/// Per-example LU CSV: header `id,lu`, values with 6 significant digits.
std::string format_lu_csv(std::span<const std::string> ids, std::span<const double> scores);
void write_lu_csv(const std::filesystem::path& path, std::span<const std::string> ids,
                  std::span<const double> scores);

struct LuTable {
  std::vector<std::string> ids;
  std::vector<double> scores;
};
LuTable load_lu_csv(const std::filesystem::path& path);

}  // namespace lucon
