#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lucon {

/// Row-major m x n matrix of binary32 coordinates.
class PointSet {
 public:
  PointSet() = default;
  /// Validates shape and finiteness; throws FormatError on violation.
  PointSet(std::size_t count, std::size_t dim, std::vector<float> coords);

  std::size_t count() const noexcept { return count_; }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const float> row(std::size_t i) const noexcept {
    return {coords_.data() + i * dim_, dim_};
  }
  const std::vector<float>& coords() const noexcept { return coords_; }

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  std::size_t count_ = 0;
  std::size_t dim_ = 0;
  std::vector<float> coords_;
};

/// Hard labels c(x) in [0, k).
struct LabelSet {
  std::vector<std::uint32_t> labels;
  std::uint32_t num_classes = 0;

  std::size_t size() const noexcept { return labels.size(); }
};

/// Empirical soft-label distributions, m rows of k probabilities.
class SoftLabelSet {
 public:
  SoftLabelSet() = default;
  /// Rows must lie in [0,1] and sum to 1 within 1e-6; accepted rows are renormalized.
  SoftLabelSet(std::size_t num_classes, std::vector<double> dist);

  std::size_t size() const noexcept { return num_classes_ == 0 ? 0 : dist_.size() / num_classes_; }
  std::size_t num_classes() const noexcept { return num_classes_; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {dist_.data() + i * num_classes_, num_classes_};
  }

 private:
  std::size_t num_classes_ = 0;
  std::vector<double> dist_;
};

inline constexpr double kSimplexTolerance = 1e-6;

struct Dataset {
  PointSet points;
  LabelSet labels;
  std::optional<SoftLabelSet> soft;
  std::vector<std::string> ids;

  std::size_t size() const noexcept { return points.count(); }
  std::size_t dim() const noexcept { return points.dim(); }
  bool has_soft() const noexcept { return soft.has_value(); }
};

/// Checks that component lengths agree, labels are in range and ids are unique.
void validate(const Dataset& d);

enum class PointFormat { Binary, Csv };

/// Picks Csv for a ".csv" extension, Binary otherwise.
PointFormat format_for_path(const std::filesystem::path& path);

PointSet load_points(const std::filesystem::path& path, PointFormat format);
void write_points(const std::filesystem::path& path, const PointSet& points, PointFormat format);

std::vector<std::uint8_t> encode_points_binary(const PointSet& points);
PointSet decode_points_binary(std::span<const std::uint8_t> bytes);

/// Labels CSV (`id,label`), in file order.
struct LabelFile {
  std::vector<std::string> ids;
  LabelSet labels;
};

/// Soft-labels CSV (`id,p0,...,p{k-1}`), in file order.
struct SoftLabelFile {
  std::vector<std::string> ids;
  SoftLabelSet soft;
};

/// num_classes defaults to max(label) + 1 when not given.
LabelFile load_labels(const std::filesystem::path& path,
                      std::optional<std::uint32_t> num_classes = std::nullopt);
SoftLabelFile load_soft_labels(const std::filesystem::path& path);

void write_labels(const std::filesystem::path& path, std::span<const std::string> ids,
                  const LabelSet& labels);
void write_soft_labels(const std::filesystem::path& path, std::span<const std::string> ids,
                       const SoftLabelSet& soft);

/// Soft-label rows reordered to follow `labels` by id. Throws FormatError on
/// missing or duplicate ids, or fewer classes than the hard labels need.
SoftLabelSet align_soft_labels(const LabelFile& labels, const SoftLabelFile& soft);

/// Pairs point row i with label row i. Soft-label rows are matched to labels
/// by id, so the soft file may list examples in any order.
Dataset assemble(PointSet points, LabelFile labels, std::optional<SoftLabelFile> soft);

Dataset load_dataset(const std::filesystem::path& points_path,
                     const std::filesystem::path& labels_path,
                     const std::optional<std::filesystem::path>& soft_path);

/// Examples at the given indices, in the given order.
Dataset subset(const Dataset& d, std::span<const std::size_t> indices);

/// Index partition produced by split(); both lists ascending.
struct SplitIndices {
  std::vector<std::size_t> first;
  std::vector<std::size_t> second;
};

/// Fisher-Yates shuffle driven by xoshiro256** (SplitMix64-seeded); the first
/// floor(fraction * m) shuffled indices form the first part. Each part keeps
/// the original example order.
SplitIndices split_indices(std::size_t count, double fraction, std::uint64_t seed);

std::pair<Dataset, Dataset> split(const Dataset& d, double fraction, std::uint64_t seed);

}  // namespace lucon
