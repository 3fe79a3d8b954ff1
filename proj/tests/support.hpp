#pragma once

// Shared fixtures for the test binaries: temporary directories and seeded
// random datasets.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "lucon/dataset.hpp"
#include "lucon/rng.hpp"

namespace lucon::testing {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("lucon_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream(p, std::ios::binary) << s;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline PointSet random_points(std::size_t m, std::size_t n, Xoshiro256& rng, int grid = 0) {
  std::vector<float> coords(m * n);
  for (auto& c : coords) {
    // A coarse grid forces distance ties and duplicate points.
    c = grid > 0 ? static_cast<float>(rng.below(static_cast<std::uint64_t>(grid))) /
                       static_cast<float>(grid)
                 : static_cast<float>(rng.uniform());
  }
  return PointSet(m, n, std::move(coords));
}

/// Random points, labels in [0, k) and noisy soft labels (about a third of
/// the rows put substantial mass on other classes).
inline Dataset random_dataset(std::size_t m, std::size_t n, std::uint32_t k, std::uint64_t seed,
                              int grid = 0) {
  Xoshiro256 rng(seed);
  Dataset d;
  d.points = random_points(m, n, rng, grid);
  d.labels.num_classes = k;
  std::vector<double> dist(m * k, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const auto label = static_cast<std::uint32_t>(rng.below(k));
    d.labels.labels.push_back(label);
    d.ids.push_back(std::to_string(i));
    double* row = dist.data() + i * k;
    if (rng.below(3) == 0) {
      double total = 0.0;
      for (std::uint32_t j = 0; j < k; ++j) total += row[j] = rng.uniform();
      for (std::uint32_t j = 0; j < k; ++j) row[j] /= total;
    } else {
      row[label] = 1.0;
    }
  }
  d.soft = SoftLabelSet(k, std::move(dist));
  return d;
}

}  // namespace lucon::testing
