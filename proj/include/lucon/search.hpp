#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "lucon/dataset.hpp"
#include "lucon/geometry.hpp"
#include "lucon/uncertainty.hpp"

namespace lucon {

struct SearchParams {
  double alpha = 0.05;   ///< target empirical measure, in (0, 1)
  double gamma = 0.0;    ///< label-uncertainty threshold, in [0, 2]
  double epsilon = 0.0;  ///< perturbation budget in coordinate units
  int balls = 1;         ///< T, number of balls to place
  Metric metric = Metric::L2;
};

/// Throws ConfigError / DomainError when params are out of range for a
/// training set of m_train examples, or gamma > 0 without soft labels.
void validate(const SearchParams& params, std::size_t m_train, bool has_soft_labels);

/// Smallest count c with c / m >= alpha in binary64, so a capture of c
/// examples always reports an empirical measure of at least alpha.
std::size_t target_count(double alpha, std::size_t m);

struct SearchState {
  std::vector<char> in_init;  ///< captured by a ball (S_init hat)
  std::vector<char> in_exp;   ///< captured by an expanded ball (S_exp hat)
  std::size_t init_count = 0;
  std::size_t exp_count = 0;
  LuAccumulator init_lu;
  std::vector<Ball> balls;
  int iteration = 1;  ///< 1-based index of the next step

  explicit SearchState(std::size_t m) : in_init(m, 0), in_exp(m, 0) {}

  std::vector<std::size_t> captured_init() const;
  std::vector<std::size_t> captured_exp() const;
};

struct KBounds {
  std::size_t lower = 0;
  std::size_t upper = 0;
  bool done() const noexcept { return upper == 0; }
};

/// lower = ceil(remaining / (T - t + 1)), upper = remaining, where
/// remaining = target - |captured_init|; (0, 0) once the target is reached.
KBounds k_bounds(const SearchState& state, const SearchParams& params, std::size_t m_train);

struct Placement {
  std::size_t center_index = 0;
  std::size_t k = 0;
  double radius = 0.0;
  std::int64_t objective = 0;  ///< |S_exp(u,k)| - |S_init(u,k)|
  std::size_t init_count = 0;
  std::size_t exp_count = 0;
  LuFixed lu_sum = 0;  ///< fixed-point LU sum over S_init(u,k)

  double lu() const noexcept { return fixed_mean(lu_sum, init_count); }

  friend bool operator==(const Placement&, const Placement&) = default;
};

/// Total order used to pick among feasible candidates:
/// (objective, center_index, k) ascending.
inline bool better(const Placement& a, const Placement& b) noexcept {
  if (a.objective != b.objective) return a.objective < b.objective;
  if (a.center_index != b.center_index) return a.center_index < b.center_index;
  return a.k < b.k;
}

/// Read-only inputs shared by every step of one search.
class SearchContext {
 public:
  SearchContext(const Dataset& train, const SearchParams& params, std::size_t mem_cap_bytes,
                int threads);

  const Dataset& train() const noexcept { return *train_; }
  const SearchParams& params() const noexcept { return params_; }
  const DistanceCache& cache() const noexcept { return cache_; }
  std::span<const LuFixed> lu() const noexcept { return lu_; }
  LuFixed threshold() const noexcept { return threshold_; }
  int threads() const noexcept { return threads_; }

 private:
  const Dataset* train_;
  SearchParams params_;
  std::vector<LuFixed> lu_;
  LuFixed threshold_;
  DistanceCache cache_;
  int threads_;
};

/// Best feasible (center, k) for the current state over every center and
/// k in k_bounds. Throws InfeasibleError when no candidate meets gamma.
Placement greedy_step(const SearchContext& ctx, const SearchState& state);

/// Same contract as greedy_step, computed by direct enumeration with a fresh
/// distance sort for every candidate. Intended for testing.
Placement reference_step(const Dataset& train, const SearchParams& params,
                         const SearchState& state);

/// Adds the placement's ball and captured sets to the state.
void apply_placement(SearchState& state, const Placement& placement, const Dataset& train,
                     const SearchParams& params);

struct SearchOptions {
  int threads = 1;
  std::size_t mem_cap_bytes = std::size_t{128} << 20;
  std::function<void(int iteration, const KBounds&, const Placement&)> on_step;
};

struct SearchResult {
  Region region;
  std::vector<Placement> placements;
  std::size_t captured = 0;  ///< |S_init hat|
  double captured_lu = 0.0;  ///< region LU of S_init hat (0 when gamma == 0 and no soft labels)
};

SearchResult run_search(const Dataset& train, const SearchParams& params,
                        const SearchOptions& options = {});

}  // namespace lucon
