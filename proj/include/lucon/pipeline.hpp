#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lucon/dataset.hpp"
#include "lucon/geometry.hpp"
#include "lucon/search.hpp"

namespace lucon {

struct RegionEvaluation {
  double risk = 0.0;      ///< fraction of points in the region
  double adv_risk = 0.0;  ///< fraction of points in its epsilon-expansion
  std::optional<double> region_lu;  ///< absent without soft labels or members
};

RegionEvaluation evaluate_region(const Region& region, const Dataset& eval_set, double epsilon,
                                 int threads = 1);

struct TrialReport {
  std::uint64_t seed = 0;
  double train_risk = 0.0;
  double test_risk = 0.0;
  double train_adv_risk = 0.0;
  double test_adv_risk = 0.0;
  double intrinsic_robustness_train = 0.0;
  double intrinsic_robustness_test = 0.0;
  std::optional<double> train_region_lu;
  std::optional<double> test_region_lu;
  Region region;
  std::vector<Placement> placements;
};

struct RunOptions {
  int threads = 1;
  std::size_t mem_cap_bytes = std::size_t{128} << 20;
  double split_fraction = 0.5;
  /// Called after every greedy step: (trial seed, iteration, bounds, placement).
  std::function<void(std::uint64_t, int, const KBounds&, const Placement&)> on_step;
};

/// Split with `seed`, search on the first part, evaluate on both parts.
/// InfeasibleError is rethrown with the seed in its message.
TrialReport run_trial(const Dataset& d, const SearchParams& params, std::uint64_t seed,
                      const RunOptions& options = {});

struct Statistic {
  double mean = 0.0;
  double std = 0.0;  ///< sample (n - 1) standard deviation; 0 when n == 1
  std::size_t count = 0;
};

/// Mean and sample standard deviation; NaNs for an empty list.
Statistic summarize(std::span<const double> values);

struct SummaryReport {
  SearchParams params;
  std::size_t trials = 0;
  std::uint64_t base_seed = 0;
  std::vector<TrialReport> trial_reports;
  /// Keyed by scalar field name, in a fixed order (see summary_fields()).
  std::vector<std::pair<std::string, Statistic>> summary;
};

/// Scalar trial fields summarized in reports, in output order.
const std::vector<std::string>& summary_fields();
/// Value of a summarized field for one trial (nullopt for absent LU).
std::optional<double> field_value(const TrialReport& trial, const std::string& field);

/// Trials use seeds base_seed, base_seed + 1, ...
SummaryReport repeated_trials(const Dataset& d, const SearchParams& params, std::size_t n_trials,
                              std::uint64_t base_seed, const RunOptions& options = {});

struct SweepEntry {
  double alpha = 0.0;
  std::optional<SummaryReport> report;  ///< absent when the alpha was infeasible
  std::string error;
};

/// One repeated_trials run per alpha. Infeasible alphas (and alphas too small
/// for T balls) are recorded in SweepEntry::error and the sweep continues.
std::vector<SweepEntry> alpha_sweep(const Dataset& d, const SearchParams& params,
                                    std::span<const double> alphas, std::size_t n_trials,
                                    std::uint64_t base_seed, const RunOptions& options = {});

/// `alpha,test_risk_mean,test_risk_std,intrinsic_robustness_mean,intrinsic_robustness_std,gamma`
std::string format_sweep_csv(std::span<const SweepEntry> sweep, double gamma);

}  // namespace lucon
