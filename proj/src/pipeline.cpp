#include "lucon/pipeline.hpp"

#include <cmath>
#include <limits>

#include "lucon/error.hpp"
#include "lucon/uncertainty.hpp"
#include "text_io.hpp"

namespace lucon {

RegionEvaluation evaluate_region(const Region& region, const Dataset& eval_set, double epsilon,
                                 int threads) {
  for (const auto& ball : region.balls)
    if (ball.center.size() != eval_set.dim())
      throw DimensionError("region dimension " + std::to_string(ball.center.size()) +
                           " does not match evaluation set dimension " +
                           std::to_string(eval_set.dim()));
  const auto inside = region_members(region, eval_set.points, threads);
  const auto expanded = expansion_members(region, eval_set.points, epsilon, threads);
  RegionEvaluation ev;
  ev.risk = empirical_measure(eval_set.size(), inside.size());
  ev.adv_risk = empirical_measure(eval_set.size(), expanded.size());
  if (eval_set.has_soft() && !inside.empty()) ev.region_lu = region_lu(eval_set, inside);
  return ev;
}

TrialReport run_trial(const Dataset& d, const SearchParams& params, std::uint64_t seed,
                      const RunOptions& options) {
  auto [train, test] = split(d, options.split_fraction, seed);
  SearchOptions search;
  search.threads = options.threads;
  search.mem_cap_bytes = options.mem_cap_bytes;
  if (options.on_step)
    search.on_step = [&](int t, const KBounds& kb, const Placement& p) {
      options.on_step(seed, t, kb, p);
    };

  SearchResult found;
  try {
    found = run_search(train, params, search);
  } catch (const InfeasibleError& e) {
    throw InfeasibleError("trial seed " + std::to_string(seed) + ": " + e.what(), e.iteration(),
                          e.balls_placed(), e.max_lu());
  }

  const auto on_train = evaluate_region(found.region, train, params.epsilon, options.threads);
  const auto on_test = evaluate_region(found.region, test, params.epsilon, options.threads);

  TrialReport r;
  r.seed = seed;
  r.train_risk = on_train.risk;
  r.test_risk = on_test.risk;
  r.train_adv_risk = on_train.adv_risk;
  r.test_adv_risk = on_test.adv_risk;
  r.intrinsic_robustness_train = 1.0 - on_train.adv_risk;
  r.intrinsic_robustness_test = 1.0 - on_test.adv_risk;
  r.train_region_lu = on_train.region_lu;
  r.test_region_lu = on_test.region_lu;
  r.region = std::move(found.region);
  r.placements = std::move(found.placements);
  return r;
}

Statistic summarize(std::span<const double> values) {
  Statistic s;
  s.count = values.size();
  if (values.empty()) {
    s.mean = s.std = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

const std::vector<std::string>& summary_fields() {
  static const std::vector<std::string> fields = {
      "train_risk",      "test_risk",      "train_adv_risk",
      "test_adv_risk",   "intrinsic_robustness_train",
      "intrinsic_robustness_test", "train_region_lu", "test_region_lu",
  };
  return fields;
}

std::optional<double> field_value(const TrialReport& t, const std::string& field) {
  if (field == "train_risk") return t.train_risk;
  if (field == "test_risk") return t.test_risk;
  if (field == "train_adv_risk") return t.train_adv_risk;
  if (field == "test_adv_risk") return t.test_adv_risk;
  if (field == "intrinsic_robustness_train") return t.intrinsic_robustness_train;
  if (field == "intrinsic_robustness_test") return t.intrinsic_robustness_test;
  if (field == "train_region_lu") return t.train_region_lu;
  if (field == "test_region_lu") return t.test_region_lu;
  throw DomainError("unknown report field '" + field + "'");
}

namespace {

void fill_summary(SummaryReport& report) {
  report.summary.clear();
  for (const auto& field : summary_fields()) {
    std::vector<double> values;
    for (const auto& t : report.trial_reports)
      if (auto v = field_value(t, field)) values.push_back(*v);
    report.summary.emplace_back(field, summarize(values));
  }
}

}  // namespace

SummaryReport repeated_trials(const Dataset& d, const SearchParams& params, std::size_t n_trials,
                              std::uint64_t base_seed, const RunOptions& options) {
  if (n_trials < 1) throw ConfigError("need at least one trial");
  SummaryReport report;
  report.params = params;
  report.trials = n_trials;
  report.base_seed = base_seed;
  for (std::size_t i = 0; i < n_trials; ++i)
    report.trial_reports.push_back(run_trial(d, params, base_seed + i, options));
  fill_summary(report);
  return report;
}

std::vector<SweepEntry> alpha_sweep(const Dataset& d, const SearchParams& params,
                                    std::span<const double> alphas, std::size_t n_trials,
                                    std::uint64_t base_seed, const RunOptions& options) {
  std::vector<SweepEntry> out;
  for (double alpha : alphas) {
    SweepEntry entry;
    entry.alpha = alpha;
    SearchParams p = params;
    p.alpha = alpha;
    try {
      entry.report = repeated_trials(d, p, n_trials, base_seed, options);
    } catch (const InfeasibleError& e) {
      entry.error = e.what();
    } catch (const ConfigError& e) {
      entry.error = e.what();
    }
    out.push_back(std::move(entry));
  }
  return out;
}

std::string format_sweep_csv(std::span<const SweepEntry> sweep, double gamma) {
  std::string out =
      "alpha,test_risk_mean,test_risk_std,intrinsic_robustness_mean,intrinsic_robustness_std,"
      "gamma\n";
  auto stat = [](const SummaryReport& r, const std::string& name) {
    for (const auto& [field, s] : r.summary)
      if (field == name) return s;
    return Statistic{};
  };
  for (const auto& e : sweep) {
    out += detail::format_g(e.alpha, 10);
    if (e.report) {
      const auto risk = stat(*e.report, "test_risk");
      const auto rob = stat(*e.report, "intrinsic_robustness_test");
      for (double v : {risk.mean, risk.std, rob.mean, rob.std}) out += ',' + detail::format_g(v, 10);
    } else {
      out += ",nan,nan,nan,nan";
    }
    out += ',' + detail::format_g(gamma, 10) + '\n';
  }
  return out;
}

}  // namespace lucon
