#include "lucon/report.hpp"

#include <cmath>

namespace lucon {

namespace {

Json optional_number(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json placement_to_json(const Placement& p) {
  return {{"center_index", p.center_index}, {"k", p.k},
          {"radius", p.radius},             {"objective", p.objective},
          {"init_count", p.init_count},     {"exp_count", p.exp_count},
          {"lu", p.lu()}};
}

Json trial_to_json(const TrialReport& t) {
  Json placements = Json::array();
  for (const auto& p : t.placements) placements.push_back(placement_to_json(p));
  return {{"seed", t.seed},
          {"train_risk", t.train_risk},
          {"test_risk", t.test_risk},
          {"train_adv_risk", t.train_adv_risk},
          {"test_adv_risk", t.test_adv_risk},
          {"intrinsic_robustness_train", t.intrinsic_robustness_train},
          {"intrinsic_robustness_test", t.intrinsic_robustness_test},
          {"train_region_lu", optional_number(t.train_region_lu)},
          {"test_region_lu", optional_number(t.test_region_lu)},
          {"region", region_to_json(t.region)},
          {"placements", std::move(placements)}};
}

Json statistic_to_json(const Statistic& s) {
  return {{"mean", number(s.mean)}, {"std", number(s.std)}, {"n", s.count}};
}

Json summary_to_json(const SummaryReport& report, const Json& config) {
  Json trials = Json::array();
  for (const auto& t : report.trial_reports) trials.push_back(trial_to_json(t));
  Json summary = Json::object();
  for (const auto& [field, stat] : report.summary) summary[field] = statistic_to_json(stat);
  const auto& p = report.params;
  return {{"format_version", kReportFormat},
          {"config", config},
          {"params",
           {{"metric", to_string(p.metric)},
            {"epsilon", p.epsilon},
            {"alpha", p.alpha},
            {"gamma", p.gamma},
            {"T", p.balls},
            {"trials", report.trials},
            {"base_seed", report.base_seed}}},
          {"trials", std::move(trials)},
          {"summary", std::move(summary)}};
}

Json abstain_to_json(const AbstainReport& r) {
  return {{"tau", r.tau},
          {"total", r.total},
          {"abstained_count", r.abstained_count},
          {"retained_count", r.retained_count},
          {"abstain_fraction", r.abstain_fraction},
          {"clean_accuracy_all", number(r.clean_accuracy_all)},
          {"robust_accuracy_all", number(r.robust_accuracy_all)},
          {"clean_accuracy_retained", number(r.clean_accuracy_retained)},
          {"robust_accuracy_retained", number(r.robust_accuracy_retained)},
          {"ceiling", number(r.ceiling)},
          {"clean_correct_retained", r.clean_correct_retained},
          {"robust_correct_retained", r.robust_correct_retained},
          {"clean_correct_abstained", r.clean_correct_abstained},
          {"robust_correct_abstained", r.robust_correct_abstained}};
}

Json histogram_to_json(const Histogram& h) {
  return {{"bin_edges", h.bin_edges}, {"counts", h.counts}};
}

std::string dump(const Json& j) { return j.dump(2) + '\n'; }

}  // namespace lucon
