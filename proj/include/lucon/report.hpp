#pragma once

#include <json.hpp>

#include "lucon/abstain.hpp"
#include "lucon/pipeline.hpp"
#include "lucon/uncertainty.hpp"

namespace lucon {

inline constexpr const char* kReportFormat = "lucon-report/1";

using Json = nlohmann::ordered_json;

Json placement_to_json(const Placement& p);
Json trial_to_json(const TrialReport& trial);
Json statistic_to_json(const Statistic& s);

/// `{format_version, config, params:{metric,epsilon,alpha,gamma,T,trials,base_seed},
///   trials:[...], summary:{field:{mean,std}}}`
Json summary_to_json(const SummaryReport& report, const Json& config);

Json abstain_to_json(const AbstainReport& report);
Json histogram_to_json(const Histogram& h);

/// Pretty-printed JSON followed by a newline.
std::string dump(const Json& j);

}  // namespace lucon
