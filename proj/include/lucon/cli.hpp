#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lucon/report.hpp"
#include "lucon/search.hpp"

namespace lucon::cli {

/// Process exit codes. Error kinds map one-to-one onto codes 2..11.
enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kValidationFailed = 12,
};

/// Everything a subcommand needs. Execution resources (threads, memory cap)
/// are not echoed into reports, so reports do not depend on them.
struct RunConfig {
  std::string subcommand;
  std::string points;
  std::string labels;
  std::string softlabels;
  std::string lu;
  std::string predictions;
  std::string out = "-";
  std::string per_example;
  std::string curve;
  std::string metric = "l2";
  std::string epsilon_text = "0";
  SearchParams params;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  double split = 0.5;
  std::vector<double> alphas;
  std::vector<double> bin_edges;
  double tau = 0.7;
  std::vector<double> grid;
  std::string order = "lowest";
  std::vector<double> theta = {1.0, 0.0};
  double sigma = 1.0;
  std::size_t mc_samples = 100000;
  std::size_t search_samples = 4000;
  std::size_t count = 1000;
  std::string soft_mode = "onehot";
  std::string out_prefix;
  int threads = 1;
  std::size_t mem_cap_mb = 128;
  bool quiet = false;
};

/// Decimal literal or exact fraction "p/q" (numerator / denominator in binary64).
double parse_epsilon(std::string_view text);

/// Comma-separated decimals.
std::vector<double> parse_list(std::string_view text);

/// Echo of the result-relevant configuration for the given subcommand.
Json config_to_json(const RunConfig& config);

int cmd_estimate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_lu_stats(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_abstain(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_gauss_validate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_synth(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches. Library errors become an exit code plus a
/// one-line JSON object on `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lucon::cli
