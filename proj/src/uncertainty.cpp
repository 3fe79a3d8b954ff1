#include "lucon/uncertainty.hpp"

#include <algorithm>
#include <cmath>

#include "lucon/error.hpp"
#include "text_io.hpp"

namespace lucon {

double example_lu(std::span<const double> soft_row, std::uint32_t label) {
  if (label >= soft_row.size())
    throw DomainError("label " + std::to_string(label) + " >= k=" +
                      std::to_string(soft_row.size()));
  double other = 0.0;
  for (std::size_t j = 0; j < soft_row.size(); ++j)
    if (j != label) other = std::max(other, soft_row[j]);
  return std::clamp(1.0 - soft_row[label] + other, 0.0, 2.0);
}

std::vector<double> example_scores(const LabelSet& labels, const SoftLabelSet& soft) {
  if (soft.size() != labels.size()) throw FormatError("soft-label and label counts differ");
  std::vector<double> scores(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i)
    scores[i] = example_lu(soft.row(i), labels.labels[i]);
  return scores;
}

std::vector<double> example_scores(const Dataset& d) {
  if (!d.soft) throw ConfigError("label uncertainty requires soft labels");
  return example_scores(d.labels, *d.soft);
}

LuFixed to_fixed(double lu) noexcept { return std::llround(lu * kLuFixedScale); }

LuFixed fixed_threshold(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 2.0)) throw DomainError("gamma must lie in [0, 2]");
  return static_cast<LuFixed>(std::ceil(gamma * kLuFixedScale));
}

bool meets_threshold(LuFixed sum, std::size_t count, LuFixed threshold) noexcept {
  // For integer threshold t: sum >= t * count  <=>  floor(sum / count) >= t.
  if (count == 0) return threshold <= 0;
  return sum / static_cast<LuFixed>(count) >= threshold;
}

double fixed_mean(LuFixed sum, std::size_t count) noexcept {
  // floor quotient first: keeps mean() >= gamma whenever meets() holds.
  const auto c = static_cast<LuFixed>(count);
  const LuFixed q = sum / c;
  const LuFixed r = sum % c;
  return (static_cast<double>(q) + static_cast<double>(r) / static_cast<double>(c)) /
         kLuFixedScale;
}

double LuAccumulator::mean() const noexcept { return fixed_mean(sum, count); }

bool LuAccumulator::meets(LuFixed threshold) const noexcept {
  return meets_threshold(sum, count, threshold);
}

double region_lu(std::span<const LuFixed> scores, std::span<const std::size_t> members) {
  if (members.empty()) throw EmptyRegionError("region has no members");
  LuAccumulator acc;
  for (std::size_t i : members) acc.add(scores[i]);
  return acc.mean();
}

double region_lu(const Dataset& d, std::span<const std::size_t> members) {
  if (members.empty()) throw EmptyRegionError("region has no members");
  if (!d.soft) throw ConfigError("label uncertainty requires soft labels");
  LuAccumulator acc;
  for (std::size_t i : members) acc.add(to_fixed(example_lu(d.soft->row(i), d.labels.labels[i])));
  return acc.mean();
}

Histogram make_histogram(std::span<const double> scores, std::span<const double> bin_edges) {
  if (bin_edges.size() < 2) throw DomainError("histogram needs at least two edges");
  for (std::size_t i = 1; i < bin_edges.size(); ++i)
    if (!(bin_edges[i] > bin_edges[i - 1])) throw DomainError("bin edges must strictly ascend");
  if (bin_edges.front() > 0.0 || bin_edges.back() < 2.0)
    throw DomainError("bin edges must cover [0, 2]");
  Histogram h{{bin_edges.begin(), bin_edges.end()}, std::vector<std::size_t>(bin_edges.size() - 1)};
  for (double s : scores) {
    auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), s);
    auto bin = static_cast<std::size_t>(std::distance(bin_edges.begin(), it));
    bin = std::clamp<std::size_t>(bin, 1, h.counts.size()) - 1;
    ++h.counts[bin];
  }
  return h;
}

std::vector<double> default_bin_edges() {
  std::vector<double> edges;
  for (int i = 0; i <= 20; ++i) edges.push_back(i / 10.0);
  return edges;
}

LuStats lu_stats(const Dataset& d, std::span<const double> bin_edges) {
  return lu_stats(example_scores(d), bin_edges);
}

LuStats lu_stats(std::vector<double> scores, std::span<const double> bin_edges) {
  LuStats stats;
  stats.scores = std::move(scores);
  stats.histogram = make_histogram(stats.scores, bin_edges);
  LuAccumulator acc;
  for (double s : stats.scores) acc.add(to_fixed(s));
  stats.mean = acc.mean();
  return stats;
}

std::size_t count_below(std::span<const double> scores, double threshold) {
  return static_cast<std::size_t>(
      std::count_if(scores.begin(), scores.end(), [&](double s) { return s < threshold; }));
}

std::size_t count_above(std::span<const double> scores, double threshold) {
  return static_cast<std::size_t>(
      std::count_if(scores.begin(), scores.end(), [&](double s) { return s > threshold; }));
}

std::string format_lu_csv(std::span<const std::string> ids, std::span<const double> scores) {
  std::string out = "id,lu\n";
  for (std::size_t i = 0; i < ids.size(); ++i)
    out += ids[i] + ',' + detail::format_g(scores[i], 6) + '\n';
  return out;
}

void write_lu_csv(const std::filesystem::path& path, std::span<const std::string> ids,
                  std::span<const double> scores) {
  detail::write_file(path, format_lu_csv(ids, scores));
}

LuTable load_lu_csv(const std::filesystem::path& path) {
  const std::string text = detail::read_file(path);
  const auto lines = detail::split_lines(text);
  if (lines.empty() || detail::trim(lines[0]) != "id,lu")
    throw FormatError(path.string() + ": expected header 'id,lu'");
  LuTable table;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (lines[r].empty()) continue;
    const auto fields = detail::split_fields(lines[r]);
    const std::size_t row = table.ids.size();
    if (fields.size() != 2) throw FormatError(detail::where(path, row) + ": expected 2 fields");
    const double lu = detail::parse_double(fields[1], detail::where(path, row));
    if (!(lu >= 0.0 && lu <= 2.0))
      throw FormatError(detail::where(path, row) + ": lu outside [0, 2]");
    table.ids.emplace_back(detail::trim(fields[0]));
    table.scores.push_back(lu);
  }
  return table;
}

}  // namespace lucon
