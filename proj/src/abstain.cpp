#include "lucon/abstain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "lucon/error.hpp"
#include "text_io.hpp"

namespace lucon {

namespace {

bool parse_flag(std::string_view field, const std::string& context) {
  field = detail::trim(field);
  if (field == "0") return false;
  if (field == "1") return true;
  throw FormatError(context + ": expected 0 or 1, got '" + std::string(field) + "'");
}

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? std::numeric_limits<double>::quiet_NaN()
                  : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

bool id_less(const std::string& a, const std::string& b) {
  if (all_digits(a) && all_digits(b)) {
    const auto strip = [](const std::string& s) {
      const auto nz = s.find_first_not_of('0');
      return nz == std::string::npos ? std::string_view("0") : std::string_view(s).substr(nz);
    };
    const auto sa = strip(a);
    const auto sb = strip(b);
    if (sa.size() != sb.size()) return sa.size() < sb.size();
    if (sa != sb) return sa < sb;
  }
  return a < b;
}

std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path,
                                               std::span<const std::string> known_ids) {
  const std::string text = detail::read_file(path);
  const auto lines = detail::split_lines(text);
  if (lines.empty() || detail::trim(lines[0]) != "id,clean_correct,robust_correct")
    throw FormatError(path.string() + ": expected header 'id,clean_correct,robust_correct'");
  const std::unordered_set<std::string_view> known(known_ids.begin(), known_ids.end());
  std::unordered_set<std::string> seen;
  std::vector<PredictionRecord> out;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (lines[r].empty()) continue;
    const auto fields = detail::split_fields(lines[r]);
    const auto ctx = detail::where(path, out.size());
    if (fields.size() != 3) throw FormatError(ctx + ": expected 3 fields");
    PredictionRecord rec{std::string(detail::trim(fields[0])), parse_flag(fields[1], ctx),
                         parse_flag(fields[2], ctx)};
    if (!known.contains(rec.id)) throw UnknownIdError("unknown id '" + rec.id + "' in " + ctx);
    if (!seen.insert(rec.id).second) throw FormatError(ctx + ": duplicate id '" + rec.id + "'");
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<ScoredRecord> join_scores(std::span<const PredictionRecord> records,
                                      std::span<const std::string> ids,
                                      std::span<const double> scores) {
  std::unordered_map<std::string_view, double> lu_of;
  lu_of.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) lu_of.emplace(ids[i], scores[i]);
  std::vector<ScoredRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    auto it = lu_of.find(r.id);
    if (it == lu_of.end()) throw UnknownIdError("no label-uncertainty score for id '" + r.id + "'");
    out.push_back({r.id, r.clean_correct, r.robust_correct, it->second});
  }
  return out;
}

double abstention_ceiling(double robust_accuracy_all, double abstain_fraction) {
  if (!(abstain_fraction >= 0.0 && abstain_fraction < 1.0))
    throw DomainError("abstain fraction must lie in [0, 1)");
  return robust_accuracy_all / (1.0 - abstain_fraction);
}

AbstainReport abstain_at_threshold(std::span<const ScoredRecord> records, double tau) {
  AbstainReport rep;
  rep.tau = tau;
  rep.total = records.size();
  std::size_t clean_all = 0;
  std::size_t robust_all = 0;
  for (const auto& r : records) {
    clean_all += r.clean_correct;
    robust_all += r.robust_correct;
    if (r.lu <= tau) {
      ++rep.retained_count;
      rep.clean_correct_retained += r.clean_correct;
      rep.robust_correct_retained += r.robust_correct;
    } else {
      ++rep.abstained_count;
      rep.clean_correct_abstained += r.clean_correct;
      rep.robust_correct_abstained += r.robust_correct;
    }
  }
  if (rep.retained_count == 0)
    throw EmptyRetainedError("threshold " + std::to_string(tau) + " abstains on every example");
  rep.clean_accuracy_all = ratio(clean_all, rep.total);
  rep.robust_accuracy_all = ratio(robust_all, rep.total);
  rep.clean_accuracy_retained = ratio(rep.clean_correct_retained, rep.retained_count);
  rep.robust_accuracy_retained = ratio(rep.robust_correct_retained, rep.retained_count);
  rep.abstain_fraction = ratio(rep.abstained_count, rep.total);
  rep.ceiling = abstention_ceiling(rep.robust_accuracy_all, rep.abstain_fraction);
  return rep;
}

std::vector<CoveragePoint> coverage_curve(std::span<const ScoredRecord> records,
                                          CoverageOrder order, std::span<const double> grid) {
  std::vector<const ScoredRecord*> sorted;
  sorted.reserve(records.size());
  for (const auto& r : records) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [&](const ScoredRecord* a, const ScoredRecord* b) {
    if (a->lu != b->lu) return order == CoverageOrder::LowestFirst ? a->lu < b->lu : a->lu > b->lu;
    return id_less(a->id, b->id);
  });
  std::vector<std::size_t> clean_prefix(sorted.size() + 1, 0);
  std::vector<std::size_t> robust_prefix(sorted.size() + 1, 0);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    clean_prefix[i + 1] = clean_prefix[i] + sorted[i]->clean_correct;
    robust_prefix[i + 1] = robust_prefix[i] + sorted[i]->robust_correct;
  }

  std::vector<CoveragePoint> curve;
  for (double f : grid) {
    if (!(f > 0.0 && f <= 1.0)) throw DomainError("coverage fractions must lie in (0, 1]");
    CoveragePoint p;
    p.fraction = f;
    p.included = std::min(
        sorted.size(), static_cast<std::size_t>(std::floor(f * static_cast<double>(sorted.size()))));
    p.lu_cut = p.included ? sorted[p.included - 1]->lu : std::numeric_limits<double>::quiet_NaN();
    p.clean_accuracy = ratio(clean_prefix[p.included], p.included);
    p.robust_accuracy = ratio(robust_prefix[p.included], p.included);
    curve.push_back(p);
  }
  return curve;
}

std::string format_curve_csv(std::span<const CoveragePoint> curve) {
  std::string out = "fraction,lu_cut,clean_accuracy,robust_accuracy\n";
  for (const auto& p : curve)
    out += detail::format_g(p.fraction, 10) + ',' + detail::format_g(p.lu_cut, 6) + ',' +
           detail::format_g(p.clean_accuracy, 10) + ',' + detail::format_g(p.robust_accuracy, 10) +
           '\n';
  return out;
}

}  // namespace lucon
