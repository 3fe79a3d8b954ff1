#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace lucon {

struct PredictionRecord {
  std::string id;
  bool clean_correct = false;
  bool robust_correct = false;
};

/// CSV `id,clean_correct,robust_correct` with 0/1 values. Throws FormatError
/// on malformed rows and UnknownIdError for ids outside `known_ids`.
std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path,
                                               std::span<const std::string> known_ids);

struct ScoredRecord {
  std::string id;
  bool clean_correct = false;
  bool robust_correct = false;
  double lu = 0.0;
};

/// Attaches the LU score of each record's id. Throws UnknownIdError when a
/// record has no score.
std::vector<ScoredRecord> join_scores(std::span<const PredictionRecord> records,
                                      std::span<const std::string> ids,
                                      std::span<const double> scores);

struct AbstainReport {
  double tau = 0.0;
  std::size_t total = 0;
  std::size_t abstained_count = 0;
  std::size_t retained_count = 0;
  std::size_t clean_correct_retained = 0;
  std::size_t robust_correct_retained = 0;
  std::size_t clean_correct_abstained = 0;
  std::size_t robust_correct_abstained = 0;
  double clean_accuracy_all = 0.0;
  double robust_accuracy_all = 0.0;
  double clean_accuracy_retained = 0.0;
  double robust_accuracy_retained = 0.0;
  double abstain_fraction = 0.0;
  double ceiling = 0.0;  ///< robust_accuracy_all / (1 - abstain_fraction)
};

/// robust_accuracy_all / (1 - abstain_fraction).
double abstention_ceiling(double robust_accuracy_all, double abstain_fraction);

/// Retains records with lu <= tau. Throws EmptyRetainedError if none remain.
AbstainReport abstain_at_threshold(std::span<const ScoredRecord> records, double tau);

enum class CoverageOrder { LowestFirst, HighestFirst };

struct CoveragePoint {
  double fraction = 0.0;
  std::size_t included = 0;  ///< floor(fraction * m)
  double lu_cut = 0.0;       ///< lu of the last included record (NaN if none)
  double clean_accuracy = 0.0;
  double robust_accuracy = 0.0;
};

/// Orders records by lu (ties by id ascending, numeric ids compared as
/// numbers) and keeps the first floor(f * m) for every grid fraction f in (0, 1].
std::vector<CoveragePoint> coverage_curve(std::span<const ScoredRecord> records,
                                          CoverageOrder order, std::span<const double> grid);

/// `fraction,lu_cut,clean_accuracy,robust_accuracy`
std::string format_curve_csv(std::span<const CoveragePoint> curve);

/// True when a sorts before b: numerically when both are decimal integers,
/// lexicographically otherwise.
bool id_less(const std::string& a, const std::string& b);

}  // namespace lucon
