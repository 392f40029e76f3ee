#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wordlap/coverage.hpp"

namespace wordlap {

enum class ScoreDirection { higher_better, lower_better };

std::string to_string(ScoreDirection direction);
ScoreDirection score_direction_from_string(std::string_view text);

// One (corpus, benchmark) row: the overlap metrics plus an externally
// supplied benchmark score. Entropy/KL split and coverage are optional so
// rows built from published tables (score + cross-entropy only) remain
// representable.
struct OverlapRecord {
  std::string corpus_label;
  std::string benchmark_label;
  double cross_entropy_bits = 0.0;
  std::optional<double> eval_entropy_bits;
  std::optional<double> kl_bits;
  std::uint64_t eval_token_total = 0;
  std::optional<CoverageReport> coverage;
  std::optional<double> score;
  ScoreDirection score_direction = ScoreDirection::higher_better;
};

// Spearman rank correlation with average ranks for ties. Throws
// FormatError for mismatched lengths or n < 2, NumericError when either
// input has zero rank variance.
double spearman(const std::vector<double>& xs, const std::vector<double>& ys);

// Average ranks (1-based) with ties sharing the mean rank.
std::vector<double> average_ranks(const std::vector<double>& values);

struct RankInversionResult {
  bool inverted = false;
  bool ties = false;
  std::string diagnostic;
  std::vector<std::string> entropy_order;  // corpus labels, cross-entropy ascending
  std::vector<std::string> score_order;    // corpus labels, best score first
};

// True iff ordering corpora by ascending cross-entropy equals ordering by
// score best-first (direction-aware). Ties in either key yield false with
// a diagnostic instead of guessing. All records must carry a score, share
// one benchmark and one score direction.
RankInversionResult rank_inversion(const std::vector<OverlapRecord>& records);

struct CorrelationReport {
  std::string method = "spearman";
  std::optional<double> coefficient;  // null when n < 2 or rank-degenerate
  std::size_t n_points = 0;
  std::optional<RankInversionResult> inversion;  // null when scores are missing
  std::vector<double> entropy_ranks;  // aligned with the group rows
  std::vector<double> score_ranks;
  std::string note;  // why coefficient/inversion are null, tie details
};

struct BenchmarkGroup {
  std::string benchmark;
  std::vector<OverlapRecord> rows;
  CorrelationReport correlation;
};

struct ReportDocument {
  int version = 1;
  std::string config;  // flag echo for reproducibility
  std::vector<BenchmarkGroup> groups;
};

// Groups records by benchmark (first-appearance order) and attaches the
// correlation results per group.
ReportDocument build_report(const std::vector<OverlapRecord>& records);

// Scores file: TSV with header "benchmark<TAB>corpus<TAB>score<TAB>direction".
struct ScoreEntry {
  std::string benchmark;
  std::string corpus;
  double score = 0.0;
  ScoreDirection direction = ScoreDirection::higher_better;
};
std::vector<ScoreEntry> parse_scores_tsv(std::istream& in, std::string_view origin = "<stream>");
std::vector<ScoreEntry> read_scores_file(const std::filesystem::path& path);

// Returns how many records picked up a score.
std::size_t attach_scores(std::vector<OverlapRecord>& records,
                          const std::vector<ScoreEntry>& scores);

void to_json(nlohmann::json& j, const OverlapRecord& record);
void from_json(const nlohmann::json& j, OverlapRecord& record);
void to_json(nlohmann::json& j, const ReportDocument& report);
void from_json(const nlohmann::json& j, ReportDocument& report);

// Records file: {"version": 1, "config": ..., "records": [...]}.
nlohmann::json records_to_json(const std::vector<OverlapRecord>& records,
                               const std::string& config);
std::vector<OverlapRecord> records_from_json(const nlohmann::json& j);
std::vector<OverlapRecord> read_records_file(const std::filesystem::path& path);

// TSV rendering of a report, one row per record with group statistics.
std::string report_tsv(const ReportDocument& report);

// Two-column (cross-entropy, score) TSV per benchmark, entropy ascending.
std::string plot_data_tsv(const BenchmarkGroup& group);

}  // namespace wordlap
