#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "wordlap/freq_table.hpp"

namespace wordlap {

// Per-token classification of an eval set against a pre-training table:
// token counts inside each head set, in the seen tail past the last head,
// and unseen. Fractions are over eval tokens, not distinct words.
struct CoverageReport {
  std::vector<double> thresholds;             // strictly increasing mass fractions
  std::vector<std::uint64_t> head_counts;     // tokens whose word is in head(thresholds[i])
  std::uint64_t seen_count = 0;
  std::uint64_t unseen_count = 0;
  std::uint64_t total_eval_tokens = 0;

  // Seen tokens outside the last head set (the "95-100%" column).
  std::uint64_t tail_count() const { return seen_count - head_counts.back(); }
  double head_fraction(std::size_t i) const {
    return static_cast<double>(head_counts[i]) / static_cast<double>(total_eval_tokens);
  }
  double tail_fraction() const {
    return static_cast<double>(tail_count()) / static_cast<double>(total_eval_tokens);
  }
  double seen_fraction() const {
    return static_cast<double>(seen_count) / static_cast<double>(total_eval_tokens);
  }
  double unseen_fraction() const {
    return static_cast<double>(unseen_count) / static_cast<double>(total_eval_tokens);
  }
};

// The smallest set of the table's most frequent words whose cumulative
// empirical probability reaches `mass` (the boundary word is included).
// Order is canonical: count descending, byte-lexicographic tiebreak. The
// mass comparison is exact at micro precision (mass rounded to 1e-6), so
// prefixes that hit the threshold exactly are not pushed over by float
// rounding. Requires 0 < mass <= 1.
std::unordered_set<std::string> head_set(const WordFrequencyTable& pre, double mass);

// Classifies eval tokens by head-set membership. Thresholds must be
// strictly increasing within (0, 1).
CoverageReport coverage(const WordFrequencyTable& pre, const WordFrequencyTable& eval_table,
                        const std::vector<double>& thresholds = {0.80, 0.95});
CoverageReport coverage(const WordFrequencyTable& pre, const std::vector<std::string>& eval_tokens,
                        const std::vector<double>& thresholds = {0.80, 0.95});

void to_json(nlohmann::json& j, const CoverageReport& report);
void from_json(const nlohmann::json& j, CoverageReport& report);

// One TSV row per (corpus, benchmark), fraction and count columns per bucket.
std::string coverage_tsv_header(const std::vector<double>& thresholds);
std::string coverage_tsv_row(const std::string& corpus, const std::string& benchmark,
                             const CoverageReport& report);

}  // namespace wordlap
