#include "wordlap/coverage.hpp"

#include <cmath>
#include <sstream>

#include "wordlap/errors.hpp"

namespace wordlap {

namespace {

// Mass thresholds are decimals like 0.80; comparing at micro precision in
// 128-bit integers keeps the boundary exact (4/5 >= 0.80 must include the
// boundary word, not the one after it).
std::uint64_t mass_micro(double mass) {
  return static_cast<std::uint64_t>(std::llround(mass * 1e6));
}

bool prefix_reaches_mass(std::uint64_t prefix_sum, std::uint64_t total, std::uint64_t micro) {
  using u128 = unsigned __int128;
  return static_cast<u128>(prefix_sum) * 1000000u >= static_cast<u128>(micro) * total;
}

// Number of canonical entries in the shortest prefix reaching `mass`.
std::size_t head_prefix_length(
    const std::vector<std::pair<std::string_view, std::uint64_t>>& entries, std::uint64_t total,
    double mass) {
  const std::uint64_t micro = mass_micro(mass);
  std::uint64_t prefix_sum = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    prefix_sum += entries[i].second;
    if (prefix_reaches_mass(prefix_sum, total, micro)) return i + 1;
  }
  return entries.size();
}

void validate_thresholds(const std::vector<double>& thresholds) {
  if (thresholds.empty()) throw FormatError("thresholds must be nonempty");
  double prev = 0.0;
  for (const double t : thresholds) {
    if (!(t > prev) || !(t < 1.0)) {
      throw FormatError("thresholds must be strictly increasing within (0, 1)");
    }
    prev = t;
  }
}

std::string fmt6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", x);
  return buf;
}

}  // namespace

std::unordered_set<std::string> head_set(const WordFrequencyTable& pre, double mass) {
  if (pre.total_tokens() == 0) throw FormatError("empty table");
  if (!(mass > 0.0) || !(mass <= 1.0)) throw FormatError("mass must be in (0, 1]");
  const auto entries = pre.canonical_entries();
  const std::size_t len = head_prefix_length(entries, pre.total_tokens(), mass);
  std::unordered_set<std::string> head;
  head.reserve(len);
  for (std::size_t i = 0; i < len; ++i) head.emplace(entries[i].first);
  return head;
}

CoverageReport coverage(const WordFrequencyTable& pre, const WordFrequencyTable& eval_table,
                        const std::vector<double>& thresholds) {
  if (pre.total_tokens() == 0) throw FormatError("empty pre-training table");
  if (eval_table.total_tokens() == 0) throw FormatError("empty eval set");
  validate_thresholds(thresholds);

  const auto entries = pre.canonical_entries();
  std::vector<std::size_t> cutoffs;
  cutoffs.reserve(thresholds.size());
  for (const double t : thresholds) {
    cutoffs.push_back(head_prefix_length(entries, pre.total_tokens(), t));
  }

  // Word -> canonical rank; classification is per token, so each word's
  // eval count lands in every bucket its rank qualifies for.
  std::unordered_map<std::string_view, std::size_t> rank;
  rank.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) rank.emplace(entries[i].first, i);

  CoverageReport report;
  report.thresholds = thresholds;
  report.head_counts.assign(thresholds.size(), 0);
  report.total_eval_tokens = eval_table.total_tokens();
  for (const auto& [word, n] : eval_table.counts()) {
    const auto it = rank.find(word);
    if (it == rank.end()) {
      report.unseen_count += n;
      continue;
    }
    report.seen_count += n;
    for (std::size_t i = 0; i < cutoffs.size(); ++i) {
      if (it->second < cutoffs[i]) report.head_counts[i] += n;
    }
  }
  return report;
}

CoverageReport coverage(const WordFrequencyTable& pre, const std::vector<std::string>& eval_tokens,
                        const std::vector<double>& thresholds) {
  WordFrequencyTable eval_table;
  for (const auto& token : eval_tokens) eval_table.add(token);
  return coverage(pre, eval_table, thresholds);
}

void to_json(nlohmann::json& j, const CoverageReport& report) {
  nlohmann::json heads = nlohmann::json::array();
  for (std::size_t i = 0; i < report.thresholds.size(); ++i) {
    heads.push_back({{"mass", report.thresholds[i]},
                     {"count", report.head_counts[i]},
                     {"fraction", report.head_fraction(i)}});
  }
  j = nlohmann::json{{"heads", heads},
                     {"tail", {{"count", report.tail_count()}, {"fraction", report.tail_fraction()}}},
                     {"seen", {{"count", report.seen_count}, {"fraction", report.seen_fraction()}}},
                     {"unseen",
                      {{"count", report.unseen_count}, {"fraction", report.unseen_fraction()}}},
                     {"total_eval_tokens", report.total_eval_tokens}};
}

void from_json(const nlohmann::json& j, CoverageReport& report) {
  report.thresholds.clear();
  report.head_counts.clear();
  for (const auto& head : j.at("heads")) {
    report.thresholds.push_back(head.at("mass").get<double>());
    report.head_counts.push_back(head.at("count").get<std::uint64_t>());
  }
  report.seen_count = j.at("seen").at("count").get<std::uint64_t>();
  report.unseen_count = j.at("unseen").at("count").get<std::uint64_t>();
  report.total_eval_tokens = j.at("total_eval_tokens").get<std::uint64_t>();
}

std::string coverage_tsv_header(const std::vector<double>& thresholds) {
  std::ostringstream out;
  out << "corpus\tbenchmark";
  for (const double t : thresholds) {
    out << "\thead_" << fmt6(t);
  }
  out << "\ttail\tseen\tunseen";
  for (const double t : thresholds) {
    out << "\thead_" << fmt6(t) << "_count";
  }
  out << "\ttail_count\tseen_count\tunseen_count\ttotal_eval_tokens";
  return std::move(out).str();
}

std::string coverage_tsv_row(const std::string& corpus, const std::string& benchmark,
                             const CoverageReport& report) {
  std::ostringstream out;
  out << corpus << '\t' << benchmark;
  for (std::size_t i = 0; i < report.thresholds.size(); ++i) {
    out << '\t' << fmt6(report.head_fraction(i));
  }
  out << '\t' << fmt6(report.tail_fraction()) << '\t' << fmt6(report.seen_fraction()) << '\t'
      << fmt6(report.unseen_fraction());
  for (const std::uint64_t n : report.head_counts) out << '\t' << n;
  out << '\t' << report.tail_count() << '\t' << report.seen_count << '\t' << report.unseen_count
      << '\t' << report.total_eval_tokens;
  return std::move(out).str();
}

}  // namespace wordlap
