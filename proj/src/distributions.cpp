#include "wordlap/distributions.hpp"

#include <cmath>

#include "wordlap/errors.hpp"

namespace wordlap {

EmpiricalDistribution EmpiricalDistribution::from_table(const WordFrequencyTable& table) {
  if (table.total_tokens() == 0) throw FormatError("empty table: no tokens to normalize");
  EmpiricalDistribution dist;
  const double total = static_cast<double>(table.total_tokens());
  for (const auto& [word, n] : table.canonical_entries()) {
    dist.entries_.emplace_back(std::string(word), static_cast<double>(n) / total);
  }
  KahanSum sum;
  for (const auto& [word, p] : dist.entries_) sum.add(p);
  if (std::abs(sum.value() - 1.0) > 1e-12) {
    throw NumericError("empirical distribution does not sum to 1 (residual " +
                       std::to_string(sum.value() - 1.0) + ")");
  }
  return dist;
}

double EmpiricalDistribution::prob(std::string_view word) const {
  for (const auto& [w, p] : entries_) {
    if (w == word) return p;
  }
  return 0.0;
}

SmoothedUnigram::SmoothedUnigram(const WordFrequencyTable& pre,
                                 const std::vector<std::string_view>& eval_vocab, double alpha)
    : pre_(pre), alpha_(alpha) {
  init(eval_vocab);
}

SmoothedUnigram::SmoothedUnigram(const WordFrequencyTable& pre,
                                 const WordFrequencyTable& eval_table, double alpha)
    : pre_(pre), alpha_(alpha) {
  std::vector<std::string_view> vocab;
  vocab.reserve(eval_table.vocab_size());
  for (const auto& [word, n] : eval_table.counts()) vocab.emplace_back(word);
  init(vocab);
}

void SmoothedUnigram::init(const std::vector<std::string_view>& eval_vocab) {
  if (pre_.total_tokens() == 0) throw FormatError("empty pre-training table");
  if (alpha_ <= 0.0) throw NumericError("smoothing alpha must be positive");
  for (const auto word : eval_vocab) {
    if (!pre_.contains(word)) unseen_.emplace(word);
  }
  union_vocab_size_ = pre_.vocab_size() + unseen_.size();
  denominator_ = static_cast<double>(pre_.total_tokens()) +
                 alpha_ * static_cast<double>(union_vocab_size_);
}

double SmoothedUnigram::prob(std::string_view word) const {
  const std::uint64_t n = pre_.count(word);
  if (n > 0) return (static_cast<double>(n) + alpha_) / denominator_;
  if (unseen_.find(word) != unseen_.end()) return alpha_ / denominator_;
  throw NumericError("word outside union vocabulary: '" + std::string(word) +
                     "' (smoothed model was built without this eval set's vocabulary)");
}

double entropy_bits(const EmpiricalDistribution& dist) {
  KahanSum sum;
  for (const auto& [word, p] : dist.entries()) sum.add(-p * std::log2(p));
  return sum.value();
}

double cross_entropy_bits(const EmpiricalDistribution& eval, const SmoothedUnigram& pre) {
  KahanSum sum;
  for (const auto& [word, p] : eval.entries()) sum.add(-p * std::log2(pre.prob(word)));
  return sum.value();
}

double kl_divergence_bits(const EmpiricalDistribution& eval, const SmoothedUnigram& pre) {
  KahanSum sum;
  for (const auto& [word, p] : eval.entries()) sum.add(p * std::log2(p / pre.prob(word)));
  return sum.value();
}

}  // namespace wordlap
