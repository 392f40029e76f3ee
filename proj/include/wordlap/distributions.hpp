#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "wordlap/freq_table.hpp"

namespace wordlap {

// Compensated (Kahan) summation. Metric sums always run in the canonical
// table order so results are bit-stable run to run.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - compensation_;
    const double t = sum_ + y;
    compensation_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// Normalized word distribution of an eval set: prob(w) = count(w)/total.
// Never smoothed; entries are in canonical order.
class EmpiricalDistribution {
 public:
  static EmpiricalDistribution from_table(const WordFrequencyTable& table);

  const std::vector<std::pair<std::string, double>>& entries() const { return entries_; }
  std::size_t support_size() const { return entries_.size(); }
  double prob(std::string_view word) const;  // 0 when outside the support

 private:
  std::vector<std::pair<std::string, double>> entries_;
};

// Add-one-smoothed word distribution of a pre-training table over the
// union vocabulary vocab(pre) ∪ eval_vocab:
//   prob(w) = (count_pre(w) + alpha) / (total_pre + alpha * |union|).
// Built per (corpus, eval) pair because the union vocabulary differs per
// pair. Holds a reference to the base table, which must outlive the model.
class SmoothedUnigram {
 public:
  SmoothedUnigram(const WordFrequencyTable& pre, const std::vector<std::string_view>& eval_vocab,
                  double alpha = 1.0);
  SmoothedUnigram(const WordFrequencyTable& pre, const WordFrequencyTable& eval_table,
                  double alpha = 1.0);

  // Throws NumericError for words outside the union vocabulary.
  double prob(std::string_view word) const;

  std::uint64_t union_vocab_size() const { return union_vocab_size_; }
  double alpha() const { return alpha_; }
  double denominator() const { return denominator_; }

 private:
  void init(const std::vector<std::string_view>& eval_vocab);

  const WordFrequencyTable& pre_;
  double alpha_;
  std::uint64_t union_vocab_size_ = 0;
  double denominator_ = 0.0;
  // Eval words absent from the pre table; they carry probability alpha/denominator.
  std::unordered_set<std::string, TransparentStringHash, std::equal_to<>> unseen_;
};

// All three metrics are in bits per word (log base 2).
double entropy_bits(const EmpiricalDistribution& dist);
double cross_entropy_bits(const EmpiricalDistribution& eval, const SmoothedUnigram& pre);
double kl_divergence_bits(const EmpiricalDistribution& eval, const SmoothedUnigram& pre);

constexpr double kBitsToNats = 0.6931471805599453;  // ln 2

}  // namespace wordlap
