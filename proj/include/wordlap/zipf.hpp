#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "wordlap/freq_table.hpp"
#include "wordlap/random.hpp"

namespace wordlap {

// Zipf word source over a synthetic vocabulary w1..wN with
// p(rank) ∝ 1/rank^exponent. Exact CDF plus bisection; fine for the
// vocabulary sizes used here.
class ZipfSampler {
 public:
  ZipfSampler(std::size_t vocab_size, double exponent) : cdf_(vocab_size) {
    double norm = 0.0;
    for (std::size_t i = 0; i < vocab_size; ++i) {
      norm += std::pow(static_cast<double>(i + 1), -exponent);
      cdf_[i] = norm;
    }
    for (double& c : cdf_) c /= norm;
  }

  std::size_t vocab_size() const { return cdf_.size(); }

  // Rank in [0, vocab_size).
  std::size_t draw(std::mt19937_64& eng) const {
    const double u = uniform01(eng);
    std::size_t lo = 0;
    std::size_t hi = cdf_.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cdf_[mid] > u) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    return lo;
  }

  static std::string word(std::size_t rank) { return "w" + std::to_string(rank + 1); }

  // Counts `n` draws straight into a frequency table (no per-token strings).
  void sample_into_table(WordFrequencyTable& table, std::size_t n, std::mt19937_64& eng) const {
    std::vector<std::uint64_t> counts(cdf_.size(), 0);
    for (std::size_t i = 0; i < n; ++i) ++counts[draw(eng)];
    for (std::size_t rank = 0; rank < counts.size(); ++rank) {
      if (counts[rank] > 0) table.add(word(rank), counts[rank]);
    }
  }

 private:
  std::vector<double> cdf_;
};

}  // namespace wordlap
