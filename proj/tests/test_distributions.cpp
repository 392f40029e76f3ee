#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "wordlap/distributions.hpp"
#include "wordlap/errors.hpp"
#include "wordlap/zipf.hpp"

using namespace wordlap;

namespace {

WordFrequencyTable table_of(std::initializer_list<std::pair<const char*, std::uint64_t>> items) {
  WordFrequencyTable table;
  for (const auto& [word, n] : items) table.add(word, n);
  return table;
}

}  // namespace

TEST_SUITE_BEGIN("distributions");

TEST_CASE("empirical distribution divides counts by the total") {
  const auto uniform = EmpiricalDistribution::from_table(table_of({{"a", 1}, {"b", 1}}));
  CHECK(uniform.prob("a") == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(uniform.prob("b") == doctest::Approx(0.5).epsilon(1e-15));

  const auto skewed = EmpiricalDistribution::from_table(table_of({{"a", 3}, {"b", 1}}));
  CHECK(skewed.prob("a") == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(skewed.prob("b") == doctest::Approx(0.25).epsilon(1e-15));

  CHECK_THROWS_AS(EmpiricalDistribution::from_table(WordFrequencyTable{}), FormatError);
}

TEST_CASE("empirical distribution matches per-word division on random tables") {
  std::mt19937 eng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const WordFrequencyTable table = oracles::random_table(eng, 40, 10);
    const auto dist = EmpiricalDistribution::from_table(table);
    for (const auto& [word, n] : table.counts()) {
      CHECK(dist.prob(word) ==
            static_cast<double>(n) / static_cast<double>(table.total_tokens()));
    }
  }
}

TEST_CASE("smoothed unigram hand examples") {
  {
    const WordFrequencyTable pre = table_of({{"a", 2}, {"b", 1}});
    const SmoothedUnigram smoothed(pre, std::vector<std::string_view>{"a", "b", "c"});
    CHECK(smoothed.union_vocab_size() == 3);
    CHECK(smoothed.prob("a") == doctest::Approx(3.0 / 6.0).epsilon(1e-15));
    CHECK(smoothed.prob("b") == doctest::Approx(2.0 / 6.0).epsilon(1e-15));
    CHECK(smoothed.prob("c") == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  }
  {
    const WordFrequencyTable pre = table_of({{"a", 1}});
    const SmoothedUnigram smoothed(pre, std::vector<std::string_view>{"a"});
    CHECK(smoothed.prob("a") == doctest::Approx(1.0).epsilon(1e-15));
  }
  {
    const WordFrequencyTable pre = table_of({{"a", 9}});
    const SmoothedUnigram smoothed(pre, std::vector<std::string_view>{"b"});
    CHECK(smoothed.prob("a") == doctest::Approx(10.0 / 11.0).epsilon(1e-15));
    CHECK(smoothed.prob("b") == doctest::Approx(1.0 / 11.0).epsilon(1e-15));
  }
  CHECK_THROWS_AS(SmoothedUnigram(WordFrequencyTable{}, std::vector<std::string_view>{"a"}), FormatError);
}

TEST_CASE("smoothed probabilities sum to one over the union vocabulary") {
  std::mt19937 eng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const WordFrequencyTable pre = oracles::random_table(eng, 60, 30);
    const WordFrequencyTable eval = oracles::random_table(eng, 60, 20);
    const SmoothedUnigram smoothed(pre, eval);
    KahanSum sum;
    std::set<std::string> union_vocab;
    for (const auto& [w, n] : pre.counts()) union_vocab.insert(w);
    for (const auto& [w, n] : eval.counts()) union_vocab.insert(w);
    CHECK(smoothed.union_vocab_size() == union_vocab.size());
    for (const auto& w : union_vocab) sum.add(smoothed.prob(w));
    CHECK(std::abs(sum.value() - 1.0) < 1e-12);
  }
}

TEST_CASE("words outside the union vocabulary are rejected") {
  const WordFrequencyTable pre = table_of({{"a", 2}});
  const SmoothedUnigram smoothed(pre, std::vector<std::string_view>{"b"});
  CHECK_THROWS_AS(smoothed.prob("zebra"), NumericError);
}

TEST_CASE("entropy hand values") {
  CHECK(entropy_bits(EmpiricalDistribution::from_table(
            table_of({{"a", 1}, {"b", 1}, {"c", 1}, {"d", 1}}))) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(entropy_bits(EmpiricalDistribution::from_table(table_of({{"only", 5}}))) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(entropy_bits(EmpiricalDistribution::from_table(table_of({{"a", 3}, {"b", 1}}))) ==
        doctest::Approx(0.811278).epsilon(1e-6));
}

TEST_CASE("entropy is bounded by log2 of the support size") {
  std::mt19937 eng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const WordFrequencyTable table = oracles::random_table(eng, 80, 50);
    const auto dist = EmpiricalDistribution::from_table(table);
    const double h = entropy_bits(dist);
    CHECK(h >= -1e-12);
    CHECK(h <= std::log2(static_cast<double>(dist.support_size())) + 1e-9);
  }
}

TEST_CASE("cross-entropy hand example: 'a a b' corpus vs 'a b c' eval") {
  WordFrequencyTable pre("pre");
  for (const char* w : {"a", "a", "b"}) pre.add(w);
  WordFrequencyTable eval("eval");
  for (const char* w : {"a", "b", "c"}) eval.add(w);

  const auto eval_dist = EmpiricalDistribution::from_table(eval);
  const SmoothedUnigram smoothed(pre, eval);
  const double ce = cross_entropy_bits(eval_dist, smoothed);
  const double expected = (1.0 + std::log2(3.0) + std::log2(6.0)) / 3.0;
  CHECK(ce == doctest::Approx(expected).epsilon(1e-12));
  CHECK(ce == doctest::Approx(1.723308).epsilon(1e-6));

  const double kl = kl_divergence_bits(eval_dist, smoothed);
  CHECK(kl == doctest::Approx(0.138346).epsilon(1e-5));
  CHECK(ce - entropy_bits(eval_dist) == doctest::Approx(kl).epsilon(1e-9));
}

TEST_CASE("uniform two-word table: smoothing preserves ratios, KL is zero") {
  const WordFrequencyTable pre = table_of({{"a", 1}, {"b", 1}});
  const auto dist = EmpiricalDistribution::from_table(pre);
  const SmoothedUnigram smoothed(pre, std::vector<std::string_view>{"a", "b"});
  CHECK(cross_entropy_bits(dist, smoothed) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(entropy_bits(dist) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(kl_divergence_bits(dist, smoothed) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("cross-entropy matches the naive double-loop oracle") {
  std::mt19937 eng(2024);
  for (int trial = 0; trial < 30; ++trial) {
    const WordFrequencyTable pre = oracles::random_table(eng, 80, 50);
    const WordFrequencyTable eval = oracles::random_table(eng, 80, 20);
    const auto eval_dist = EmpiricalDistribution::from_table(eval);
    const SmoothedUnigram smoothed(pre, eval);
    CHECK(cross_entropy_bits(eval_dist, smoothed) ==
          doctest::Approx(oracles::naive_cross_entropy_bits(eval, pre)).epsilon(1e-12));
  }
}

TEST_CASE("decomposition identity and Gibbs hold on random pairs") {
  std::mt19937 eng(5150);
  for (int trial = 0; trial < 100; ++trial) {
    const WordFrequencyTable pre = oracles::random_table(eng, 120, 60);
    const WordFrequencyTable eval = oracles::random_table(eng, 120, 40);
    const auto eval_dist = EmpiricalDistribution::from_table(eval);
    const SmoothedUnigram smoothed(pre, eval);
    const double ce = cross_entropy_bits(eval_dist, smoothed);
    const double h = entropy_bits(eval_dist);
    const double kl = kl_divergence_bits(eval_dist, smoothed);
    CHECK(std::abs(ce - (h + kl)) < 1e-9);
    CHECK(kl >= -1e-12);
  }
}

TEST_CASE("doubling a large corpus barely moves the smoothed cross-entropy") {
  const ZipfSampler zipf(20000, 1.1);
  std::mt19937_64 eng(77);
  WordFrequencyTable pre("zipf");
  zipf.sample_into_table(pre, 1000000, eng);
  WordFrequencyTable eval("eval");
  zipf.sample_into_table(eval, 50000, eng);

  const auto eval_dist = EmpiricalDistribution::from_table(eval);
  const double ce_once = cross_entropy_bits(eval_dist, SmoothedUnigram(pre, eval));
  const WordFrequencyTable doubled = WordFrequencyTable::merge(pre, pre);
  const double ce_twice = cross_entropy_bits(eval_dist, SmoothedUnigram(doubled, eval));
  CHECK(std::abs(ce_once - ce_twice) < 0.01);
}

TEST_CASE("disjoint halves of a synthetic corpus agree on cross-entropy") {
  const ZipfSampler zipf(20000, 1.1);
  std::mt19937_64 eng(4242);
  WordFrequencyTable half_a("half_a");
  zipf.sample_into_table(half_a, 500000, eng);
  WordFrequencyTable half_b("half_b");
  zipf.sample_into_table(half_b, 500000, eng);
  WordFrequencyTable eval("eval");
  std::mt19937_64 eval_eng(9);
  zipf.sample_into_table(eval, 50000, eval_eng);

  const auto eval_dist = EmpiricalDistribution::from_table(eval);
  const double ce_a = cross_entropy_bits(eval_dist, SmoothedUnigram(half_a, eval));
  const double ce_b = cross_entropy_bits(eval_dist, SmoothedUnigram(half_b, eval));
  CHECK(std::abs(ce_a - ce_b) < 0.05);
}

TEST_SUITE_END();
