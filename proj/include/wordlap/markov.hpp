#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "wordlap/freq_table.hpp"

namespace wordlap {

// Analytically specified stationary order-k source. Contexts are the full
// alphabet^k grid, indexed with the most recent symbol least significant,
// so shifting a context is modular arithmetic and the last m symbols of a
// context are simply `ctx % alphabet^m`. Order 0 is an i.i.d. source with
// a single empty context. Immutable after construction.
class MarkovChainSpec {
 public:
  MarkovChainSpec(std::vector<std::string> alphabet, int order,
                  std::vector<std::vector<double>> transitions, std::string label = {});

  static MarkovChainSpec iid(std::vector<std::string> alphabet, std::vector<double> marginal,
                             std::string label = {});

  const std::vector<std::string>& alphabet() const { return alphabet_; }
  std::size_t alphabet_size() const { return alphabet_.size(); }
  int order() const { return order_; }
  const std::string& label() const { return label_; }
  std::size_t num_contexts() const { return transitions_.size(); }
  const std::vector<double>& row(std::size_t context) const { return transitions_[context]; }

  // Context after observing `next`: drop the oldest symbol, append next.
  std::size_t shift_context(std::size_t context, std::size_t next) const;
  // Symbol indices of a context, oldest first.
  std::vector<std::size_t> context_symbols(std::size_t context) const;

  nlohmann::json to_json() const;
  static MarkovChainSpec from_json(const nlohmann::json& j);
  static MarkovChainSpec load(const std::filesystem::path& path);

 private:
  std::vector<std::string> alphabet_;
  int order_;
  std::vector<std::vector<double>> transitions_;  // [context][symbol]
  std::string label_;
};

// Stationary distribution over contexts by power iteration, restricted to
// the single closed communicating class (transient contexts carry zero
// mass). Throws NumericError when the chain is reducible or the iteration
// fails to converge (periodic chains), reporting the final residual.
std::vector<double> stationary_distribution(const MarkovChainSpec& spec, double tol = 1e-12,
                                            std::size_t max_iterations = 1000000);

// Per-token rates in bits.
double entropy_rate_bits(const MarkovChainSpec& spec);

// Conditionals of the source given only the last m symbols, computed from
// the stationary law (marginalizing the dropped context symbols). For
// m >= order the conditionals are unchanged: the spec is returned as-is
// (m == order) or grid-extended.
MarkovChainSpec markov_truncate(const MarkovChainSpec& spec, int m);

// Same source expressed over the order-k context grid, k >= spec.order().
MarkovChainSpec extend_to_order(const MarkovChainSpec& spec, int k);

// KL rate between two sources over the same alphabet, evaluated under b's
// stationary context law; specs of different orders are aligned by
// extension. Throws NumericError when a has zero mass where b does not.
double kl_rate_bits(const MarkovChainSpec& b, const MarkovChainSpec& a);

// Cross-entropy rate of b under `model`'s conditionals (same alignment
// and support rules as kl_rate_bits).
double cross_entropy_rate_bits(const MarkovChainSpec& b, const MarkovChainSpec& model);

struct NGramDecomposition {
  double entropy_rate = 0.0;       // H(B)
  double misspecification = 0.0;   // KL(B || truncate(B, n-1))
  double mismatch = 0.0;           // KL(truncate(B, n-1) || truncate(A, n-1))
  double total = 0.0;              // sum of the three
};

// Three-term decomposition of the cross-entropy rate of b under the
// order-(n-1) view of a. The misspecification term vanishes iff b is
// already order-(n-1) Markov.
NGramDecomposition ngram_decomposition(const MarkovChainSpec& b, const MarkovChainSpec& a, int n);

// Tokens drawn from the chain started at a context sampled from the
// stationary distribution. Deterministic for a given seed.
std::vector<std::string> sample_tokens(const MarkovChainSpec& spec, std::size_t length,
                                       std::uint64_t seed);

// Count-based n-gram model over an observed alphabet, Laplace-smoothed
// with `alpha`. Counts are kept for every context length 0..n-1 so the
// first positions of a stream can back off to the longest context
// available instead of inventing padding symbols.
class EmpiricalNGramModel {
 public:
  EmpiricalNGramModel(const std::vector<std::string>& tokens, int n, double alpha);

  int order() const { return n_; }
  double alpha() const { return alpha_; }
  const std::vector<std::string>& alphabet() const { return alphabet_; }

  // -1 when the symbol was never observed in training.
  int symbol_index(std::string_view symbol) const;

  // Conditional probability of `next` given a context of symbol indices
  // (length <= n-1; unknown context symbols are allowed and simply never
  // match a trained context). next must be a valid index.
  double prob(std::span<const int> context, int next) const;

  // Raw count lookup for tests.
  std::uint64_t context_total(std::span<const int> context) const;

 private:
  struct ContextCounts {
    std::unordered_map<std::int32_t, std::uint64_t> next_counts;
    std::uint64_t total = 0;
  };
  static std::string encode_context(std::span<const int> context);

  int n_;
  double alpha_;
  std::vector<std::string> alphabet_;  // observed symbols, sorted
  std::unordered_map<std::string, int, TransparentStringHash, std::equal_to<>> index_;
  // One table per context length 0..n-1.
  std::vector<std::unordered_map<std::string, ContextCounts, TransparentStringHash, std::equal_to<>>>
      tables_;
};

EmpiricalNGramModel estimate_ngram(const std::vector<std::string>& tokens, int n, double alpha);

// Per-token average of -log2 model(x_k | context) over the stream; the
// first n-1 positions use the longest context available.
double empirical_cross_entropy_bits(const std::vector<std::string>& eval_tokens,
                                    const EmpiricalNGramModel& model);

// Same average, but against an analytic source's truncated conditionals;
// used to check sampled streams against analytic totals.
double empirical_cross_entropy_bits(const std::vector<std::string>& eval_tokens,
                                    const MarkovChainSpec& model_spec, int n);

}  // namespace wordlap
