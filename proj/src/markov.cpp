#include "wordlap/markov.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "wordlap/distributions.hpp"
#include "wordlap/errors.hpp"
#include "wordlap/random.hpp"
#include "wordlap/tokenize.hpp"

namespace wordlap {

namespace {

constexpr std::size_t kMaxContexts = 1u << 22;

std::size_t checked_pow(std::size_t base, int exp) {
  std::size_t value = 1;
  for (int i = 0; i < exp; ++i) {
    if (value > kMaxContexts / base) {
      throw FormatError("context grid alphabet^order is too large");
    }
    value *= base;
  }
  return value;
}

bool symbol_has_whitespace(std::string_view symbol) {
  TokenScanner scanner(symbol);
  const auto first = scanner.next();
  return !first || *first != symbol || scanner.next().has_value();
}

// Strongly connected components (Kosaraju, explicit stacks) of the
// context digraph; used to find the closed communicating class.
std::vector<int> scc_components(const std::vector<std::vector<std::size_t>>& adj, int& count) {
  const std::size_t n = adj.size();
  std::vector<std::vector<std::size_t>> radj(n);
  for (std::size_t u = 0; u < n; ++u) {
    for (const std::size_t v : adj[u]) radj[v].push_back(u);
  }

  std::vector<char> visited(n, 0);
  std::vector<std::size_t> order;
  order.reserve(n);
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  for (std::size_t start = 0; start < n; ++start) {
    if (visited[start]) continue;
    stack.emplace_back(start, 0);
    visited[start] = 1;
    while (!stack.empty()) {
      auto& [u, idx] = stack.back();
      if (idx < adj[u].size()) {
        const std::size_t v = adj[u][idx++];
        if (!visited[v]) {
          visited[v] = 1;
          stack.emplace_back(v, 0);
        }
      } else {
        order.push_back(u);
        stack.pop_back();
      }
    }
  }

  std::vector<int> component(n, -1);
  count = 0;
  std::vector<std::size_t> dfs;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (component[*it] != -1) continue;
    dfs.push_back(*it);
    component[*it] = count;
    while (!dfs.empty()) {
      const std::size_t u = dfs.back();
      dfs.pop_back();
      for (const std::size_t v : radj[u]) {
        if (component[v] == -1) {
          component[v] = count;
          dfs.push_back(v);
        }
      }
    }
    ++count;
  }
  return component;
}

// Indices of the single closed communicating class. Throws when the
// recurrent structure is not unique (reducible chain).
std::vector<std::size_t> closed_class(const MarkovChainSpec& spec) {
  const std::size_t n = spec.num_contexts();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t s = 0; s < n; ++s) {
    const auto& row = spec.row(s);
    for (std::size_t t = 0; t < row.size(); ++t) {
      if (row[t] > 0.0) adj[s].push_back(spec.shift_context(s, t));
    }
  }
  int count = 0;
  const std::vector<int> component = scc_components(adj, count);
  std::vector<char> closed(static_cast<std::size_t>(count), 1);
  for (std::size_t u = 0; u < n; ++u) {
    for (const std::size_t v : adj[u]) {
      if (component[u] != component[v]) closed[static_cast<std::size_t>(component[u])] = 0;
    }
  }
  int closed_id = -1;
  int closed_total = 0;
  for (int c = 0; c < count; ++c) {
    if (closed[static_cast<std::size_t>(c)]) {
      closed_id = c;
      ++closed_total;
    }
  }
  if (closed_total != 1) {
    throw NumericError("reducible context chain: " + std::to_string(closed_total) +
                       " closed communicating classes");
  }
  std::vector<std::size_t> members;
  for (std::size_t s = 0; s < n; ++s) {
    if (component[s] == closed_id) members.push_back(s);
  }
  return members;
}

void check_same_alphabet(const MarkovChainSpec& b, const MarkovChainSpec& a) {
  if (b.alphabet() != a.alphabet()) {
    throw FormatError("chains must share the same ordered alphabet");
  }
}

enum class RateKind { kl, cross_entropy };

// Sum over b's stationary context law of either pb*log2(pb/pa) or
// -pb*log2(pa), with both chains aligned to the higher order.
double stationary_weighted_rate(const MarkovChainSpec& b, const MarkovChainSpec& a,
                                RateKind kind) {
  check_same_alphabet(b, a);
  const int k = std::max(b.order(), a.order());
  const MarkovChainSpec bx = extend_to_order(b, k);
  const MarkovChainSpec ax = extend_to_order(a, k);
  const std::vector<double> pi = stationary_distribution(bx);

  KahanSum sum;
  for (std::size_t s = 0; s < bx.num_contexts(); ++s) {
    if (pi[s] <= 0.0) continue;
    const auto& brow = bx.row(s);
    const auto& arow = ax.row(s);
    for (std::size_t t = 0; t < brow.size(); ++t) {
      const double pb = brow[t];
      if (pb <= 0.0) continue;
      const double pa = arow[t];
      if (pa <= 0.0) {
        throw NumericError("support violation: model assigns zero probability to an event "
                           "with positive source probability");
      }
      if (kind == RateKind::kl) {
        sum.add(pi[s] * pb * std::log2(pb / pa));
      } else {
        sum.add(-pi[s] * pb * std::log2(pa));
      }
    }
  }
  return sum.value();
}

}  // namespace

MarkovChainSpec::MarkovChainSpec(std::vector<std::string> alphabet, int order,
                                 std::vector<std::vector<double>> transitions, std::string label)
    : alphabet_(std::move(alphabet)),
      order_(order),
      transitions_(std::move(transitions)),
      label_(std::move(label)) {
  if (alphabet_.empty()) throw FormatError("alphabet must be nonempty");
  for (const auto& symbol : alphabet_) {
    if (symbol.empty() || symbol_has_whitespace(symbol)) {
      throw FormatError("alphabet symbols must be nonempty and whitespace-free");
    }
  }
  {
    auto sorted = alphabet_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw FormatError("alphabet symbols must be distinct");
    }
  }
  if (order_ < 0) throw FormatError("order must be >= 0");
  const std::size_t contexts = checked_pow(alphabet_.size(), order_);
  if (transitions_.size() != contexts) {
    throw FormatError("expected " + std::to_string(contexts) + " transition rows, got " +
                      std::to_string(transitions_.size()));
  }
  for (const auto& row : transitions_) {
    if (row.size() != alphabet_.size()) {
      throw FormatError("transition row size must equal the alphabet size");
    }
    KahanSum sum;
    for (const double p : row) {
      if (!(p >= 0.0)) throw FormatError("transition probabilities must be >= 0");
      sum.add(p);
    }
    if (std::abs(sum.value() - 1.0) > 1e-12) {
      throw FormatError("transition row sums to " + std::to_string(sum.value()) + ", expected 1");
    }
  }
}

MarkovChainSpec MarkovChainSpec::iid(std::vector<std::string> alphabet,
                                     std::vector<double> marginal, std::string label) {
  std::vector<std::vector<double>> transitions;
  transitions.push_back(std::move(marginal));
  return MarkovChainSpec(std::move(alphabet), 0, std::move(transitions), std::move(label));
}

std::size_t MarkovChainSpec::shift_context(std::size_t context, std::size_t next) const {
  if (order_ == 0) return 0;
  std::size_t stride = 1;
  for (int i = 0; i < order_ - 1; ++i) stride *= alphabet_.size();
  return (context % stride) * alphabet_.size() + next;
}

std::vector<std::size_t> MarkovChainSpec::context_symbols(std::size_t context) const {
  std::vector<std::size_t> symbols(static_cast<std::size_t>(order_));
  for (int i = order_ - 1; i >= 0; --i) {
    symbols[static_cast<std::size_t>(i)] = context % alphabet_.size();
    context /= alphabet_.size();
  }
  return symbols;
}

nlohmann::json MarkovChainSpec::to_json() const {
  nlohmann::json transitions = nlohmann::json::object();
  for (std::size_t s = 0; s < transitions_.size(); ++s) {
    std::string key;
    const auto symbols = context_symbols(s);
    for (std::size_t i = 0; i < symbols.size(); ++i) {
      if (i > 0) key += ' ';
      key += alphabet_[symbols[i]];
    }
    nlohmann::json row = nlohmann::json::object();
    for (std::size_t t = 0; t < alphabet_.size(); ++t) {
      if (transitions_[s][t] > 0.0) row[alphabet_[t]] = transitions_[s][t];
    }
    transitions[key] = std::move(row);
  }
  return nlohmann::json{
      {"label", label_}, {"alphabet", alphabet_}, {"order", order_}, {"transitions", transitions}};
}

MarkovChainSpec MarkovChainSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw FormatError("chain spec must be a JSON object");
  std::vector<std::string> alphabet = j.at("alphabet").get<std::vector<std::string>>();
  const int order = j.at("order").get<int>();
  const std::string label = j.value("label", std::string{});
  if (order < 0) throw FormatError("order must be >= 0");

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < alphabet.size(); ++i) index[alphabet[i]] = i;
  if (alphabet.empty()) throw FormatError("alphabet must be nonempty");
  const std::size_t contexts = checked_pow(alphabet.size(), order);

  std::vector<std::vector<double>> transitions(contexts,
                                               std::vector<double>(alphabet.size(), 0.0));
  std::vector<char> seen(contexts, 0);
  const auto& rows = j.at("transitions");
  if (!rows.is_object()) throw FormatError("transitions must be an object");
  for (const auto& [key, row] : rows.items()) {
    std::size_t context = 0;
    std::size_t symbols = 0;
    std::string_view rest = key;
    while (!rest.empty()) {
      const std::size_t space = rest.find(' ');
      const std::string_view symbol = space == std::string_view::npos ? rest : rest.substr(0, space);
      const auto it = index.find(std::string(symbol));
      if (it == index.end()) {
        throw FormatError("context '" + key + "' uses unknown symbol '" + std::string(symbol) +
                          "'");
      }
      context = context * alphabet.size() + it->second;
      ++symbols;
      if (space == std::string_view::npos) break;
      rest.remove_prefix(space + 1);
    }
    if (symbols != static_cast<std::size_t>(order)) {
      throw FormatError("context '" + key + "' has " + std::to_string(symbols) +
                        " symbols, expected " + std::to_string(order));
    }
    if (seen[context]) throw FormatError("duplicate context '" + key + "'");
    seen[context] = 1;
    if (!row.is_object()) throw FormatError("transition row must be an object");
    for (const auto& [symbol, p] : row.items()) {
      const auto it = index.find(symbol);
      if (it == index.end()) {
        throw FormatError("row for '" + key + "' uses unknown symbol '" + symbol + "'");
      }
      transitions[context][it->second] = p.get<double>();
    }
  }
  for (std::size_t s = 0; s < contexts; ++s) {
    if (!seen[s]) throw FormatError("missing transition row for a context (need the full grid)");
  }
  return MarkovChainSpec(std::move(alphabet), order, std::move(transitions), label);
}

MarkovChainSpec MarkovChainSpec::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  const nlohmann::json j = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw FormatError(path.string() + ": invalid JSON");
  return from_json(j);
}

std::vector<double> stationary_distribution(const MarkovChainSpec& spec, double tol,
                                            std::size_t max_iterations) {
  const std::size_t n = spec.num_contexts();
  const std::vector<std::size_t> members = closed_class(spec);

  std::vector<double> pi(n, 0.0);
  for (const std::size_t s : members) pi[s] = 1.0 / static_cast<double>(members.size());

  std::vector<double> next(n, 0.0);
  double residual = 0.0;
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    for (const std::size_t s : members) next[s] = 0.0;
    for (const std::size_t s : members) {
      const double mass = pi[s];
      if (mass == 0.0) continue;
      const auto& row = spec.row(s);
      for (std::size_t t = 0; t < row.size(); ++t) {
        if (row[t] > 0.0) next[spec.shift_context(s, t)] += mass * row[t];
      }
    }
    double total = 0.0;
    for (const std::size_t s : members) total += next[s];
    residual = 0.0;
    for (const std::size_t s : members) {
      next[s] /= total;
      residual += std::abs(next[s] - pi[s]);
      pi[s] = next[s];
    }
    if (residual < tol) return pi;
  }
  throw NumericError("stationary distribution did not converge (periodic chain?); residual " +
                     std::to_string(residual));
}

double entropy_rate_bits(const MarkovChainSpec& spec) {
  const std::vector<double> pi = stationary_distribution(spec);
  KahanSum sum;
  for (std::size_t s = 0; s < spec.num_contexts(); ++s) {
    if (pi[s] <= 0.0) continue;
    for (const double p : spec.row(s)) {
      if (p > 0.0) sum.add(-pi[s] * p * std::log2(p));
    }
  }
  return sum.value();
}

MarkovChainSpec extend_to_order(const MarkovChainSpec& spec, int k) {
  if (k < spec.order()) throw FormatError("extend_to_order requires k >= spec order");
  if (k == spec.order()) return spec;
  const std::size_t contexts = checked_pow(spec.alphabet_size(), k);
  std::size_t suffix_stride = 1;
  for (int i = 0; i < spec.order(); ++i) suffix_stride *= spec.alphabet_size();
  std::vector<std::vector<double>> transitions;
  transitions.reserve(contexts);
  for (std::size_t s = 0; s < contexts; ++s) {
    transitions.push_back(spec.row(s % suffix_stride));
  }
  return MarkovChainSpec(spec.alphabet(), k, std::move(transitions), spec.label());
}

MarkovChainSpec markov_truncate(const MarkovChainSpec& spec, int m) {
  if (m < 0) throw FormatError("truncation order must be >= 0");
  if (m >= spec.order()) return extend_to_order(spec, m);

  const std::vector<double> pi = stationary_distribution(spec);
  const std::size_t a = spec.alphabet_size();
  std::size_t m_contexts = 1;
  for (int i = 0; i < m; ++i) m_contexts *= a;

  // Stationary joint over (last m symbols, next symbol), then condition.
  std::vector<std::vector<double>> joint(m_contexts, std::vector<double>(a, 0.0));
  for (std::size_t s = 0; s < spec.num_contexts(); ++s) {
    if (pi[s] <= 0.0) continue;
    const std::size_t c = s % m_contexts;
    const auto& row = spec.row(s);
    for (std::size_t t = 0; t < a; ++t) joint[c][t] += pi[s] * row[t];
  }
  for (auto& row : joint) {
    const double total = std::accumulate(row.begin(), row.end(), 0.0);
    if (total > 0.0) {
      for (double& p : row) p /= total;
    } else {
      // Context never occurs under the stationary law; any valid row works
      // because the truncated chain cannot reach it either.
      for (double& p : row) p = 1.0 / static_cast<double>(a);
    }
  }
  return MarkovChainSpec(spec.alphabet(), m, std::move(joint),
                         spec.label().empty() ? "" : spec.label() + "~" + std::to_string(m));
}

double kl_rate_bits(const MarkovChainSpec& b, const MarkovChainSpec& a) {
  return stationary_weighted_rate(b, a, RateKind::kl);
}

double cross_entropy_rate_bits(const MarkovChainSpec& b, const MarkovChainSpec& model) {
  return stationary_weighted_rate(b, model, RateKind::cross_entropy);
}

NGramDecomposition ngram_decomposition(const MarkovChainSpec& b, const MarkovChainSpec& a,
                                       int n) {
  if (n < 1) throw FormatError("n must be >= 1");
  check_same_alphabet(b, a);
  const int m = n - 1;
  const MarkovChainSpec tb = markov_truncate(b, m);
  const MarkovChainSpec ta = markov_truncate(a, m);

  NGramDecomposition out;
  out.entropy_rate = entropy_rate_bits(b);
  out.misspecification = kl_rate_bits(b, tb);
  out.mismatch = kl_rate_bits(tb, ta);
  out.total = out.entropy_rate + out.misspecification + out.mismatch;
  return out;
}

std::vector<std::string> sample_tokens(const MarkovChainSpec& spec, std::size_t length,
                                       std::uint64_t seed) {
  std::vector<std::string> tokens;
  if (length == 0) return tokens;
  tokens.reserve(length);

  const std::vector<double> pi = stationary_distribution(spec);
  std::mt19937_64 eng(seed);

  auto pick = [](const std::vector<double>& weights, double u) {
    double cum = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      cum += weights[i];
      last_positive = i;
      if (u < cum) return i;
    }
    return last_positive;  // rounding left cum slightly below 1
  };

  std::size_t context = pick(pi, uniform01(eng));
  for (std::size_t i = 0; i < length; ++i) {
    const std::size_t symbol = pick(spec.row(context), uniform01(eng));
    tokens.push_back(spec.alphabet()[symbol]);
    context = spec.shift_context(context, symbol);
  }
  return tokens;
}

EmpiricalNGramModel::EmpiricalNGramModel(const std::vector<std::string>& tokens, int n,
                                         double alpha)
    : n_(n), alpha_(alpha) {
  if (n_ < 1) throw FormatError("n must be >= 1");
  if (alpha_ < 0.0) throw FormatError("alpha must be >= 0");
  if (tokens.size() < static_cast<std::size_t>(n_)) {
    throw FormatError("token sequence shorter than n");
  }

  alphabet_.assign(tokens.begin(), tokens.end());
  std::sort(alphabet_.begin(), alphabet_.end());
  alphabet_.erase(std::unique(alphabet_.begin(), alphabet_.end()), alphabet_.end());
  index_.reserve(alphabet_.size());
  for (std::size_t i = 0; i < alphabet_.size(); ++i) index_[alphabet_[i]] = static_cast<int>(i);

  std::vector<int> stream;
  stream.reserve(tokens.size());
  for (const auto& token : tokens) stream.push_back(index_.find(token)->second);

  tables_.resize(static_cast<std::size_t>(n_));
  std::vector<int> context;
  for (int c = 0; c < n_; ++c) {
    auto& table = tables_[static_cast<std::size_t>(c)];
    for (std::size_t k = static_cast<std::size_t>(c); k < stream.size(); ++k) {
      context.assign(stream.begin() + static_cast<std::ptrdiff_t>(k) - c,
                     stream.begin() + static_cast<std::ptrdiff_t>(k));
      const std::string key = encode_context(context);
      auto it = table.find(key);
      if (it == table.end()) it = table.emplace(key, ContextCounts{}).first;
      ++it->second.next_counts[stream[k]];
      ++it->second.total;
    }
  }
}

std::string EmpiricalNGramModel::encode_context(std::span<const int> context) {
  std::string key(context.size() * sizeof(std::int32_t), '\0');
  for (std::size_t i = 0; i < context.size(); ++i) {
    const auto v = static_cast<std::int32_t>(context[i]);
    std::memcpy(key.data() + i * sizeof(std::int32_t), &v, sizeof(v));
  }
  return key;
}

int EmpiricalNGramModel::symbol_index(std::string_view symbol) const {
  const auto it = index_.find(symbol);
  return it == index_.end() ? -1 : it->second;
}

double EmpiricalNGramModel::prob(std::span<const int> context, int next) const {
  if (context.size() >= static_cast<std::size_t>(n_)) {
    throw FormatError("context longer than n-1");
  }
  const auto& table = tables_[context.size()];
  const std::string key = encode_context(context);
  std::uint64_t count = 0;
  std::uint64_t total = 0;
  const auto it = table.find(key);
  if (it != table.end()) {
    total = it->second.total;
    const auto nit = it->second.next_counts.find(next);
    if (nit != it->second.next_counts.end()) count = nit->second;
  }
  const double denom =
      static_cast<double>(total) + alpha_ * static_cast<double>(alphabet_.size());
  if (denom <= 0.0) return 0.0;
  return (static_cast<double>(count) + alpha_) / denom;
}

std::uint64_t EmpiricalNGramModel::context_total(std::span<const int> context) const {
  const auto& table = tables_[context.size()];
  const auto it = table.find(encode_context(context));
  return it == table.end() ? 0 : it->second.total;
}

EmpiricalNGramModel estimate_ngram(const std::vector<std::string>& tokens, int n, double alpha) {
  return EmpiricalNGramModel(tokens, n, alpha);
}

double empirical_cross_entropy_bits(const std::vector<std::string>& eval_tokens,
                                    const EmpiricalNGramModel& model) {
  if (eval_tokens.empty()) throw FormatError("empty eval token sequence");
  std::vector<int> stream;
  stream.reserve(eval_tokens.size());
  for (const auto& token : eval_tokens) {
    const int idx = model.symbol_index(token);
    if (idx < 0) {
      throw NumericError("zero-probability event: symbol '" + token +
                         "' not in the model alphabet");
    }
    stream.push_back(idx);
  }

  const int m = model.order() - 1;
  KahanSum sum;
  for (std::size_t k = 0; k < stream.size(); ++k) {
    const std::size_t c = std::min<std::size_t>(k, static_cast<std::size_t>(m));
    const std::span<const int> context(stream.data() + k - c, c);
    const double p = model.prob(context, stream[k]);
    if (p <= 0.0) {
      throw NumericError("zero-probability event at position " + std::to_string(k) +
                         " (alpha = 0 and unseen window)");
    }
    sum.add(-std::log2(p));
  }
  return sum.value() / static_cast<double>(stream.size());
}

double empirical_cross_entropy_bits(const std::vector<std::string>& eval_tokens,
                                    const MarkovChainSpec& model_spec, int n) {
  if (n < 1) throw FormatError("n must be >= 1");
  if (eval_tokens.empty()) throw FormatError("empty eval token sequence");

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < model_spec.alphabet().size(); ++i) {
    index[model_spec.alphabet()[i]] = i;
  }
  std::vector<std::size_t> stream;
  stream.reserve(eval_tokens.size());
  for (const auto& token : eval_tokens) {
    const auto it = index.find(token);
    if (it == index.end()) {
      throw NumericError("symbol '" + token + "' not in the chain alphabet");
    }
    stream.push_back(it->second);
  }

  // Conditionals for every usable context length (short prefixes back off).
  const int m = n - 1;
  std::vector<MarkovChainSpec> views;
  views.reserve(static_cast<std::size_t>(m) + 1);
  for (int c = 0; c <= m; ++c) views.push_back(markov_truncate(model_spec, c));

  const std::size_t a = model_spec.alphabet_size();
  KahanSum sum;
  for (std::size_t k = 0; k < stream.size(); ++k) {
    const std::size_t c = std::min<std::size_t>(k, static_cast<std::size_t>(m));
    std::size_t context = 0;
    for (std::size_t i = k - c; i < k; ++i) context = context * a + stream[i];
    const double p = views[c].row(context)[stream[k]];
    if (p <= 0.0) {
      throw NumericError("support violation: zero model probability at position " +
                         std::to_string(k));
    }
    sum.add(-std::log2(p));
  }
  return sum.value() / static_cast<double>(stream.size());
}

}  // namespace wordlap
