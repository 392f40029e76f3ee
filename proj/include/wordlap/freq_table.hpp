#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace wordlap {

struct TransparentStringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
  std::size_t operator()(const std::string& s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

using CountMap =
    std::unordered_map<std::string, std::uint64_t, TransparentStringHash, std::equal_to<>>;

// Exact word -> occurrence count map for one corpus. Counts are 64-bit
// and additions are overflow-checked. Immutable once counting finishes;
// safe to share read-only across threads.
class WordFrequencyTable {
 public:
  WordFrequencyTable() = default;
  explicit WordFrequencyTable(std::string source_label) : label_(std::move(source_label)) {}

  void add(std::string_view word, std::uint64_t n = 1);

  // Pointwise sum of counts. Commutative and associative; totals add.
  void merge_in(const WordFrequencyTable& other);
  static WordFrequencyTable merge(const WordFrequencyTable& a, const WordFrequencyTable& b);

  std::uint64_t count(std::string_view word) const {
    auto it = counts_.find(word);
    return it == counts_.end() ? 0 : it->second;
  }
  bool contains(std::string_view word) const { return counts_.find(word) != counts_.end(); }

  const CountMap& counts() const { return counts_; }
  std::uint64_t total_tokens() const { return total_; }
  std::size_t vocab_size() const { return counts_.size(); }

  const std::string& source_label() const { return label_; }
  void set_source_label(std::string label) { label_ = std::move(label); }

  // Entries sorted by count descending, ties broken by byte-wise
  // lexicographic order ascending. Every serialization and every
  // compensated summation downstream iterates in this order, which is
  // what makes outputs byte-stable across runs and thread counts.
  std::vector<std::pair<std::string_view, std::uint64_t>> canonical_entries() const;

 private:
  CountMap counts_;
  std::uint64_t total_ = 0;
  std::string label_;
};

// Frequency-table artifact: line 1 "#total<TAB>total", line 2
// "#label<TAB>label", then one "word<TAB>count" line per word in
// canonical order. Two equal tables serialize to identical bytes.
std::string serialize_table(const WordFrequencyTable& table);
void write_table(const WordFrequencyTable& table, std::ostream& out);
void write_table_file(const WordFrequencyTable& table, const std::filesystem::path& path);
WordFrequencyTable parse_table(std::istream& in, std::string_view origin = "<stream>");
WordFrequencyTable read_table_file(const std::filesystem::path& path);

}  // namespace wordlap
