#include "wordlap/freq_table.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "wordlap/errors.hpp"
#include "wordlap/tokenize.hpp"

namespace wordlap {

namespace {

void checked_add(std::uint64_t& target, std::uint64_t n, const char* what) {
  if (n > std::numeric_limits<std::uint64_t>::max() - target) {
    throw NumericError(std::string("64-bit overflow adding ") + what);
  }
  target += n;
}

bool contains_whitespace(std::string_view word) {
  TokenScanner scanner(word);
  auto first = scanner.next();
  // A single word tokenizes to itself; anything else had whitespace.
  return !first || *first != word || scanner.next().has_value();
}

std::uint64_t parse_u64(std::string_view text, std::string_view origin, std::size_t line_no,
                        const char* what) {
  std::uint64_t value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty()) {
    throw FormatError(std::string(origin) + ":" + std::to_string(line_no) + ": bad " + what +
                      " '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

void WordFrequencyTable::add(std::string_view word, std::uint64_t n) {
  if (n == 0) return;
  checked_add(total_, n, "total_tokens");
  auto it = counts_.find(word);
  if (it == counts_.end()) {
    counts_.emplace(std::string(word), n);
  } else {
    checked_add(it->second, n, "word count");
  }
}

void WordFrequencyTable::merge_in(const WordFrequencyTable& other) {
  for (const auto& [word, n] : other.counts_) add(word, n);
}

WordFrequencyTable WordFrequencyTable::merge(const WordFrequencyTable& a,
                                             const WordFrequencyTable& b) {
  WordFrequencyTable out(a.source_label());
  out.merge_in(a);
  out.merge_in(b);
  return out;
}

std::vector<std::pair<std::string_view, std::uint64_t>> WordFrequencyTable::canonical_entries()
    const {
  std::vector<std::pair<std::string_view, std::uint64_t>> entries;
  entries.reserve(counts_.size());
  for (const auto& [word, n] : counts_) entries.emplace_back(word, n);
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return entries;
}

std::string serialize_table(const WordFrequencyTable& table) {
  std::ostringstream out;
  write_table(table, out);
  return std::move(out).str();
}

void write_table(const WordFrequencyTable& table, std::ostream& out) {
  // Labels must keep the artifact line-parseable.
  std::string label = table.source_label();
  for (char& c : label) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  out << "#total\t" << table.total_tokens() << '\n';
  out << "#label\t" << label << '\n';
  for (const auto& [word, n] : table.canonical_entries()) {
    out << word << '\t' << n << '\n';
  }
}

void write_table_file(const WordFrequencyTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  write_table(table, out);
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

WordFrequencyTable parse_table(std::istream& in, std::string_view origin) {
  std::string line;
  std::size_t line_no = 0;

  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  if (!next_line() || line.rfind("#total\t", 0) != 0) {
    throw FormatError(std::string(origin) + ":1: expected '#total<TAB>...' header");
  }
  const std::uint64_t declared_total = parse_u64(std::string_view(line).substr(7), origin, line_no,
                                                 "total");
  if (!next_line() || line.rfind("#label\t", 0) != 0) {
    throw FormatError(std::string(origin) + ":2: expected '#label<TAB>...' header");
  }
  WordFrequencyTable table(line.substr(7));

  while (next_line()) {
    if (line.empty()) {
      throw FormatError(std::string(origin) + ":" + std::to_string(line_no) + ": empty line");
    }
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw FormatError(std::string(origin) + ":" + std::to_string(line_no) +
                        ": expected 'word<TAB>count'");
    }
    const std::string_view word = std::string_view(line).substr(0, tab);
    const std::uint64_t n = parse_u64(std::string_view(line).substr(tab + 1), origin, line_no,
                                      "count");
    if (word.empty() || contains_whitespace(word)) {
      throw FormatError(std::string(origin) + ":" + std::to_string(line_no) +
                        ": word is empty or contains whitespace");
    }
    if (n == 0) {
      throw FormatError(std::string(origin) + ":" + std::to_string(line_no) + ": zero count");
    }
    if (table.contains(word)) {
      throw FormatError(std::string(origin) + ":" + std::to_string(line_no) +
                        ": duplicate word '" + std::string(word) + "'");
    }
    table.add(word, n);
  }
  if (table.total_tokens() != declared_total) {
    throw FormatError(std::string(origin) + ": declared total " + std::to_string(declared_total) +
                      " != sum of counts " + std::to_string(table.total_tokens()));
  }
  return table;
}

WordFrequencyTable read_table_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  return parse_table(in, path.string());
}

}  // namespace wordlap
