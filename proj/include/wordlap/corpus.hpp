#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wordlap/freq_table.hpp"
#include "wordlap/tokenize.hpp"

namespace wordlap {

enum class CorpusFormat { plain_lines, jsonl };

// One input file. plain_lines treats each line as a document; jsonl
// expects one JSON object per line carrying the document text under
// `text_field`. Gzip-compressed files are detected by magic bytes.
struct CorpusSource {
  std::filesystem::path path;
  CorpusFormat format = CorpusFormat::plain_lines;
  std::string text_field = "text";
};

struct CountOptions {
  int threads = 1;
  // Skip malformed JSONL lines (counted in stats) instead of aborting.
  bool lenient = false;
  TokenizeOptions tokenize;
  // source_label of the result; defaults to the first input's filename stem.
  std::string label;
  // Lines longer than this are a format error, bounding memory on
  // corrupt inputs.
  std::size_t max_line_bytes = 32ull << 20;
};

struct CountStats {
  std::uint64_t documents = 0;
  std::uint64_t skipped_lines = 0;
  std::uint64_t utf8_replacements = 0;
};

struct CountResult {
  WordFrequencyTable table;
  CountStats stats;
};

// Counts every word occurrence across all documents. Sharding is
// line-aligned and merged with integer addition, so the result is
// independent of the thread count. Throws IoError for unreadable inputs
// and FormatError (with file:line) for malformed JSONL or oversized
// lines unless opts.lenient is set.
CountResult count_corpus(const CorpusSource& source, const CountOptions& opts = {});

// Multi-file variant; tables merge, stats add.
CountResult count_corpora(const std::vector<CorpusSource>& sources, const CountOptions& opts = {});

// All words of a plain-lines (optionally gzipped) file, in order.
std::vector<std::string> read_token_stream(const std::filesystem::path& path,
                                           const TokenizeOptions& opts = {});

}  // namespace wordlap
