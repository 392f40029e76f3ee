#include "wordlap/corpus.hpp"

#include <zlib.h>

#include <atomic>
#include <condition_variable>
#include <cstdio>
#include <cstring>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>

#include <nlohmann/json.hpp>

#include "wordlap/errors.hpp"

namespace wordlap {

namespace {

// Buffered line reader over a plain or gzip file (magic bytes 1f 8b).
// Lines are returned without the trailing newline; a trailing '\r' is
// stripped so CRLF corpora tokenize the same as LF ones.
class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path, std::size_t max_line_bytes)
      : path_(path.string()), max_line_bytes_(max_line_bytes) {
    file_ = std::fopen(path_.c_str(), "rb");
    if (file_ == nullptr) throw IoError("cannot open: " + path_);
    unsigned char magic[2] = {0, 0};
    const std::size_t got = std::fread(magic, 1, 2, file_);
    gzip_ = got == 2 && magic[0] == 0x1f && magic[1] == 0x8b;
    std::rewind(file_);
    if (gzip_) {
      std::memset(&strm_, 0, sizeof(strm_));
      // 15 + 16: zlib decodes the gzip wrapper.
      if (inflateInit2(&strm_, 15 + 16) != Z_OK) {
        std::fclose(file_);
        throw IoError("inflateInit failed: " + path_);
      }
      in_buf_.resize(1 << 18);
    }
    buf_.resize(1 << 20);
  }

  ~LineReader() {
    if (gzip_) inflateEnd(&strm_);
    if (file_ != nullptr) std::fclose(file_);
  }

  LineReader(const LineReader&) = delete;
  LineReader& operator=(const LineReader&) = delete;

  // False at end of input. The view is valid until the next call.
  bool next_line(std::string_view& line, std::uint64_t line_no) {
    carry_.clear();
    while (true) {
      if (pos_ < filled_) {
        const char* base = buf_.data();
        const char* nl = static_cast<const char*>(
            std::memchr(base + pos_, '\n', filled_ - pos_));
        if (nl != nullptr) {
          const std::size_t len = static_cast<std::size_t>(nl - (base + pos_));
          if (carry_.empty()) {
            line = trim_cr({base + pos_, len});
          } else {
            append_checked(carry_, {base + pos_, len}, line_no);
            line = trim_cr(carry_);
          }
          pos_ += len + 1;
          return true;
        }
        append_checked(carry_, {base + pos_, filled_ - pos_}, line_no);
        pos_ = filled_;
      }
      if (!refill()) {
        if (carry_.empty()) return false;
        line = trim_cr(carry_);  // last line without trailing newline
        return true;
      }
    }
  }

 private:
  static std::string_view trim_cr(std::string_view s) {
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    return s;
  }

  void append_checked(std::string& dst, std::string_view chunk, std::uint64_t line_no) {
    if (dst.size() + chunk.size() > max_line_bytes_) {
      throw FormatError(path_ + ":" + std::to_string(line_no) + ": line exceeds " +
                        std::to_string(max_line_bytes_) + " bytes");
    }
    dst.append(chunk);
  }

  bool refill() {
    pos_ = 0;
    filled_ = 0;
    if (!gzip_) {
      filled_ = std::fread(buf_.data(), 1, buf_.size(), file_);
      if (filled_ == 0 && std::ferror(file_)) throw IoError("read failed: " + path_);
      return filled_ > 0;
    }
    while (filled_ == 0) {
      if (strm_.avail_in == 0 && !in_eof_) {
        const std::size_t got = std::fread(in_buf_.data(), 1, in_buf_.size(), file_);
        if (got == 0 && std::ferror(file_)) throw IoError("read failed: " + path_);
        in_eof_ = got == 0;
        strm_.next_in = reinterpret_cast<unsigned char*>(in_buf_.data());
        strm_.avail_in = static_cast<unsigned>(got);
      }
      if (strm_.avail_in == 0 && in_eof_) {
        if (!stream_done_) throw FormatError(path_ + ": truncated gzip stream");
        return false;
      }
      strm_.next_out = reinterpret_cast<unsigned char*>(buf_.data());
      strm_.avail_out = static_cast<unsigned>(buf_.size());
      const int rc = inflate(&strm_, Z_NO_FLUSH);
      if (rc == Z_STREAM_END) {
        stream_done_ = true;
        // Concatenated gzip members are valid; keep going if bytes remain.
        if (strm_.avail_in > 0 || !in_eof_) {
          if (inflateReset(&strm_) != Z_OK) throw FormatError(path_ + ": inflateReset failed");
          stream_done_ = false;
        }
      } else if (rc != Z_OK) {
        throw FormatError(path_ + ": corrupt gzip stream (zlib rc " + std::to_string(rc) + ")");
      } else {
        stream_done_ = false;
      }
      filled_ = buf_.size() - strm_.avail_out;
    }
    return true;
  }

  std::string path_;
  std::size_t max_line_bytes_;
  std::FILE* file_ = nullptr;
  bool gzip_ = false;
  z_stream strm_{};
  std::vector<char> in_buf_;
  bool in_eof_ = false;
  bool stream_done_ = true;

  std::vector<char> buf_;
  std::size_t pos_ = 0;
  std::size_t filled_ = 0;
  std::string carry_;  // partial line spanning buffer refills
};

struct LineError {
  std::uint64_t line_no;
  std::string message;
};

struct ShardState {
  WordFrequencyTable table;
  CountStats stats;
  std::optional<LineError> first_error;
};

// A batch of whole lines plus the line number of the first one.
struct Block {
  std::string bytes;
  std::uint64_t first_line = 0;
  std::uint64_t lines = 0;
};

void count_document(std::string_view text, const CountOptions& opts, ShardState& shard) {
  TokenScanner scanner(text, opts.tokenize);
  while (auto word = scanner.next()) shard.table.add(*word);
  shard.stats.utf8_replacements += scanner.replacements();
  ++shard.stats.documents;
}

void process_line(const CorpusSource& source, const CountOptions& opts, std::string_view line,
                  std::uint64_t line_no, ShardState& shard) {
  if (source.format == CorpusFormat::plain_lines) {
    count_document(line, opts, shard);
    return;
  }
  const auto fail = [&](const std::string& why) {
    if (opts.lenient) {
      ++shard.stats.skipped_lines;
      return;
    }
    if (!shard.first_error || line_no < shard.first_error->line_no) {
      shard.first_error = LineError{line_no, source.path.string() + ":" +
                                                 std::to_string(line_no) + ": " + why};
    }
  };
  const nlohmann::json doc = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    fail("not a JSON object");
    return;
  }
  const auto it = doc.find(source.text_field);
  if (it == doc.end()) {
    fail("missing field '" + source.text_field + "'");
    return;
  }
  if (!it->is_string()) {
    fail("field '" + source.text_field + "' is not a string");
    return;
  }
  count_document(it->get_ref<const std::string&>(), opts, shard);
}

void process_block(const CorpusSource& source, const CountOptions& opts, const Block& block,
                   ShardState& shard) {
  std::string_view rest(block.bytes);
  std::uint64_t line_no = block.first_line;
  while (!rest.empty()) {
    const std::size_t nl = rest.find('\n');
    const std::string_view line =
        nl == std::string_view::npos ? rest : rest.substr(0, nl);
    process_line(source, opts, line, line_no, shard);
    if (nl == std::string_view::npos) break;
    rest.remove_prefix(nl + 1);
    ++line_no;
  }
}

// Bounded queue feeding worker shards; closed by the producer at EOF or
// on a strict-mode error.
class BlockQueue {
 public:
  explicit BlockQueue(std::size_t capacity) : capacity_(capacity) {}

  void push(Block&& block) {
    std::unique_lock lock(mu_);
    not_full_.wait(lock, [&] { return queue_.size() < capacity_ || closed_; });
    if (closed_) return;
    queue_.push_back(std::move(block));
    not_empty_.notify_one();
  }

  bool pop(Block& block) {
    std::unique_lock lock(mu_);
    not_empty_.wait(lock, [&] { return !queue_.empty() || closed_; });
    if (queue_.empty()) return false;
    block = std::move(queue_.front());
    queue_.pop_front();
    not_full_.notify_one();
    return true;
  }

  void close() {
    std::lock_guard lock(mu_);
    closed_ = true;
    not_empty_.notify_all();
    not_full_.notify_all();
  }

 private:
  std::mutex mu_;
  std::condition_variable not_empty_, not_full_;
  std::deque<Block> queue_;
  std::size_t capacity_;
  bool closed_ = false;
};

constexpr std::size_t kBlockBytes = 1 << 20;

CountResult count_single(const CorpusSource& source, const CountOptions& opts) {
  if (!std::filesystem::exists(source.path)) {
    throw IoError("no such file: " + source.path.string());
  }
  LineReader reader(source.path, opts.max_line_bytes);

  const int threads = std::max(1, opts.threads);
  if (threads == 1) {
    ShardState shard;
    std::string_view line;
    std::uint64_t line_no = 0;
    while (reader.next_line(line, line_no + 1)) {
      ++line_no;
      process_line(source, opts, line, line_no, shard);
      if (shard.first_error) throw FormatError(shard.first_error->message);
    }
    return CountResult{std::move(shard.table), shard.stats};
  }

  std::vector<ShardState> shards(static_cast<std::size_t>(threads));
  BlockQueue queue(static_cast<std::size_t>(threads) * 2);
  std::atomic<bool> stop{false};

  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(threads));
  for (int i = 0; i < threads; ++i) {
    workers.emplace_back([&, i] {
      Block block;
      while (queue.pop(block)) {
        process_block(source, opts, block, shards[static_cast<std::size_t>(i)]);
        if (shards[static_cast<std::size_t>(i)].first_error) stop.store(true);
      }
    });
  }

  std::exception_ptr reader_error;
  try {
    Block block;
    block.first_line = 1;
    std::string_view line;
    std::uint64_t line_no = 0;
    while (!stop.load(std::memory_order_relaxed) && reader.next_line(line, line_no + 1)) {
      ++line_no;
      block.bytes.append(line);
      block.bytes.push_back('\n');
      ++block.lines;
      if (block.bytes.size() >= kBlockBytes) {
        const std::uint64_t next_first = block.first_line + block.lines;
        queue.push(std::move(block));
        block = Block{};
        block.first_line = next_first;
      }
    }
    if (block.lines > 0) queue.push(std::move(block));
  } catch (...) {
    reader_error = std::current_exception();
  }
  queue.close();
  for (auto& worker : workers) worker.join();
  if (reader_error) std::rethrow_exception(reader_error);

  // Merge order never changes counts (integer addition); errors resolve
  // to the smallest line number so strict mode is deterministic.
  ShardState merged;
  std::optional<LineError> first_error;
  for (auto& shard : shards) {
    merged.table.merge_in(shard.table);
    merged.stats.documents += shard.stats.documents;
    merged.stats.skipped_lines += shard.stats.skipped_lines;
    merged.stats.utf8_replacements += shard.stats.utf8_replacements;
    if (shard.first_error && (!first_error || shard.first_error->line_no < first_error->line_no)) {
      first_error = shard.first_error;
    }
  }
  if (first_error) throw FormatError(first_error->message);
  return CountResult{std::move(merged.table), merged.stats};
}

}  // namespace

CountResult count_corpus(const CorpusSource& source, const CountOptions& opts) {
  CountResult result = count_single(source, opts);
  result.table.set_source_label(opts.label.empty() ? source.path.stem().string() : opts.label);
  return result;
}

std::vector<std::string> read_token_stream(const std::filesystem::path& path,
                                           const TokenizeOptions& opts) {
  if (!std::filesystem::exists(path)) throw IoError("no such file: " + path.string());
  LineReader reader(path, 32ull << 20);
  std::vector<std::string> tokens;
  std::string_view line;
  std::uint64_t line_no = 0;
  while (reader.next_line(line, line_no + 1)) {
    ++line_no;
    TokenScanner scanner(line, opts);
    while (auto word = scanner.next()) tokens.emplace_back(*word);
  }
  return tokens;
}

CountResult count_corpora(const std::vector<CorpusSource>& sources, const CountOptions& opts) {
  if (sources.empty()) throw FormatError("no input files");
  CountResult total;
  for (const auto& source : sources) {
    CountResult part = count_single(source, opts);
    total.table.merge_in(part.table);
    total.stats.documents += part.stats.documents;
    total.stats.skipped_lines += part.stats.skipped_lines;
    total.stats.utf8_replacements += part.stats.utf8_replacements;
  }
  total.table.set_source_label(opts.label.empty() ? sources.front().path.stem().string()
                                                  : opts.label);
  return total;
}

}  // namespace wordlap
