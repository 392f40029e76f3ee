#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wordlap {

// True for code points carrying the Unicode White_Space property.
bool is_unicode_whitespace(char32_t cp);

struct TokenizeOptions {
  // Split on ASCII whitespace only (sensitivity knob; NBSP etc. then stay
  // inside words).
  bool ascii_whitespace_only = false;
};

// Pulls whitespace-delimited words out of a byte string, one at a time.
// Words are maximal runs of non-whitespace characters; no case folding,
// no normalization. Invalid UTF-8 bytes are replaced with U+FFFD, one
// replacement per rejected byte, and counted.
//
// The returned views point into the input text, except for words that
// needed a replacement, which view a scratch buffer valid until the next
// call. The scanner does not own the text.
class TokenScanner {
 public:
  explicit TokenScanner(std::string_view text, TokenizeOptions opts = {})
      : text_(text), opts_(opts) {}

  std::optional<std::string_view> next();

  std::uint64_t replacements() const { return replacements_; }

 private:
  std::string_view text_;
  TokenizeOptions opts_;
  std::size_t pos_ = 0;
  std::uint64_t replacements_ = 0;
  std::string scratch_;
};

// Convenience wrapper over TokenScanner collecting all words. Empty input
// yields an empty vector.
std::vector<std::string> tokenize(std::string_view text, TokenizeOptions opts = {},
                                  std::uint64_t* replacements = nullptr);

}  // namespace wordlap
