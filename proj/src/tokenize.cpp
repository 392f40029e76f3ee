#include "wordlap/tokenize.hpp"

namespace wordlap {

namespace {

constexpr std::string_view kReplacementUtf8 = "\xEF\xBF\xBD";  // U+FFFD

inline bool is_ascii_whitespace(unsigned char b) {
  return b == ' ' || (b >= 0x09 && b <= 0x0D);
}

// Strict UTF-8 decode of one scalar value at p. Rejects overlong forms,
// surrogates, and values above U+10FFFF. On failure consumes exactly one
// byte and sets *invalid.
std::size_t decode_utf8(const char* p, const char* end, char32_t& cp, bool& invalid) {
  invalid = false;
  const auto b0 = static_cast<unsigned char>(*p);
  if (b0 < 0x80) {
    cp = b0;
    return 1;
  }
  std::size_t len;
  char32_t min_cp;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    min_cp = 0x80;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    min_cp = 0x800;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    min_cp = 0x10000;
    cp = b0 & 0x07;
  } else {
    invalid = true;
    return 1;
  }
  if (end - p < static_cast<std::ptrdiff_t>(len)) {
    invalid = true;
    return 1;
  }
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(p[i]);
    if ((b & 0xC0) != 0x80) {
      invalid = true;
      return 1;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min_cp || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    invalid = true;
    return 1;
  }
  return len;
}

}  // namespace

bool is_unicode_whitespace(char32_t cp) {
  // Unicode White_Space property.
  switch (cp) {
    case 0x0009:
    case 0x000A:
    case 0x000B:
    case 0x000C:
    case 0x000D:
    case 0x0020:
    case 0x0085:
    case 0x00A0:
    case 0x1680:
    case 0x2000:
    case 0x2001:
    case 0x2002:
    case 0x2003:
    case 0x2004:
    case 0x2005:
    case 0x2006:
    case 0x2007:
    case 0x2008:
    case 0x2009:
    case 0x200A:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return true;
    default:
      return false;
  }
}

std::optional<std::string_view> TokenScanner::next() {
  const char* data = text_.data();
  const char* end = data + text_.size();
  const bool ascii_only = opts_.ascii_whitespace_only;

  auto is_ws = [ascii_only](char32_t cp) {
    return ascii_only ? (cp < 0x80 && is_ascii_whitespace(static_cast<unsigned char>(cp)))
                      : is_unicode_whitespace(cp);
  };

  // Skip leading whitespace. An invalid byte is never whitespace: it
  // becomes the start of a word.
  while (pos_ < text_.size()) {
    char32_t cp;
    bool invalid;
    const std::size_t len = decode_utf8(data + pos_, end, cp, invalid);
    if (invalid || !is_ws(cp)) break;
    pos_ += len;
  }
  if (pos_ >= text_.size()) return std::nullopt;

  const std::size_t start = pos_;
  bool use_scratch = false;
  while (pos_ < text_.size()) {
    char32_t cp;
    bool invalid;
    const std::size_t len = decode_utf8(data + pos_, end, cp, invalid);
    if (!invalid && is_ws(cp)) break;
    if (invalid) {
      if (!use_scratch) {
        scratch_.assign(text_.substr(start, pos_ - start));
        use_scratch = true;
      }
      scratch_.append(kReplacementUtf8);
      ++replacements_;
    } else if (use_scratch) {
      scratch_.append(text_.substr(pos_, len));
    }
    pos_ += len;
  }
  if (use_scratch) return std::string_view(scratch_);
  return text_.substr(start, pos_ - start);
}

std::vector<std::string> tokenize(std::string_view text, TokenizeOptions opts,
                                  std::uint64_t* replacements) {
  std::vector<std::string> words;
  TokenScanner scanner(text, opts);
  while (auto w = scanner.next()) words.emplace_back(*w);
  if (replacements != nullptr) *replacements = scanner.replacements();
  return words;
}

}  // namespace wordlap
