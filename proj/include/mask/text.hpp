#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mask {

/// Decoded codepoint with its byte range in the source string.
struct CodepointSpan {
  char32_t cp;
  std::size_t start;
  std::size_t end;
};

/// Decodes UTF-8. Invalid sequences decode to U+FFFD one byte at a time.
std::vector<CodepointSpan> decode_utf8(std::string_view text);

bool is_valid_utf8(std::string_view text);

/// True when `offset` does not point into the middle of a multi-byte sequence.
bool is_codepoint_boundary(std::string_view text, std::size_t offset);

/// Han, kana, and Hangul codepoints are segmented per character.
bool is_cjk(char32_t cp);

/// Letters and digits that form words in space-delimited scripts.
bool is_word_char(char32_t cp);

inline bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_ascii_alnum(char c) {
  return is_ascii_digit(c) || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

std::string ascii_lower(std::string_view s);

/// Splits text into word tokens.
///
/// Runs of word characters become one lower-cased token. Runs of CJK
/// characters yield every character as a unigram followed by every
/// overlapping bigram, so "转账吗" gives {转, 账, 吗, 转账, 账吗}.
/// Everything else separates tokens.
class Tokenizer {
 public:
  static constexpr std::string_view kId = "unicode-word+cjk-bigram/v1";

  std::string_view id() const { return kId; }
  std::vector<std::string> tokenize(std::string_view text) const;
};

}  // namespace mask
