#include "mask/text.hpp"

namespace mask {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

// Returns the sequence length for a lead byte, 0 for a continuation or invalid byte.
int sequence_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if (lead >= 0xC2 && lead <= 0xDF) return 2;
  if (lead >= 0xE0 && lead <= 0xEF) return 3;
  if (lead >= 0xF0 && lead <= 0xF4) return 4;
  return 0;
}

bool decode_one(std::string_view text, std::size_t pos, char32_t& cp, int& len) {
  const auto lead = static_cast<unsigned char>(text[pos]);
  len = sequence_length(lead);
  if (len == 0 || pos + len > text.size()) return false;
  if (len == 1) {
    cp = lead;
    return true;
  }
  cp = lead & (0xFF >> (len + 1));
  for (int i = 1; i < len; ++i) {
    const auto c = static_cast<unsigned char>(text[pos + i]);
    if ((c & 0xC0) != 0x80) return false;
    cp = (cp << 6) | (c & 0x3F);
  }
  // Overlongs, surrogates, and out-of-range values.
  if ((len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) || cp > 0x10FFFF ||
      (cp >= 0xD800 && cp <= 0xDFFF)) {
    return false;
  }
  return true;
}

}  // namespace

std::vector<CodepointSpan> decode_utf8(std::string_view text) {
  std::vector<CodepointSpan> out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    char32_t cp = 0;
    int len = 0;
    if (decode_one(text, pos, cp, len)) {
      out.push_back({cp, pos, pos + len});
      pos += len;
    } else {
      out.push_back({kReplacement, pos, pos + 1});
      ++pos;
    }
  }
  return out;
}

bool is_valid_utf8(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    char32_t cp = 0;
    int len = 0;
    if (!decode_one(text, pos, cp, len)) return false;
    pos += len;
  }
  return true;
}

bool is_codepoint_boundary(std::string_view text, std::size_t offset) {
  if (offset == 0 || offset >= text.size()) return offset <= text.size();
  return (static_cast<unsigned char>(text[offset]) & 0xC0) != 0x80;
}

bool is_cjk(char32_t cp) {
  return (cp >= 0x4E00 && cp <= 0x9FFF) ||    // unified ideographs
         (cp >= 0x3400 && cp <= 0x4DBF) ||    // extension A
         (cp >= 0x20000 && cp <= 0x2FA1F) ||  // extensions B..F, compat supplement
         (cp >= 0xF900 && cp <= 0xFAFF) ||    // compatibility ideographs
         (cp >= 0x3040 && cp <= 0x30FF) ||    // hiragana, katakana
         (cp >= 0xAC00 && cp <= 0xD7AF) ||    // hangul syllables
         cp == 0x3007;                        // 〇
}

bool is_word_char(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
  }
  if (is_cjk(cp)) return false;
  // Latin-1 letters, Latin extended, Greek, Cyrillic, and the other alphabetic
  // blocks below the CJK punctuation range.
  if (cp >= 0xC0 && cp <= 0x24F && cp != 0xD7 && cp != 0xF7) return true;
  if (cp >= 0x370 && cp <= 0x52F) return true;
  if (cp >= 0x0590 && cp <= 0x1FFF) return true;
  if (cp >= 0xFF10 && cp <= 0xFF19) return true;  // fullwidth digits
  if ((cp >= 0xFF21 && cp <= 0xFF3A) || (cp >= 0xFF41 && cp <= 0xFF5A)) return true;
  return false;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::vector<std::string> Tokenizer::tokenize(std::string_view text) const {
  std::vector<std::string> tokens;
  const auto cps = decode_utf8(text);

  std::size_t i = 0;
  while (i < cps.size()) {
    if (is_word_char(cps[i].cp)) {
      std::size_t j = i;
      while (j < cps.size() && is_word_char(cps[j].cp)) ++j;
      tokens.push_back(ascii_lower(text.substr(cps[i].start, cps[j - 1].end - cps[i].start)));
      i = j;
    } else if (is_cjk(cps[i].cp)) {
      std::size_t j = i;
      while (j < cps.size() && is_cjk(cps[j].cp)) ++j;
      for (std::size_t k = i; k < j; ++k) {
        tokens.emplace_back(text.substr(cps[k].start, cps[k].end - cps[k].start));
      }
      for (std::size_t k = i; k + 1 < j; ++k) {
        tokens.emplace_back(text.substr(cps[k].start, cps[k + 1].end - cps[k].start));
      }
      i = j;
    } else {
      ++i;
    }
  }
  return tokens;
}

}  // namespace mask
