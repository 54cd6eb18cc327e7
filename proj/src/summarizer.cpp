#include "mask/summarizer.hpp"

#include <algorithm>
#include <numeric>

#include "mask/text.hpp"

namespace mask {

namespace {

// ASCII terminators end a sentence only before whitespace or the end of the
// text, so "x.y@bank.com" and "3.5" stay whole.
bool is_terminator(std::string_view text, const CodepointSpan& cp) {
  if (cp.cp == '\n' || cp.cp == 0x3002 /* 。 */ || cp.cp == 0xFF01 /* ！ */ || cp.cp == 0xFF1F /* ？ */) {
    return true;
  }
  if (cp.cp != '.' && cp.cp != '!' && cp.cp != '?') return false;
  return cp.end >= text.size() || text[cp.end] == ' ' || text[cp.end] == '\n' || text[cp.end] == '\t';
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// Drops a leading "speaker:" prefix from each line.
std::string strip_speakers(std::string_view text) {
  std::string out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    auto colon = line.find(": ");
    if (colon != std::string_view::npos) line = line.substr(colon + 2);
    out.append(line);
    if (nl == std::string_view::npos) break;
    out.push_back('\n');
    pos = nl + 1;
  }
  return out;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> sentences;
  std::size_t begin = 0;
  for (const auto& cp : decode_utf8(text)) {
    if (!is_terminator(text, cp)) continue;
    auto s = trim(text.substr(begin, cp.end - begin));
    // A newline is a separator, not part of the sentence.
    if (cp.cp == '\n') s = trim(text.substr(begin, cp.start - begin));
    if (!s.empty()) sentences.push_back(std::move(s));
    begin = cp.end;
  }
  auto tail = trim(text.substr(begin));
  if (!tail.empty()) sentences.push_back(std::move(tail));
  return sentences;
}

}  // namespace

std::string summary_instruction() {
  return "Summarize the following phone conversation in a few sentences. Keep only the salient "
         "events, actions, and key facts, excluding personal names, identifiers, contact "
         "information, or subjective commentary. Reply with a single summary paragraph.";
}

ExtractiveSummarizer::ExtractiveSummarizer(std::map<std::string, double> idf,
                                           std::size_t max_sentences)
    : idf_(std::move(idf)), max_sentences_(max_sentences) {}

std::string ExtractiveSummarizer::summarize(const std::string& transcript_text,
                                            const std::string& /*instruction*/) const {
  const auto sentences = split_sentences(strip_speakers(transcript_text));
  const Tokenizer tokenizer;

  std::vector<double> scores(sentences.size(), 0.0);
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    for (const auto& tok : tokenizer.tokenize(sentences[i])) {
      if (idf_.empty()) {
        scores[i] += 1.0;
      } else if (auto it = idf_.find(tok); it != idf_.end()) {
        scores[i] += it->second;
      }
    }
  }

  std::vector<std::size_t> order(sentences.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  order.resize(std::min(order.size(), max_sentences_));
  std::sort(order.begin(), order.end());

  std::string out;
  for (auto i : order) {
    if (!out.empty()) out.push_back(' ');
    out += sentences[i];
  }
  return out;
}

std::string RemoteSummarizer::summarize(const std::string& transcript_text,
                                        const std::string& instruction) const {
  const auto prompt = instruction + "\n\n```\n" + transcript_text + "```";
  return trim(chat_complete(endpoint_, prompt, name()).content);
}

}  // namespace mask
