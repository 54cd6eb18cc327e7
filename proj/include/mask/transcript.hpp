#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mask {

enum class Label { kScam, kNormal };

std::string_view to_string(Label label);
std::optional<Label> parse_label(std::string_view s);

struct Utterance {
  std::string speaker;
  std::string text;

  friend bool operator==(const Utterance&, const Utterance&) = default;
};

struct Transcript {
  std::string id;
  std::optional<Label> label;
  std::vector<Utterance> utterances;

  friend bool operator==(const Transcript&, const Transcript&) = default;
};

struct Corpus {
  std::vector<Transcript> transcripts;

  std::size_t size() const { return transcripts.size(); }
  bool empty() const { return transcripts.empty(); }

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

/// Renders a transcript as "speaker: text" lines, each terminated by '\n'.
std::string join_transcript(const Transcript& t);

/// What leaves the trust boundary after sanitization.
struct SanitizedRepresentation {
  enum class Kind { kText, kVector, kSummary };

  Kind kind = Kind::kText;
  std::string strategy;
  std::optional<std::string> text;
  std::vector<std::string> legend;
  std::vector<std::vector<std::int64_t>> vectors;

  static SanitizedRepresentation make_text(std::string strategy, std::string text);
  static SanitizedRepresentation make_summary(std::string strategy, std::string text);
  static SanitizedRepresentation make_vector(std::string strategy, std::vector<std::string> legend,
                                             std::vector<std::vector<std::int64_t>> vectors);

  /// Empty when the representation satisfies its invariants.
  std::vector<std::string> violations() const;

  friend bool operator==(const SanitizedRepresentation&, const SanitizedRepresentation&) = default;
};

std::string_view to_string(SanitizedRepresentation::Kind kind);
std::optional<SanitizedRepresentation::Kind> parse_kind(std::string_view s);

struct SanitizedOutput {
  std::string id;
  SanitizedRepresentation representation;

  friend bool operator==(const SanitizedOutput&, const SanitizedOutput&) = default;
};

}  // namespace mask
