#include "mask/transcript.hpp"

namespace mask {

std::string_view to_string(Label label) { return label == Label::kScam ? "scam" : "normal"; }

std::optional<Label> parse_label(std::string_view s) {
  if (s == "scam") return Label::kScam;
  if (s == "normal") return Label::kNormal;
  return std::nullopt;
}

std::string join_transcript(const Transcript& t) {
  std::string out;
  for (const auto& u : t.utterances) {
    out += u.speaker;
    out += ": ";
    out += u.text;
    out += '\n';
  }
  return out;
}

std::string_view to_string(SanitizedRepresentation::Kind kind) {
  switch (kind) {
    case SanitizedRepresentation::Kind::kText:
      return "text";
    case SanitizedRepresentation::Kind::kVector:
      return "vector";
    case SanitizedRepresentation::Kind::kSummary:
      return "summary";
  }
  return "text";
}

std::optional<SanitizedRepresentation::Kind> parse_kind(std::string_view s) {
  if (s == "text") return SanitizedRepresentation::Kind::kText;
  if (s == "vector") return SanitizedRepresentation::Kind::kVector;
  if (s == "summary") return SanitizedRepresentation::Kind::kSummary;
  return std::nullopt;
}

SanitizedRepresentation SanitizedRepresentation::make_text(std::string strategy, std::string text) {
  SanitizedRepresentation rep;
  rep.kind = Kind::kText;
  rep.strategy = std::move(strategy);
  rep.text = std::move(text);
  return rep;
}

SanitizedRepresentation SanitizedRepresentation::make_summary(std::string strategy,
                                                              std::string text) {
  SanitizedRepresentation rep;
  rep.kind = Kind::kSummary;
  rep.strategy = std::move(strategy);
  rep.text = std::move(text);
  return rep;
}

SanitizedRepresentation SanitizedRepresentation::make_vector(
    std::string strategy, std::vector<std::string> legend,
    std::vector<std::vector<std::int64_t>> vectors) {
  SanitizedRepresentation rep;
  rep.kind = Kind::kVector;
  rep.strategy = std::move(strategy);
  rep.legend = std::move(legend);
  rep.vectors = std::move(vectors);
  return rep;
}

std::vector<std::string> SanitizedRepresentation::violations() const {
  std::vector<std::string> out;
  if (kind == Kind::kVector) {
    if (text) out.emplace_back("vector representation carries a text payload");
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      if (vectors[i].size() != legend.size()) {
        out.push_back("vector " + std::to_string(i) + " has length " +
                      std::to_string(vectors[i].size()) + ", legend has " +
                      std::to_string(legend.size()));
      }
      for (auto v : vectors[i]) {
        if (v < 0) {
          out.push_back("vector " + std::to_string(i) + " has a negative count");
          break;
        }
      }
    }
  } else {
    if (!text) out.emplace_back(std::string(to_string(kind)) + " representation has no text payload");
    if (!legend.empty() || !vectors.empty()) {
      out.emplace_back(std::string(to_string(kind)) + " representation carries vector data");
    }
  }
  return out;
}

}  // namespace mask
