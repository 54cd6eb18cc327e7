#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace mask {

enum class PiiCategory : std::uint8_t {
  kId,
  kPhone,
  kAccount,
  kEmail,
  kUrl,
  kBankcard,
  kDate,
  kName,
  kOrg,
  kLoc,
  kNum,
};

inline constexpr std::size_t kCategoryCount = 11;

inline constexpr std::array<PiiCategory, kCategoryCount> kAllCategories = {
    PiiCategory::kId,   PiiCategory::kPhone,    PiiCategory::kAccount, PiiCategory::kEmail,
    PiiCategory::kUrl,  PiiCategory::kBankcard, PiiCategory::kDate,    PiiCategory::kName,
    PiiCategory::kOrg,  PiiCategory::kLoc,      PiiCategory::kNum,
};

std::string_view to_string(PiiCategory c);
std::optional<PiiCategory> parse_category(std::string_view s);

/// Category names in vector-legend order.
std::vector<std::string> category_legend();

struct EntitySpan {
  enum class Source { kPattern, kNer, kFallback };

  PiiCategory category;
  std::size_t start;  // byte offset, inclusive
  std::size_t end;    // byte offset, exclusive
  std::string surface;
  Source source;

  friend bool operator==(const EntitySpan&, const EntitySpan&) = default;
};

struct PatternSpec {
  PiiCategory category;
  std::string regex;
  int priority;
  bool icase = false;
};

/// Compiled regular expressions for structured PII.
///
/// Patterns use ECMAScript syntax over UTF-8 bytes. When a pattern has a
/// capture group, group 1 is the entity and the rest of the match is context,
/// e.g. `(?:account|账号)[:：]?\s*([0-9]{6,})`.
class PatternSet {
 public:
  PatternSet() = default;

  /// Throws ConfigError when a pattern does not compile, targets NUM, or
  /// reuses a priority within its category.
  static PatternSet compile(std::vector<PatternSpec> specs);
  static PatternSet defaults();

  const std::vector<PatternSpec>& specs() const { return specs_; }

  /// Every match of every pattern, possibly overlapping. Each candidate's
  /// priority is returned alongside it.
  std::vector<std::pair<EntitySpan, int>> candidates(std::string_view text) const;

 private:
  std::vector<PatternSpec> specs_;
  std::vector<std::regex> compiled_;
};

struct RecognizedEntity {
  PiiCategory category;  // NAME, ORG, or LOC
  std::size_t start;
  std::size_t end;
};

/// Recognizer for unstructured PII. Implementations must be safe to call
/// concurrently.
class EntityRecognizer {
 public:
  virtual ~EntityRecognizer() = default;
  virtual std::string name() const = 0;
  virtual std::vector<RecognizedEntity> recognize(std::string_view text) const = 0;
};

/// Exact-match lexicon recognizer; at each position the longest entry wins.
/// Entries starting or ending with an ASCII letter or digit only match at
/// ASCII word boundaries on that side.
class Gazetteer final : public EntityRecognizer {
 public:
  using Lexicon = std::map<PiiCategory, std::vector<std::string>>;

  explicit Gazetteer(Lexicon lexicon);
  static Gazetteer defaults();

  std::string name() const override { return "gazetteer"; }
  std::vector<RecognizedEntity> recognize(std::string_view text) const override;

  const Lexicon& lexicon() const { return lexicon_; }
  bool contains(std::string_view entry) const;

 private:
  struct Entry {
    std::string text;
    PiiCategory category;
  };

  Lexicon lexicon_;
  // Indexed by first byte, longest entries first.
  std::array<std::vector<Entry>, 256> by_first_byte_;
};

using PlaceholderMap = std::array<std::string, kCategoryCount>;

/// "[ID]", "[PHONE]", ... in category order.
PlaceholderMap default_placeholders();

inline constexpr int kDefaultNumFallbackDigits = 4;

/// Hybrid detection: pattern matches first, recognizer entities where they do
/// not collide with a pattern match, then leftover digit runs as NUM.
///
/// Result is sorted by start and non-overlapping.
std::vector<EntitySpan> detect_pii(std::string_view text, const PatternSet& patterns,
                                   const EntityRecognizer& ner,
                                   int num_fallback_min_digits = kDefaultNumFallbackDigits);

/// Replaces each span with its category placeholder. Throws DataError when a
/// span is out of bounds, unsorted, or overlapping.
std::string mask_text(std::string_view text, std::span<const EntitySpan> spans,
                      const PlaceholderMap& placeholders);

/// Counts per category in legend order; the sum equals spans.size().
std::vector<std::int64_t> count_by_category(std::span<const EntitySpan> spans);

/// A configured detector: patterns, recognizer, fallback threshold, placeholders.
/// Immutable after construction.
class PiiDetector {
 public:
  PiiDetector(PatternSet patterns, std::shared_ptr<const EntityRecognizer> ner,
              int num_fallback_min_digits, PlaceholderMap placeholders);

  static std::shared_ptr<const PiiDetector> defaults();

  /// Reads the pattern-config JSON format. Absent sections fall back to the
  /// built-in defaults.
  static std::shared_ptr<const PiiDetector> from_json(const nlohmann::json& config);
  static std::shared_ptr<const PiiDetector> load(const std::string& path);

  /// Only meaningful when the recognizer is a Gazetteer.
  nlohmann::ordered_json to_json() const;

  std::vector<EntitySpan> detect(std::string_view text) const;
  std::string mask(std::string_view text) const;

  const PatternSet& patterns() const { return patterns_; }
  const EntityRecognizer& recognizer() const { return *ner_; }
  int num_fallback_min_digits() const { return num_fallback_min_digits_; }
  const PlaceholderMap& placeholders() const { return placeholders_; }

 private:
  PatternSet patterns_;
  std::shared_ptr<const EntityRecognizer> ner_;
  int num_fallback_min_digits_;
  PlaceholderMap placeholders_;
};

}  // namespace mask
