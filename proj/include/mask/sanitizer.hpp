#pragma once

#include <functional>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "mask/keywords.hpp"
#include "mask/pii.hpp"
#include "mask/summarizer.hpp"
#include "mask/transcript.hpp"

namespace mask {

/// A transcript sanitization strategy. Instances are immutable and safe to
/// call from several threads.
class Sanitizer {
 public:
  virtual ~Sanitizer() = default;
  virtual std::string name() const = 0;
  virtual bool requires_fit() const { return false; }
  virtual SanitizedRepresentation sanitize(const Transcript& t) const = 0;
};

/// Shared resources a factory may draw on. Null members select defaults
/// where one exists.
struct SanitizerConfig {
  std::shared_ptr<const PiiDetector> detector;
  std::shared_ptr<const KeywordModel> keyword_model;
  std::shared_ptr<const SummarizerBackend> summarizer;
  bool summary_post_filter = true;
  nlohmann::json options = nlohmann::json::object();

  const PiiDetector& detector_or_default() const;
};

/// Reads {"detector": {...}|"path", "keyword_model": "path",
/// "summarizer": {"backend": "extractive"|"remote", ...}, "summary_post_filter": bool}.
/// Relative paths resolve against `base_dir`.
SanitizerConfig sanitizer_config_from_json(const nlohmann::json& j, const std::string& base_dir);

using SanitizerFactory = std::function<std::unique_ptr<Sanitizer>(const SanitizerConfig&)>;

/// Named sanitizer factories. Registration and lookup may happen concurrently.
class SanitizerRegistry {
 public:
  /// Registry with passthrough, pii_stat, pii_mask, tfidf_keywords, summarize.
  static SanitizerRegistry with_builtins();

  SanitizerRegistry() = default;
  SanitizerRegistry(SanitizerRegistry&& other) noexcept;
  SanitizerRegistry& operator=(SanitizerRegistry&&) = delete;

  /// Throws ConfigError if the name is taken.
  void add(const std::string& name, SanitizerFactory factory);

  /// Throws ConfigError naming the known strategies when `name` is unknown.
  std::unique_ptr<Sanitizer> lookup(const std::string& name, const SanitizerConfig& config) const;

  bool contains(const std::string& name) const;
  std::vector<std::string> names() const;  // sorted

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, SanitizerFactory> factories_;
};

/// Built-in strategy names in the order of Table-style reports.
const std::vector<std::string>& builtin_strategy_names();

// The built-in strategies, usable without the registry.

SanitizedRepresentation sanitize_passthrough(const Transcript& t);

/// Per-utterance PII category counts; legend is the category list.
SanitizedRepresentation sanitize_pii_stat(const Transcript& t, const PiiDetector& detector);

/// "speaker: masked text" lines. Speakers go through the same masking.
SanitizedRepresentation sanitize_pii_mask(const Transcript& t, const PiiDetector& detector);

/// Per-utterance counts of each keyword token; legend is the keyword list.
SanitizedRepresentation sanitize_tfidf(const Transcript& t, const KeywordModel& model);

/// Summary of the joined transcript. With a detector, the backend output is
/// masked again before it is returned. An empty transcript yields an empty
/// summary without contacting the backend.
SanitizedRepresentation sanitize_summary(const Transcript& t, const SummarizerBackend& backend,
                                         const PiiDetector* post_filter);

}  // namespace mask
