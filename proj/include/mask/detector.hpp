#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mask/chat_client.hpp"
#include "mask/metrics.hpp"
#include "mask/transcript.hpp"

namespace mask {

struct Verdict {
  Label label;
  std::string rationale;
  int attempts = 1;
  std::chrono::milliseconds latency{0};
};

/// A scam detector. It only ever sees sanitized representations.
class Detector {
 public:
  virtual ~Detector() = default;
  virtual std::string name() const = 0;
  virtual Verdict classify(const SanitizedRepresentation& rep) const = 0;
  /// Upper bound on in-flight classify calls during run_detection.
  virtual int max_concurrency() const { return 4; }
};

// ---------------------------------------------------------------------------
// Mock detector

struct MockRule {
  std::vector<std::string> triggers;
  int min_triggers = 2;

  static MockRule defaults();
  static MockRule from_json(const nlohmann::json& j);
};

/// Scam iff the textualized representation contains at least `min_triggers`
/// distinct trigger terms. Terms made of ASCII letters and digits must match
/// whole words (case-insensitive); other terms match as substrings.
Label classify_mock(const SanitizedRepresentation& rep, const MockRule& rule);

class MockDetector final : public Detector {
 public:
  explicit MockDetector(MockRule rule = MockRule::defaults()) : rule_(std::move(rule)) {}
  std::string name() const override { return "mock"; }
  Verdict classify(const SanitizedRepresentation& rep) const override;

 private:
  MockRule rule_;
};

// ---------------------------------------------------------------------------
// Remote detector

inline constexpr std::string_view kPayloadPlaceholder = "{payload}";

std::string default_detector_prompt();

struct DetectorEndpointConfig {
  ChatEndpoint endpoint;
  std::string prompt_template = default_detector_prompt();
  int max_concurrency = 4;

  /// Throws ConfigError unless the template has exactly one payload
  /// placeholder and the timeout and concurrency are positive.
  void validate() const;

  static DetectorEndpointConfig from_json(const nlohmann::json& j);
  static DetectorEndpointConfig load(const std::string& path);
};

struct ParsedVerdict {
  Label label;
  std::string rationale;
};

/// The first whole-word verdict keyword decides: scam/fraud vs
/// normal/legitimate. A keyword preceded by "not" ("not a scam") is
/// ambiguous. Returns nullopt when no usable keyword is found.
std::optional<ParsedVerdict> parse_verdict(const std::string& reply);

/// Sends the textualized representation inside the prompt template.
/// Unparseable replies are retried like transport failures.
Verdict classify_remote(const SanitizedRepresentation& rep, const DetectorEndpointConfig& config);

class RemoteDetector final : public Detector {
 public:
  explicit RemoteDetector(DetectorEndpointConfig config);
  std::string name() const override { return config_.endpoint.model_name; }
  Verdict classify(const SanitizedRepresentation& rep) const override;
  int max_concurrency() const override { return config_.max_concurrency; }

 private:
  DetectorEndpointConfig config_;
};

// ---------------------------------------------------------------------------
// Batch detection

struct DetectionItem {
  std::string id;
  std::optional<Label> verdict;  // empty when the item failed
  Label label;
  std::string rationale;
  std::string error;
  int attempts = 0;
  std::chrono::milliseconds latency{0};
};

struct DetectionRun {
  std::optional<ClassificationReport> report;  // empty when every item failed
  std::vector<DetectionItem> items;            // input order
  std::vector<std::string> excluded_ids;       // failed items left out of the report
};

/// Classifies every output with at most detector.max_concurrency() calls in
/// flight. Throws DataError on empty input or a missing label.
DetectionRun run_detection(const std::vector<SanitizedOutput>& outputs, const Detector& detector,
                           const std::map<std::string, Label>& labels);

nlohmann::ordered_json detection_run_json(const std::string& model, const DetectionRun& run,
                                          bool include_timings);

}  // namespace mask
