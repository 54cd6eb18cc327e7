#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mask/chat_client.hpp"
#include "mask/pii.hpp"
#include "mask/transcript.hpp"

namespace mask {

/// Text view of a representation. Text and summary payloads pass through;
/// vectors become legend labels repeated by count, space-separated, one line
/// per utterance.
std::string textualize(const SanitizedRepresentation& rep);

// ---------------------------------------------------------------------------
// Privacy: pooled PII removal rate.

struct CategoryTally {
  std::int64_t raw = 0;
  std::int64_t sanitized = 0;
};

struct PrivacyReport {
  double prr = 1.0;
  std::int64_t raw_pii_total = 0;
  std::int64_t sanitized_pii_total = 0;
  std::array<CategoryTally, kCategoryCount> per_category{};
  bool degenerate = false;        // no PII in the raw corpus; prr reported as 1
  bool introduced_pii = false;    // sanitized side had more PII; prr clamped to 0
};

/// PRR = 1 - sum_i |PII_sanitized(i)| / sum_i |PII_raw(i)|, counting PII on
/// the joined raw transcript and on the textualized representation with the
/// same detector. Inputs must align by position and id.
PrivacyReport compute_prr(const Corpus& raw, const std::vector<SanitizedOutput>& sanitized,
                          const PiiDetector& detector, int jobs = 0);

// ---------------------------------------------------------------------------
// Utility: semantic retention rate.

class SimilarityBackend {
 public:
  virtual ~SimilarityBackend() = default;
  virtual std::string name() const = 0;
  /// Symmetric, in [0, 1], and 1 for identical texts.
  virtual double sim(const std::string& a, const std::string& b) const = 0;
};

/// Cosine of token-count vectors from the keyword tokenizer. Two texts
/// without tokens are identical (1); one empty side gives 0.
class LexicalCosine final : public SimilarityBackend {
 public:
  std::string name() const override { return "lexical"; }
  double sim(const std::string& a, const std::string& b) const override;
};

/// Cosine of embeddings from a remote /embeddings endpoint, clamped to [0, 1].
class EmbeddingSimilarity final : public SimilarityBackend {
 public:
  explicit EmbeddingSimilarity(ChatEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
  std::string name() const override { return "embedding"; }
  double sim(const std::string& a, const std::string& b) const override;

 private:
  ChatEndpoint endpoint_;
};

struct TranscriptSimilarity {
  std::string id;
  double sim;
};

struct UtilityReport {
  double srr = 0.0;  // mean of per_transcript_sims
  std::vector<TranscriptSimilarity> per_transcript_sims;
  std::string backend_name;
  std::vector<std::pair<std::string, std::string>> failures;  // id, message
};

/// SRR = (1/N) sum_i Sim(T_i, T^_i) between the joined raw transcript and the
/// textualized representation. With `allow_partial`, backend failures are
/// listed and the mean covers the remaining transcripts; otherwise the first
/// failure is rethrown.
UtilityReport compute_srr(const Corpus& raw, const std::vector<SanitizedOutput>& sanitized,
                          const SimilarityBackend& backend, int jobs = 0,
                          bool allow_partial = false);

// ---------------------------------------------------------------------------
// Detection quality. The positive class is scam.

struct Confusion {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct ClassificationReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  Confusion confusion;
  bool precision_undefined = false;  // no positive predictions; precision set to 0
  bool recall_undefined = false;     // no positive labels; recall set to 0
};

/// Throws DataError on length mismatch or empty input.
ClassificationReport compute_classification(const std::vector<Label>& predictions,
                                            const std::vector<Label>& labels);

ClassificationReport classification_from_confusion(const Confusion& c);

// ---------------------------------------------------------------------------
// Report JSON.

nlohmann::ordered_json privacy_json(const PrivacyReport& r);
nlohmann::ordered_json classification_json(const std::string& model, const ClassificationReport& r);

/// {"strategy", "prr", "srr", "degenerate_prr", "per_category", "classification"?}
nlohmann::ordered_json strategy_report_json(const std::string& strategy, const PrivacyReport& privacy,
                                            const UtilityReport& utility,
                                            const std::optional<nlohmann::ordered_json>& classification);

}  // namespace mask
