#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mask/text.hpp"
#include "mask/transcript.hpp"

namespace mask {

class PiiDetector;

inline constexpr std::size_t kDefaultTopN = 100;

struct KeywordStat {
  std::string token;
  double mean_scam = 0.0;
  double mean_normal = 0.0;
  double abs_diff = 0.0;

  friend bool operator==(const KeywordStat&, const KeywordStat&) = default;
};

/// Class-discriminative keywords ranked by |mean tf-idf(scam) - mean tf-idf(normal)|,
/// ties broken by ascending byte order of the token.
struct KeywordModel {
  std::string tokenizer_id;
  std::size_t n_top = kDefaultTopN;
  std::vector<std::string> keywords;
  std::vector<KeywordStat> stats;  // parallel to keywords
  std::map<std::string, double> idf;

  friend bool operator==(const KeywordModel&, const KeywordModel&) = default;
};

struct KeywordFit {
  KeywordModel model;
  std::vector<std::string> warnings;
};

/// Returns true for tokens allowed to become keywords.
using TokenFilter = std::function<bool(std::string_view)>;

/// Fits keywords with one document per transcript (utterance texts only,
/// speakers excluded).
///
///   tf(t, d)  = count(t, d) / |d|
///   idf(t)    = ln((1 + D) / (1 + df(t))) + 1
///   mean_c(t) = sum over documents of class c of tf * idf, divided by the class size
///
/// Throws DataError on unlabeled transcripts or a corpus missing either class.
/// n_top larger than the candidate vocabulary is clamped with a warning.
/// `jobs` bounds the threads used for per-document counting (0 = runtime default).
KeywordFit fit_keywords(const Corpus& corpus, std::size_t n_top, const Tokenizer& tokenizer = {},
                        const TokenFilter& keep = {}, int jobs = 0);

/// fit_keywords over PII-masked text. Tokens with digits and tokens the
/// detector flags on their own are never selected, so a vector legend can't
/// carry PII out.
KeywordFit fit_private_keywords(const Corpus& corpus, std::size_t n_top,
                                const PiiDetector& detector, int jobs = 0);

std::string keyword_model_to_json(const KeywordModel& model);
KeywordModel keyword_model_from_json(std::string_view json);
void save_keyword_model(const KeywordModel& model, const std::filesystem::path& path);
KeywordModel load_keyword_model(const std::filesystem::path& path);

}  // namespace mask
