#include "mask/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mask/error.hpp"
#include "mask/parallel.hpp"
#include "mask/text.hpp"

namespace mask {

namespace {

void check_aligned(const Corpus& raw, const std::vector<SanitizedOutput>& sanitized) {
  if (raw.empty()) throw DataError("cannot evaluate an empty corpus");
  if (raw.size() != sanitized.size()) {
    throw DataError("misaligned inputs: " + std::to_string(raw.size()) + " raw transcripts vs " +
                    std::to_string(sanitized.size()) + " sanitized records");
  }
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw.transcripts[i].id != sanitized[i].id) {
      throw DataError("misaligned inputs at position " + std::to_string(i) + ": \"" +
                      raw.transcripts[i].id + "\" vs \"" + sanitized[i].id + "\"");
    }
  }
}

std::map<std::string, std::int64_t> token_counts(const std::string& text) {
  std::map<std::string, std::int64_t> counts;
  for (auto& tok : Tokenizer{}.tokenize(text)) ++counts[std::move(tok)];
  return counts;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

std::string textualize(const SanitizedRepresentation& rep) {
  if (rep.kind != SanitizedRepresentation::Kind::kVector) return rep.text.value_or("");
  std::string out;
  for (std::size_t u = 0; u < rep.vectors.size(); ++u) {
    if (u > 0) out.push_back('\n');
    bool first = true;
    for (std::size_t d = 0; d < rep.vectors[u].size() && d < rep.legend.size(); ++d) {
      for (std::int64_t k = 0; k < rep.vectors[u][d]; ++k) {
        if (!first) out.push_back(' ');
        out += rep.legend[d];
        first = false;
      }
    }
  }
  return out;
}

PrivacyReport compute_prr(const Corpus& raw, const std::vector<SanitizedOutput>& sanitized,
                          const PiiDetector& detector, int jobs) {
  check_aligned(raw, sanitized);
  std::vector<std::string> raw_texts;
  std::vector<std::string> clean_texts;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw_texts.push_back(join_transcript(raw.transcripts[i]));
    clean_texts.push_back(textualize(sanitized[i].representation));
  }
  const auto raw_counts = kernels::count_pii_by_category(detector, raw_texts, jobs);
  const auto clean_counts = kernels::count_pii_by_category(detector, clean_texts, jobs);

  PrivacyReport r;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
      r.per_category[c].raw += raw_counts[i][c];
      r.per_category[c].sanitized += clean_counts[i][c];
      r.raw_pii_total += raw_counts[i][c];
      r.sanitized_pii_total += clean_counts[i][c];
    }
  }
  if (r.raw_pii_total == 0) {
    r.degenerate = true;
    r.prr = 1.0;
    r.introduced_pii = r.sanitized_pii_total > 0;
    return r;
  }
  r.prr = 1.0 - static_cast<double>(r.sanitized_pii_total) / static_cast<double>(r.raw_pii_total);
  if (r.prr < 0.0) {
    r.prr = 0.0;
    r.introduced_pii = true;
  }
  return r;
}

double LexicalCosine::sim(const std::string& a, const std::string& b) const {
  if (a == b) return 1.0;
  const auto ca = token_counts(a);
  const auto cb = token_counts(b);
  if (ca.empty() && cb.empty()) return 1.0;
  if (ca.empty() || cb.empty()) return 0.0;

  // Integer dot products keep the result exactly symmetric.
  std::int64_t dot = 0;
  std::int64_t na = 0;
  std::int64_t nb = 0;
  for (const auto& [_, v] : ca) na += v * v;
  for (const auto& [_, v] : cb) nb += v * v;
  auto ia = ca.begin();
  auto ib = cb.begin();
  while (ia != ca.end() && ib != cb.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      dot += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return clamp01(static_cast<double>(dot) /
                 std::sqrt(static_cast<double>(na) * static_cast<double>(nb)));
}

double EmbeddingSimilarity::sim(const std::string& a, const std::string& b) const {
  if (a == b) return 1.0;
  auto vecs = fetch_embeddings(endpoint_, {a, b}, "embedding:" + endpoint_.model_name);
  const auto& x = vecs[0];
  const auto& y = vecs[1];
  if (x.size() != y.size() || x.empty()) {
    throw RemoteError("embedding:" + endpoint_.model_name, "embedding dimensions disagree");
  }
  double dot = 0.0;
  double nx = 0.0;
  double ny = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    dot += x[i] * y[i];
    nx += x[i] * x[i];
    ny += y[i] * y[i];
  }
  if (nx == 0.0 || ny == 0.0) return 0.0;
  return clamp01(dot / std::sqrt(nx * ny));
}

UtilityReport compute_srr(const Corpus& raw, const std::vector<SanitizedOutput>& sanitized,
                          const SimilarityBackend& backend, int jobs, bool allow_partial) {
  check_aligned(raw, sanitized);
  std::vector<std::string> raw_texts;
  std::vector<std::string> clean_texts;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw_texts.push_back(join_transcript(raw.transcripts[i]));
    clean_texts.push_back(textualize(sanitized[i].representation));
  }
  const auto outcomes = kernels::similarities(backend, raw_texts, clean_texts, jobs);

  UtilityReport r;
  r.backend_name = backend.name();
  double sum = 0.0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& id = raw.transcripts[i].id;
    if (outcomes[i].error) {
      if (!allow_partial) std::rethrow_exception(outcomes[i].error);
      try {
        std::rethrow_exception(outcomes[i].error);
      } catch (const std::exception& e) {
        r.failures.emplace_back(id, e.what());
      }
      continue;
    }
    r.per_transcript_sims.push_back({id, outcomes[i].sim});
    sum += outcomes[i].sim;
  }
  if (r.per_transcript_sims.empty()) {
    throw DataError("similarity backend " + backend.name() + " failed for every transcript");
  }
  r.srr = sum / static_cast<double>(r.per_transcript_sims.size());
  return r;
}

ClassificationReport classification_from_confusion(const Confusion& c) {
  ClassificationReport r;
  r.confusion = c;
  const auto total = c.tp + c.fp + c.tn + c.fn;
  if (total == 0) throw DataError("classification needs at least one item");
  r.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(total);
  if (c.tp + c.fp == 0) {
    r.precision_undefined = true;
  } else {
    r.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  }
  if (c.tp + c.fn == 0) {
    r.recall_undefined = true;
  } else {
    r.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  }
  if (r.precision + r.recall > 0.0) {
    r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  }
  return r;
}

ClassificationReport compute_classification(const std::vector<Label>& predictions,
                                            const std::vector<Label>& labels) {
  if (predictions.size() != labels.size()) {
    throw DataError("classification: " + std::to_string(predictions.size()) + " predictions vs " +
                    std::to_string(labels.size()) + " labels");
  }
  if (predictions.empty()) throw DataError("classification needs at least one item");
  Confusion c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool pred = predictions[i] == Label::kScam;
    const bool gold = labels[i] == Label::kScam;
    if (pred && gold) ++c.tp;
    else if (pred) ++c.fp;
    else if (gold) ++c.fn;
    else ++c.tn;
  }
  return classification_from_confusion(c);
}

nlohmann::ordered_json privacy_json(const PrivacyReport& r) {
  nlohmann::ordered_json j;
  j["prr"] = r.prr;
  j["raw_pii_total"] = r.raw_pii_total;
  j["sanitized_pii_total"] = r.sanitized_pii_total;
  j["degenerate_prr"] = r.degenerate;
  j["introduced_pii"] = r.introduced_pii;
  return j;
}

nlohmann::ordered_json classification_json(const std::string& model, const ClassificationReport& r) {
  nlohmann::ordered_json j;
  j["model"] = model;
  j["acc"] = r.accuracy;
  j["p"] = r.precision;
  j["r"] = r.recall;
  j["f1"] = r.f1;
  j["confusion"] = {{"tp", r.confusion.tp}, {"fp", r.confusion.fp}, {"tn", r.confusion.tn},
                    {"fn", r.confusion.fn}};
  j["precision_undefined"] = r.precision_undefined;
  j["recall_undefined"] = r.recall_undefined;
  return j;
}

nlohmann::ordered_json strategy_report_json(const std::string& strategy, const PrivacyReport& privacy,
                                            const UtilityReport& utility,
                                            const std::optional<nlohmann::ordered_json>& classification) {
  nlohmann::ordered_json j;
  j["strategy"] = strategy;
  j["prr"] = privacy.prr;
  j["srr"] = utility.srr;
  j["degenerate_prr"] = privacy.degenerate;
  j["introduced_pii"] = privacy.introduced_pii;
  j["raw_pii_total"] = privacy.raw_pii_total;
  j["sanitized_pii_total"] = privacy.sanitized_pii_total;
  auto& per_cat = j["per_category"] = nlohmann::ordered_json::object();
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    per_cat[std::string(to_string(kAllCategories[c]))] = {{"raw", privacy.per_category[c].raw},
                                                          {"sanitized", privacy.per_category[c].sanitized}};
  }
  j["similarity"] = utility.backend_name;
  if (!utility.failures.empty()) {
    auto& f = j["similarity_failures"] = nlohmann::ordered_json::array();
    for (const auto& [id, msg] : utility.failures) f.push_back({{"id", id}, {"error", msg}});
  }
  if (classification) j["classification"] = *classification;
  return j;
}

}  // namespace mask
