#include "mask/keywords.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>
#include <omp.h>

#include "mask/error.hpp"
#include "mask/pii.hpp"

namespace mask {

namespace {

struct DocumentCounts {
  std::unordered_map<std::string, std::int64_t> counts;
  std::int64_t length = 0;
};

DocumentCounts count_document(const Transcript& t, const Tokenizer& tokenizer) {
  DocumentCounts doc;
  for (const auto& u : t.utterances) {
    for (auto& tok : tokenizer.tokenize(u.text)) {
      ++doc.counts[std::move(tok)];
      ++doc.length;
    }
  }
  return doc;
}

}  // namespace

KeywordFit fit_keywords(const Corpus& corpus, std::size_t n_top, const Tokenizer& tokenizer,
                        const TokenFilter& keep, int jobs) {
  std::size_t n_scam = 0;
  std::size_t n_normal = 0;
  for (const auto& t : corpus.transcripts) {
    if (!t.label) throw DataError("keyword fitting needs labels; \"" + t.id + "\" is unlabeled");
    (*t.label == Label::kScam ? n_scam : n_normal) += 1;
  }
  if (n_scam == 0 || n_normal == 0) {
    throw DataError("keyword fitting needs at least one scam and one normal transcript");
  }

  const auto n_docs = static_cast<std::int64_t>(corpus.size());
  std::vector<DocumentCounts> docs(corpus.size());
#pragma omp parallel for schedule(dynamic) num_threads(jobs > 0 ? jobs : omp_get_max_threads())
  for (std::int64_t i = 0; i < n_docs; ++i) {
    docs[i] = count_document(corpus.transcripts[i], tokenizer);
  }

  // Sorted vocabulary; sums accumulate in document order.
  std::map<std::string, std::size_t> vocab;
  for (const auto& d : docs) {
    for (const auto& [tok, _] : d.counts) vocab.emplace(tok, 0);
  }
  std::vector<std::string> tokens;
  tokens.reserve(vocab.size());
  for (auto& [tok, idx] : vocab) {
    idx = tokens.size();
    tokens.push_back(tok);
  }

  std::vector<std::int64_t> df(tokens.size(), 0);
  for (const auto& d : docs) {
    for (const auto& [tok, _] : d.counts) ++df[vocab[tok]];
  }
  std::vector<double> idf(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    idf[i] = std::log((1.0 + static_cast<double>(n_docs)) / (1.0 + static_cast<double>(df[i]))) + 1.0;
  }

  std::vector<double> sum_scam(tokens.size(), 0.0);
  std::vector<double> sum_normal(tokens.size(), 0.0);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const auto& doc = docs[d];
    auto& sums = *corpus.transcripts[d].label == Label::kScam ? sum_scam : sum_normal;
    for (const auto& [tok, count] : doc.counts) {
      const auto i = vocab[tok];
      const double tf = static_cast<double>(count) / static_cast<double>(doc.length);
      sums[i] += tf * idf[i];
    }
  }

  KeywordFit fit;
  auto& model = fit.model;
  model.tokenizer_id = std::string(tokenizer.id());
  model.n_top = n_top;

  std::vector<KeywordStat> candidates;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (keep && !keep(tokens[i])) continue;
    KeywordStat s;
    s.token = tokens[i];
    s.mean_scam = sum_scam[i] / static_cast<double>(n_scam);
    s.mean_normal = sum_normal[i] / static_cast<double>(n_normal);
    s.abs_diff = std::fabs(s.mean_scam - s.mean_normal);
    model.idf.emplace(tokens[i], idf[i]);
    candidates.push_back(std::move(s));
  }

  std::size_t take = n_top;
  if (n_top == 0) {
    fit.warnings.emplace_back("n_top is 0; keyword list is empty");
  } else if (n_top > candidates.size()) {
    fit.warnings.push_back("n_top " + std::to_string(n_top) + " exceeds vocabulary size " +
                           std::to_string(candidates.size()) + "; clamped");
    take = candidates.size();
  }

  auto by_rank = [](const KeywordStat& a, const KeywordStat& b) {
    if (a.abs_diff != b.abs_diff) return a.abs_diff > b.abs_diff;
    return a.token < b.token;
  };
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                    candidates.end(), by_rank);
  candidates.resize(take);
  for (auto& s : candidates) {
    model.keywords.push_back(s.token);
    model.stats.push_back(std::move(s));
  }
  return fit;
}

KeywordFit fit_private_keywords(const Corpus& corpus, std::size_t n_top,
                                const PiiDetector& detector, int jobs) {
  Corpus masked = corpus;
  const auto n = static_cast<std::int64_t>(masked.size());
#pragma omp parallel for schedule(dynamic) num_threads(jobs > 0 ? jobs : omp_get_max_threads())
  for (std::int64_t i = 0; i < n; ++i) {
    for (auto& u : masked.transcripts[i].utterances) u.text = detector.mask(u.text);
  }
  auto keep = [&detector](std::string_view tok) {
    if (std::any_of(tok.begin(), tok.end(), [](char c) { return is_ascii_digit(c); })) return false;
    return detector.detect(tok).empty();
  };
  return fit_keywords(masked, n_top, Tokenizer{}, keep, jobs);
}

std::string keyword_model_to_json(const KeywordModel& model) {
  nlohmann::ordered_json j;
  j["tokenizer_id"] = model.tokenizer_id;
  j["n_top"] = model.n_top;
  j["keywords"] = model.keywords;
  auto& stats = j["stats"] = nlohmann::ordered_json::array();
  for (const auto& s : model.stats) {
    nlohmann::ordered_json o;
    o["token"] = s.token;
    o["mean_scam"] = s.mean_scam;
    o["mean_normal"] = s.mean_normal;
    o["abs_diff"] = s.abs_diff;
    stats.push_back(std::move(o));
  }
  auto& idf = j["idf"] = nlohmann::ordered_json::object();
  for (const auto& [tok, v] : model.idf) idf[tok] = v;
  return j.dump();
}

KeywordModel keyword_model_from_json(std::string_view json) {
  try {
    auto j = nlohmann::json::parse(json);
    KeywordModel m;
    m.tokenizer_id = j.at("tokenizer_id").get<std::string>();
    m.n_top = j.at("n_top").get<std::size_t>();
    m.keywords = j.at("keywords").get<std::vector<std::string>>();
    for (const auto& s : j.at("stats")) {
      m.stats.push_back({s.at("token").get<std::string>(), s.at("mean_scam").get<double>(),
                         s.at("mean_normal").get<double>(), s.at("abs_diff").get<double>()});
    }
    m.idf = j.at("idf").get<std::map<std::string, double>>();
    if (m.stats.size() != m.keywords.size()) {
      throw DataError("keyword model: stats and keywords differ in length");
    }
    for (std::size_t i = 0; i < m.stats.size(); ++i) {
      if (m.stats[i].token != m.keywords[i]) throw DataError("keyword model: stats out of order");
      if (m.stats[i].abs_diff < 0) throw DataError("keyword model: negative abs_diff");
    }
    if (m.tokenizer_id != Tokenizer::kId) {
      throw DataError("keyword model was fitted with tokenizer \"" + m.tokenizer_id +
                      "\", this build uses \"" + std::string(Tokenizer::kId) + "\"");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("keyword model: ") + e.what());
  }
}

void save_keyword_model(const KeywordModel& model, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("cannot write " + path.string());
  os << keyword_model_to_json(model) << '\n';
}

KeywordModel load_keyword_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return keyword_model_from_json(ss.str());
}

}  // namespace mask
