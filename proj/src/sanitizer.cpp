#include "mask/sanitizer.hpp"

#include <filesystem>
#include <mutex>

#include "mask/error.hpp"
#include "mask/text.hpp"

namespace mask {

namespace {

class PassthroughSanitizer final : public Sanitizer {
 public:
  std::string name() const override { return "passthrough"; }
  SanitizedRepresentation sanitize(const Transcript& t) const override {
    return sanitize_passthrough(t);
  }
};

class PiiStatSanitizer final : public Sanitizer {
 public:
  explicit PiiStatSanitizer(std::shared_ptr<const PiiDetector> d) : detector_(std::move(d)) {}
  std::string name() const override { return "pii_stat"; }
  SanitizedRepresentation sanitize(const Transcript& t) const override {
    return sanitize_pii_stat(t, *detector_);
  }

 private:
  std::shared_ptr<const PiiDetector> detector_;
};

class PiiMaskSanitizer final : public Sanitizer {
 public:
  explicit PiiMaskSanitizer(std::shared_ptr<const PiiDetector> d) : detector_(std::move(d)) {}
  std::string name() const override { return "pii_mask"; }
  SanitizedRepresentation sanitize(const Transcript& t) const override {
    return sanitize_pii_mask(t, *detector_);
  }

 private:
  std::shared_ptr<const PiiDetector> detector_;
};

class TfidfSanitizer final : public Sanitizer {
 public:
  explicit TfidfSanitizer(std::shared_ptr<const KeywordModel> m) : model_(std::move(m)) {}
  std::string name() const override { return "tfidf_keywords"; }
  bool requires_fit() const override { return true; }
  SanitizedRepresentation sanitize(const Transcript& t) const override {
    return sanitize_tfidf(t, *model_);
  }

 private:
  std::shared_ptr<const KeywordModel> model_;
};

class SummarySanitizer final : public Sanitizer {
 public:
  SummarySanitizer(std::shared_ptr<const SummarizerBackend> backend,
                   std::shared_ptr<const PiiDetector> post_filter)
      : backend_(std::move(backend)), post_filter_(std::move(post_filter)) {}
  std::string name() const override { return "summarize"; }
  SanitizedRepresentation sanitize(const Transcript& t) const override {
    return sanitize_summary(t, *backend_, post_filter_.get());
  }

 private:
  std::shared_ptr<const SummarizerBackend> backend_;
  std::shared_ptr<const PiiDetector> post_filter_;
};

std::shared_ptr<const PiiDetector> detector_of(const SanitizerConfig& c) {
  return c.detector ? c.detector : PiiDetector::defaults();
}

std::string resolve(const std::string& base_dir, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base_dir.empty()) path = std::filesystem::path(base_dir) / path;
  return path.string();
}

}  // namespace

const PiiDetector& SanitizerConfig::detector_or_default() const { return *detector_of(*this); }

SanitizerConfig sanitizer_config_from_json(const nlohmann::json& j, const std::string& base_dir) {
  if (!j.is_object()) throw ConfigError("sanitizer config must be a JSON object");
  SanitizerConfig c;
  try {
    if (auto it = j.find("detector"); it != j.end()) {
      c.detector = it->is_string() ? PiiDetector::load(resolve(base_dir, it->get<std::string>()))
                                   : PiiDetector::from_json(*it);
    }
    if (auto it = j.find("keyword_model"); it != j.end()) {
      c.keyword_model = std::make_shared<const KeywordModel>(
          load_keyword_model(resolve(base_dir, it->get<std::string>())));
    }
    c.summary_post_filter = j.value("summary_post_filter", true);
    if (auto it = j.find("summarizer"); it != j.end()) {
      const auto backend = it->value("backend", std::string("extractive"));
      if (backend == "remote") {
        c.summarizer = std::make_shared<const RemoteSummarizer>(
            chat_endpoint_from_json(it->at("endpoint")));
      } else if (backend == "extractive") {
        std::map<std::string, double> idf;
        if (c.keyword_model) idf = c.keyword_model->idf;
        c.summarizer = std::make_shared<const ExtractiveSummarizer>(
            std::move(idf), it->value("max_sentences", std::size_t{3}));
      } else {
        throw ConfigError("unknown summarizer backend \"" + backend + "\"");
      }
    }
    if (auto it = j.find("options"); it != j.end()) c.options = *it;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("sanitizer config: ") + e.what());
  }
  return c;
}

// ---------------------------------------------------------------------------
// Registry

SanitizerRegistry::SanitizerRegistry(SanitizerRegistry&& other) noexcept {
  std::unique_lock lock(other.mutex_);
  factories_ = std::move(other.factories_);
}

void SanitizerRegistry::add(const std::string& name, SanitizerFactory factory) {
  if (name.empty()) throw ConfigError("sanitizer name must be non-empty");
  std::unique_lock lock(mutex_);
  if (!factories_.emplace(name, std::move(factory)).second) {
    throw ConfigError("sanitizer \"" + name + "\" is already registered");
  }
}

std::unique_ptr<Sanitizer> SanitizerRegistry::lookup(const std::string& name,
                                                     const SanitizerConfig& config) const {
  SanitizerFactory factory;
  {
    std::shared_lock lock(mutex_);
    auto it = factories_.find(name);
    if (it != factories_.end()) factory = it->second;
  }
  if (!factory) {
    std::string known;
    for (const auto& n : names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown strategy \"" + name + "\"; known strategies: " + known);
  }
  return factory(config);
}

bool SanitizerRegistry::contains(const std::string& name) const {
  std::shared_lock lock(mutex_);
  return factories_.count(name) > 0;
}

std::vector<std::string> SanitizerRegistry::names() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [n, _] : factories_) out.push_back(n);
  return out;
}

const std::vector<std::string>& builtin_strategy_names() {
  static const std::vector<std::string> names = {"passthrough", "tfidf_keywords", "pii_stat",
                                                 "pii_mask", "summarize"};
  return names;
}

SanitizerRegistry SanitizerRegistry::with_builtins() {
  SanitizerRegistry r;
  r.add("passthrough", [](const SanitizerConfig&) { return std::make_unique<PassthroughSanitizer>(); });
  r.add("pii_stat", [](const SanitizerConfig& c) {
    return std::make_unique<PiiStatSanitizer>(detector_of(c));
  });
  r.add("pii_mask", [](const SanitizerConfig& c) {
    return std::make_unique<PiiMaskSanitizer>(detector_of(c));
  });
  r.add("tfidf_keywords", [](const SanitizerConfig& c) -> std::unique_ptr<Sanitizer> {
    if (!c.keyword_model) {
      throw ConfigError("tfidf_keywords needs a fitted keyword model (run fit-keywords first)");
    }
    return std::make_unique<TfidfSanitizer>(c.keyword_model);
  });
  r.add("summarize", [](const SanitizerConfig& c) {
    std::shared_ptr<const SummarizerBackend> backend = c.summarizer;
    if (!backend) {
      backend = std::make_shared<const ExtractiveSummarizer>(
          c.keyword_model ? c.keyword_model->idf : std::map<std::string, double>{});
    }
    return std::make_unique<SummarySanitizer>(
        std::move(backend), c.summary_post_filter ? detector_of(c) : nullptr);
  });
  return r;
}

// ---------------------------------------------------------------------------
// Strategies

SanitizedRepresentation sanitize_passthrough(const Transcript& t) {
  return SanitizedRepresentation::make_text("passthrough", join_transcript(t));
}

SanitizedRepresentation sanitize_pii_stat(const Transcript& t, const PiiDetector& detector) {
  std::vector<std::vector<std::int64_t>> vectors;
  vectors.reserve(t.utterances.size());
  for (const auto& u : t.utterances) {
    auto spans = detector.detect(u.text);
    vectors.push_back(count_by_category(spans));
  }
  return SanitizedRepresentation::make_vector("pii_stat", category_legend(), std::move(vectors));
}

SanitizedRepresentation sanitize_pii_mask(const Transcript& t, const PiiDetector& detector) {
  std::string out;
  for (const auto& u : t.utterances) {
    out += detector.mask(u.speaker);
    out += ": ";
    out += detector.mask(u.text);
    out += '\n';
  }
  return SanitizedRepresentation::make_text("pii_mask", std::move(out));
}

SanitizedRepresentation sanitize_tfidf(const Transcript& t, const KeywordModel& model) {
  std::unordered_map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < model.keywords.size(); ++i) index.emplace(model.keywords[i], i);

  const Tokenizer tokenizer;
  std::vector<std::vector<std::int64_t>> vectors;
  vectors.reserve(t.utterances.size());
  for (const auto& u : t.utterances) {
    std::vector<std::int64_t> v(model.keywords.size(), 0);
    for (const auto& tok : tokenizer.tokenize(u.text)) {
      if (auto it = index.find(tok); it != index.end()) ++v[it->second];
    }
    vectors.push_back(std::move(v));
  }
  return SanitizedRepresentation::make_vector("tfidf_keywords", model.keywords, std::move(vectors));
}

SanitizedRepresentation sanitize_summary(const Transcript& t, const SummarizerBackend& backend,
                                         const PiiDetector* post_filter) {
  const bool empty = std::all_of(t.utterances.begin(), t.utterances.end(), [](const Utterance& u) {
    return u.text.find_first_not_of(" \t\r\n") == std::string::npos;
  });
  if (empty) return SanitizedRepresentation::make_summary("summarize", "");

  auto summary = backend.summarize(join_transcript(t), summary_instruction());
  if (post_filter) summary = post_filter->mask(summary);
  return SanitizedRepresentation::make_summary("summarize", std::move(summary));
}

}  // namespace mask
