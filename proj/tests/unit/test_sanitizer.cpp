#include <doctest.h>

#include <atomic>
#include <thread>

#include "mask/error.hpp"
#include "mask/keywords.hpp"
#include "mask/metrics.hpp"
#include "mask/sanitizer.hpp"
#include "synthetic.hpp"

using namespace mask;

namespace {

const PiiDetector& det() { return *PiiDetector::defaults(); }

Transcript one(const std::string& text) { return {"t", Label::kScam, {{"caller", text}}}; }

std::size_t occurrences(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

class CountingSummarizer final : public SummarizerBackend {
 public:
  std::string name() const override { return "counting"; }
  std::string summarize(const std::string& text, const std::string& instruction) const override {
    ++calls;
    last_instruction = instruction;
    return "Caller Wang asked to wire funds to 13800001111 " + std::to_string(text.size());
  }
  mutable std::atomic<int> calls{0};
  mutable std::string last_instruction;
};

}  // namespace

TEST_CASE("pii_stat counts per utterance") {
  auto rep = sanitize_pii_stat(one("Hello, is this Wang?"), det());
  REQUIRE(rep.vectors.size() == 1);
  CHECK(rep.legend == category_legend());
  CHECK(rep.vectors[0][static_cast<int>(PiiCategory::kName)] == 1);
  auto none = sanitize_pii_stat(one("nothing here"), det());
  CHECK(none.vectors[0] == std::vector<std::int64_t>(kCategoryCount, 0));
  auto mixed = sanitize_pii_stat(one("ring 13800001111 re 2024-01-01"), det());
  CHECK(mixed.vectors[0][static_cast<int>(PiiCategory::kPhone)] == 1);
  CHECK(mixed.vectors[0][static_cast<int>(PiiCategory::kDate)] == 1);
  CHECK(mixed.violations().empty());
}

TEST_CASE("pii_mask output") {
  auto rep = sanitize_pii_mask(one("Hello, is this Wang?"), det());
  CHECK(rep.kind == SanitizedRepresentation::Kind::kText);
  CHECK(rep.text->find("Hello, is this [NAME]?") != std::string::npos);
  Transcript plain{"p", std::nullopt, {{"a", "good morning"}, {"b", "hi there"}}};
  CHECK(*sanitize_pii_mask(plain, det()).text == join_transcript(plain));
  Transcript phones{"q", std::nullopt, {{"a", "call 13800001111"}, {"b", "or 13900002222"}}};
  CHECK(occurrences(*sanitize_pii_mask(phones, det()).text, "[PHONE]") == 2);
}

TEST_CASE("tfidf vectors count keyword occurrences") {
  KeywordModel m;
  m.tokenizer_id = std::string(Tokenizer::kId);
  m.keywords = {"pay", "now"};
  Transcript t{"t", Label::kScam, {{"a", "pay pay later"}, {"b", ""}, {"c", "Now!"}}};
  auto rep = sanitize_tfidf(t, m);
  CHECK(rep.legend == m.keywords);
  REQUIRE(rep.vectors.size() == 3);
  CHECK(rep.vectors[0] == std::vector<std::int64_t>{2, 0});
  CHECK(rep.vectors[1] == std::vector<std::int64_t>{0, 0});
  CHECK(rep.vectors[2] == std::vector<std::int64_t>{0, 1});
}

TEST_CASE("summaries carry the instruction and are post-filtered") {
  CountingSummarizer backend;
  auto rep = sanitize_summary(one("please wire the money"), backend, &det());
  CHECK(backend.calls == 1);
  CHECK(backend.last_instruction.find("excluding personal names, identifiers, contact information") !=
        std::string::npos);
  CHECK(rep.kind == SanitizedRepresentation::Kind::kSummary);
  CHECK(rep.text->find("Wang") == std::string::npos);
  CHECK(rep.text->find("13800001111") == std::string::npos);
  CHECK(rep.text->find("[PHONE]") != std::string::npos);

  Transcript empty{"e", std::nullopt, {}};
  auto blank = sanitize_summary(empty, backend, &det());
  CHECK(backend.calls == 1);
  CHECK(blank.text == std::string());
}

TEST_CASE("extractive summaries are deterministic") {
  auto corpus = testing::CorpusGenerator(12).corpus(5);
  ExtractiveSummarizer ex;
  for (const auto& t : corpus.transcripts) {
    auto a = sanitize_summary(t, ex, &det());
    auto b = sanitize_summary(t, ex, &det());
    CHECK(a == b);
    CHECK_FALSE(a.text->empty());
  }
}

TEST_CASE("extractive summary keeps top sentences in order") {
  ExtractiveSummarizer ex({}, 2);
  const std::string text =
      "a: One two. Three four five six seven.\n"
      "b: Short. Mail x.y@ab.com today please now ok.\n";
  CHECK(ex.summarize(text, "") == "Three four five six seven. Mail x.y@ab.com today please now ok.");
}

TEST_CASE("registry lookups") {
  auto r = SanitizerRegistry::with_builtins();
  CHECK(r.names() == std::vector<std::string>{"passthrough", "pii_mask", "pii_stat", "summarize",
                                              "tfidf_keywords"});
  try {
    r.lookup("redact_all", {});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("pii_mask") != std::string::npos);
  }
  CHECK_THROWS_AS(r.lookup("tfidf_keywords", {}), ConfigError);
  CHECK_THROWS_AS(r.add("pii_mask", [](const SanitizerConfig&) { return nullptr; }), ConfigError);
  CHECK(r.lookup("passthrough", {})->sanitize(one("x")).text == "caller: x\n");
}

TEST_CASE("plugins register while lookups run") {
  auto r = SanitizerRegistry::with_builtins();
  struct Upper final : Sanitizer {
    std::string name() const override { return "upper"; }
    SanitizedRepresentation sanitize(const Transcript& t) const override {
      return SanitizedRepresentation::make_text("upper", ascii_lower(join_transcript(t)));
    }
  };
  std::atomic<int> found{0};
  std::thread reader([&] {
    for (int i = 0; i < 2000; ++i) found += r.contains("pii_mask");
  });
  for (int i = 0; i < 50; ++i) {
    r.add("plugin" + std::to_string(i), [](const SanitizerConfig&) { return std::make_unique<Upper>(); });
  }
  reader.join();
  CHECK(found == 2000);
  CHECK(r.lookup("plugin7", {})->name() == "upper");
}

TEST_CASE("sanitizer config json") {
  auto cfg = sanitizer_config_from_json(
      {{"detector", {{"gazetteer", {{"NAME", {"Zed"}}}}}}, {"summary_post_filter", false}}, "");
  CHECK_FALSE(cfg.summary_post_filter);
  CHECK(cfg.detector_or_default().mask("Zed") == "[NAME]");
  CHECK_THROWS_AS(sanitizer_config_from_json(nlohmann::json::array(), ""), ConfigError);
}

TEST_CASE("textualize renders vectors as repeated legend labels") {
  auto rep = SanitizedRepresentation::make_vector("v", {"PHONE", "NAME"}, {{2, 1}, {0, 0}});
  CHECK(textualize(rep) == "PHONE PHONE NAME\n");
  CHECK(textualize(SanitizedRepresentation::make_text("p", "x")) == "x");
}
