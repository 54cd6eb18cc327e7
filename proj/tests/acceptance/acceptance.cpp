// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "mask/adapter.hpp"
#include "mask/detector.hpp"
#include "mask/jsonl.hpp"
#include "mask/keywords.hpp"
#include "mask/metrics.hpp"
#include "mask/parallel.hpp"
#include "mask/pii.hpp"
#include "mask/sanitizer.hpp"
#include "mask/stub_server.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

#ifndef MASK_CLI_PATH
#error "MASK_CLI_PATH must point at the mask executable"
#endif

namespace fs = std::filesystem;
using namespace mask;

namespace {

constexpr double kSrrTolerance = 1e-9;     // passthrough SRR and fixture values
constexpr double kTfidfTolerance = 1e-9;   // oracle scores
constexpr double kPassthroughBudgetS = 1.0;
constexpr double kBenchmarkBudgetS = 30.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

void fail(Outcome& o, const std::string& why) {
  if (o.pass) o.detail = why;
  o.pass = false;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

struct Scores {
  double prr;
  double srr;
};

/// Sanitizes with every built-in strategy, keywords fitted privately on the corpus.
std::map<std::string, Scores> score_all(const Corpus& corpus, const SimilarityBackend& sim) {
  const auto& detector = *PiiDetector::defaults();
  SanitizerConfig cfg;
  cfg.keyword_model = std::make_shared<const KeywordModel>(
      fit_private_keywords(corpus, kDefaultTopN, detector).model);
  const auto registry = SanitizerRegistry::with_builtins();
  std::map<std::string, Scores> out;
  for (const auto& name : builtin_strategy_names()) {
    auto s = registry.lookup(name, cfg);
    auto sanitized = kernels::sanitize_corpus(*s, corpus);
    out[name] = {compute_prr(corpus, sanitized, detector).prr,
                 compute_srr(corpus, sanitized, sim).srr};
  }
  return out;
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  Outcome o;
  StubChatServer stub({});
  stub.start();
  ChatEndpoint ep;
  ep.base_url = stub.base_url();
  ep.model_name = "stub-embed";
  ep.max_retries = 0;
  LexicalCosine lexical;
  EmbeddingSimilarity embedding(ep);
  const auto registry = SanitizerRegistry::with_builtins();
  const auto passthrough = registry.lookup("passthrough", {});
  const auto& detector = *PiiDetector::defaults();

  double worst_time = 0;
  for (std::uint32_t seed = 1; seed <= 5; ++seed) {
    auto corpus = testing::CorpusGenerator(seed).corpus(50);
    const auto t0 = std::chrono::steady_clock::now();
    auto sanitized = kernels::sanitize_corpus(*passthrough, corpus);
    auto privacy = compute_prr(corpus, sanitized, detector);
    auto utility = compute_srr(corpus, sanitized, lexical);
    worst_time = std::max(worst_time, seconds_since(t0));
    if (privacy.raw_pii_total < 1) fail(o, "generated corpus has no PII");
    if (privacy.prr != 0.0) fail(o, fmt("PRR %.6f != 0", privacy.prr));
    if (std::fabs(utility.srr - 1.0) > kSrrTolerance) fail(o, fmt("lexical SRR %.12f", utility.srr));
    auto emb = compute_srr(corpus, sanitized, embedding);
    if (std::fabs(emb.srr - 1.0) > kSrrTolerance) fail(o, fmt("embedding SRR %.12f", emb.srr));
  }
  stub.stop();
  if (worst_time >= kPassthroughBudgetS) fail(o, fmt("passthrough run took %.3f s", worst_time));
  if (o.pass) o.detail = fmt("5 corpora x 50, PRR 0, SRR 1 (lexical, embedding), worst %.3f s", worst_time);
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto& detector = *PiiDetector::defaults();
  std::size_t transcripts = 0;
  for (std::uint32_t seed = 100; seed < 108; ++seed) {
    auto corpus = testing::CorpusGenerator(seed).corpus(30);
    transcripts += corpus.size();
    // Default keyword budget and an unbounded one that keeps the whole vocabulary.
    for (std::size_t n_top : {kDefaultTopN, std::size_t{1000000}}) {
      auto model = fit_private_keywords(corpus, n_top, detector).model;
      std::vector<SanitizedOutput> tfidf, stat;
      for (const auto& t : corpus.transcripts) {
        tfidf.push_back({t.id, sanitize_tfidf(t, model)});
        stat.push_back({t.id, sanitize_pii_stat(t, detector)});
      }
      const auto p_tfidf = compute_prr(corpus, tfidf, detector);
      const auto p_stat = compute_prr(corpus, stat, detector);
      if (p_tfidf.prr != 1.0) fail(o, fmt("tfidf PRR %.6f (seed %.0f)", p_tfidf.prr, seed));
      if (p_stat.prr != 1.0) fail(o, fmt("pii_stat PRR %.6f (seed %.0f)", p_stat.prr, seed));
      if (p_tfidf.raw_pii_total == 0) fail(o, "corpus without PII");
    }
  }
  if (transcripts < 200) fail(o, "fewer than 200 transcripts");
  if (o.pass) o.detail = std::to_string(transcripts) + " transcripts, both PRR exactly 1";
  return o;
}

Outcome criterion3() {
  Outcome o;
  LexicalCosine lexical;
  auto corpus = testing::CorpusGenerator(7).corpus(60);
  auto s = score_all(corpus, lexical);
  if (s["pii_mask"].prr != 1.0) fail(o, fmt("pii_mask PRR %.6f", s["pii_mask"].prr));
  if (!(s["pii_mask"].srr > s["tfidf_keywords"].srr)) {
    fail(o, fmt("SRR mask %.4f <= tfidf %.4f", s["pii_mask"].srr, s["tfidf_keywords"].srr));
  }
  if (!(s["pii_mask"].srr > s["pii_stat"].srr)) {
    fail(o, fmt("SRR mask %.4f <= pii_stat %.4f", s["pii_mask"].srr, s["pii_stat"].srr));
  }
  if (o.pass) {
    o.detail = fmt("PRR 1, SRR mask %.3f > tfidf %.3f > stat %.3f", s["pii_mask"].srr,
                   s["tfidf_keywords"].srr, s["pii_stat"].srr);
  }
  return o;
}

Outcome criterion4() {
  Outcome o;
  LexicalCosine lexical;
  const int n_corpora = 20;
  double min_gap = 1e9;
  for (int k = 0; k < n_corpora; ++k) {
    testing::CorpusGenerator gen(1000 + k);
    auto corpus = gen.corpus(20 + gen.pick(21));
    auto s = score_all(corpus, lexical);
    const double pass = s["passthrough"].srr, msk = s["pii_mask"].srr, sum = s["summarize"].srr,
                 tf = s["tfidf_keywords"].srr;
    if (!(pass >= msk && msk >= sum && sum >= tf)) {
      fail(o, "corpus " + std::to_string(k) + fmt(": pass %.4f mask %.4f summ %.4f", pass, msk, sum) +
                  fmt(" tfidf %.4f", tf));
    }
    min_gap = std::min({min_gap, msk - sum, sum - tf});
  }
  if (o.pass) o.detail = std::to_string(n_corpora) + " corpora ordered, smallest gap " + fmt("%.3f", min_gap);
  return o;
}

Outcome criterion5() {
  Outcome o;
  std::mt19937 rng(5);
  const int cases = 200;
  for (int c = 0; c < cases && o.pass; ++c) {
    const std::size_t vocab_size = 1 + rng() % 50;
    std::vector<std::string> vocab;
    for (std::size_t v = 0; v < vocab_size; ++v) {
      std::string w = "w";
      for (std::size_t x = v;; x /= 26) {
        w += static_cast<char>('a' + x % 26);
        if (x < 26) break;
      }
      vocab.push_back(w);
    }
    const std::size_t n_docs = 2 + rng() % 9;
    Corpus corpus;
    std::vector<std::string> docs;
    std::vector<bool> scam;
    for (std::size_t d = 0; d < n_docs; ++d) {
      const bool is_scam = d == 0 ? true : d == 1 ? false : (rng() % 2 == 0);
      Transcript t;
      t.id = "d" + std::to_string(d);
      t.label = is_scam ? Label::kScam : Label::kNormal;
      std::string all;
      const int n_utt = 1 + rng() % 3;
      for (int u = 0; u < n_utt; ++u) {
        std::string text;
        const int len = 1 + rng() % 8;
        for (int w = 0; w < len; ++w) text += (w ? " " : "") + vocab[rng() % vocab.size()];
        t.utterances.push_back({"s", text});
        all += " " + text;
      }
      docs.push_back(all);
      scam.push_back(is_scam);
      corpus.transcripts.push_back(t);
    }
    const std::size_t n_top = 1 + rng() % 60;
    auto fit = fit_keywords(corpus, n_top);
    auto expected = oracle::tfidf_ranking(docs, scam, n_top);
    if (fit.model.keywords.size() != expected.size()) {
      fail(o, "case " + std::to_string(c) + ": keyword count differs");
      break;
    }
    for (std::size_t i = 0; i < expected.size(); ++i) {
      const auto& got = fit.model.stats[i];
      if (got.token != expected[i].token) {
        fail(o, "case " + std::to_string(c) + ": rank " + std::to_string(i) + " is " + got.token +
                    ", oracle says " + expected[i].token);
        break;
      }
      if (std::fabs(got.mean_scam - expected[i].mean_scam) > kTfidfTolerance ||
          std::fabs(got.mean_normal - expected[i].mean_normal) > kTfidfTolerance ||
          std::fabs(got.abs_diff - expected[i].abs_diff) > kTfidfTolerance) {
        fail(o, "case " + std::to_string(c) + ": score mismatch for " + got.token);
        break;
      }
    }
  }
  if (o.pass) o.detail = std::to_string(cases) + " random corpora match the brute-force ranking";
  return o;
}

Outcome criterion6() {
  Outcome o;
  Corpus raw;
  raw.transcripts = {
      {"f1", Label::kScam, {{"a", "call 13812345678 now"}}},
      {"f2", Label::kNormal, {{"b", "mail user@mail.com or visit www.abc.com"}}},
      {"f3", Label::kNormal, {{"c", "hello there"}}},
  };
  std::vector<SanitizedOutput> sanitized = {
      {"f1", SanitizedRepresentation::make_text("fixture", "a: call [PHONE] now")},
      {"f2", SanitizedRepresentation::make_text("fixture", "b: mail [EMAIL] or visit www.abc.com")},
      {"f3", SanitizedRepresentation::make_vector("fixture", {"hello", "there"}, {{2, 0}})},
  };
  // PII: raw 1 + 2 + 0, sanitized 0 + 1 + 0.
  const double prr_expected = 1.0 - 1.0 / 3.0;
  // Token counts by hand (speaker included):
  //  f1 {a,call,13812345678,now} vs {a,call,phone,now}:        3 / (2 * 2)
  //  f2 {b,mail,user,mail,com x2,or,visit,www,abc} vs masked:   see below
  //  f3 {c,hello,there} vs {hello x2}:                         2 / (sqrt 3 * 2)
  // f2 raw counts: b1 mail2 user1 com2 or1 visit1 www1 abc1 -> norm^2 14
  //    sanitized:  b1 mail1 email1 or1 visit1 www1 abc1 com1 -> norm^2 8, dot 2+1+1+1+1+1+2 = 9
  const double sims[3] = {3.0 / 4.0, 9.0 / std::sqrt(14.0 * 8.0), 2.0 / (std::sqrt(3.0) * 2.0)};
  const double srr_expected = (sims[0] + sims[1] + sims[2]) / 3.0;

  std::map<std::string, int> f2_raw = {{"b", 1}, {"mail", 2}, {"user", 1}, {"com", 2},
                                       {"or", 1}, {"visit", 1}, {"www", 1}, {"abc", 1}};
  std::map<std::string, int> f2_san = {{"b", 1}, {"mail", 1}, {"email", 1}, {"or", 1},
                                       {"visit", 1}, {"www", 1}, {"abc", 1}, {"com", 1}};
  if (std::fabs(oracle::cosine(f2_raw, f2_san) - sims[1]) > kSrrTolerance) {
    fail(o, "hand arithmetic disagrees with the cosine oracle");
  }

  const auto privacy = compute_prr(raw, sanitized, *PiiDetector::defaults());
  const auto utility = compute_srr(raw, sanitized, LexicalCosine{});
  if (privacy.raw_pii_total != 3 || privacy.sanitized_pii_total != 1) {
    fail(o, fmt("PII totals raw %.0f sanitized %.0f", privacy.raw_pii_total,
                privacy.sanitized_pii_total));
  }
  if (std::fabs(privacy.prr - prr_expected) > kSrrTolerance) fail(o, fmt("PRR %.12f", privacy.prr));
  for (int i = 0; i < 3; ++i) {
    if (std::fabs(utility.per_transcript_sims[i].sim - sims[i]) > kSrrTolerance) {
      fail(o, fmt("sim[%.0f] %.12f vs %.12f", i, utility.per_transcript_sims[i].sim, sims[i]));
    }
  }
  if (std::fabs(utility.srr - srr_expected) > kSrrTolerance) fail(o, fmt("SRR %.12f", utility.srr));
  if (o.pass) o.detail = fmt("PRR %.9f, SRR %.9f", privacy.prr, utility.srr);
  return o;
}

Outcome criterion7() {
  Outcome o;
  const int n = 8;
  long checked = 0;
  for (unsigned pm = 0; pm < (1u << n) && o.pass; ++pm) {
    for (unsigned lm = 0; lm < (1u << n); ++lm) {
      std::vector<Label> pred(n), gold(n);
      for (int i = 0; i < n; ++i) {
        pred[i] = (pm >> i & 1) ? Label::kScam : Label::kNormal;
        gold[i] = (lm >> i & 1) ? Label::kScam : Label::kNormal;
      }
      const auto c = oracle::confusion(pred, gold);
      const double acc = double(c.tp + c.tn) / n;
      const double p = (c.tp + c.fp) ? double(c.tp) / double(c.tp + c.fp) : 0.0;
      const double r = (c.tp + c.fn) ? double(c.tp) / double(c.tp + c.fn) : 0.0;
      const double f1 = (p + r) > 0 ? 2 * p * r / (p + r) : 0.0;
      const auto got = compute_classification(pred, gold);
      const bool same = got.confusion.tp == c.tp && got.confusion.fp == c.fp &&
                        got.confusion.tn == c.tn && got.confusion.fn == c.fn &&
                        got.accuracy == acc && got.precision == p && got.recall == r &&
                        got.f1 == f1 && got.precision_undefined == (c.tp + c.fp == 0) &&
                        got.recall_undefined == (c.tp + c.fn == 0);
      if (!same) {
        fail(o, "mismatch at predictions " + std::to_string(pm) + ", labels " + std::to_string(lm));
        break;
      }
      ++checked;
    }
  }
  if (o.pass) o.detail = std::to_string(checked) + " combinations exact";
  return o;
}

Outcome criterion8() {
  Outcome o;
  const auto registry = SanitizerRegistry::with_builtins();
  const auto profile = PolicyProfile::defaults();
  auto rank = [&](double r) {
    return profile.srr_rank.at(select_strategy(RiskTolerance(r), profile, registry).strategy);
  };
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    double a = u(rng), b = u(rng);
    // Some pairs sit exactly on band edges and endpoints.
    if (i % 10 == 0) a = std::vector<double>{0.0, 0.2, 0.4, 0.6, 0.9}[i / 10 % 5];
    if (i % 13 == 0) b = 1.0;
    if (a > b) std::swap(a, b);
    if (rank(a) > rank(b)) {
      fail(o, fmt("rank(select(%.6f)) > rank(select(%.6f))", a, b));
      break;
    }
  }
  const auto lo = select_strategy(RiskTolerance(0.0), profile, registry).strategy;
  const auto hi = select_strategy(RiskTolerance(1.0), profile, registry).strategy;
  if (lo != "pii_stat") fail(o, "r=0 selects " + lo);
  if (hi != "passthrough") fail(o, "r=1 selects " + hi);
  if (o.pass) o.detail = "1000 pairs monotone; r=0 -> pii_stat, r=1 -> passthrough";
  return o;
}

Outcome criterion9() {
  Outcome o;
  const std::vector<std::string> canaries = {"13987654321", "canary.zqx@leakmail.com",
                                             "Chan Tai Man", "www.canary-zqx.net"};
  testing::CorpusGenerator gen(9);
  auto corpus = gen.corpus(12);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto& u = corpus.transcripts[i].utterances.front();
    u.text += " Please note " + canaries[i % canaries.size()] + " for later.";
  }
  std::map<std::string, Label> labels;
  for (const auto& t : corpus.transcripts) labels[t.id] = *t.label;

  SanitizerConfig cfg;
  cfg.keyword_model = std::make_shared<const KeywordModel>(
      fit_private_keywords(corpus, kDefaultTopN, *PiiDetector::defaults()).model);
  const auto registry = SanitizerRegistry::with_builtins();

  std::vector<std::string> checked;
  for (const auto& name : builtin_strategy_names()) {
    StubChatServer stub({{"", "Verdict: scam. Reason: stub", 0, 503}});
    stub.start();
    DetectorEndpointConfig dc;
    dc.endpoint.base_url = stub.base_url();
    dc.endpoint.model_name = "stub";
    dc.endpoint.max_retries = 0;
    RemoteDetector detector(dc);
    auto sanitized = kernels::sanitize_corpus(*registry.lookup(name, cfg), corpus);
    auto run = run_detection(sanitized, detector, labels);
    stub.stop();
    const auto bodies = stub.request_bodies();
    if (bodies.size() != corpus.size()) fail(o, name + ": expected one request per transcript");
    std::size_t hits = 0;
    for (const auto& body : bodies) {
      for (const auto& c : canaries) hits += body.find(c) != std::string::npos;
    }
    if (name == "passthrough") {
      if (hits < corpus.size()) fail(o, "passthrough requests did not carry the canaries");
    } else if (hits > 0) {
      fail(o, name + ": canary found in " + std::to_string(hits) + " request bodies");
    }
    checked.push_back(name);
  }
  if (o.pass) o.detail = std::to_string(checked.size()) + " strategies, canaries only in passthrough bodies";
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion10() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / ("mask_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  save_corpus(testing::CorpusGenerator(10).corpus(50), dir / "corpus.jsonl");
  std::string reports[2][2];
  double worst = 0;
  for (int run = 0; run < 2; ++run) {
    const std::string tag = std::to_string(run);
    nlohmann::json spec = {{"corpus", "corpus.jsonl"},
                           {"strategies", "all"},
                           {"detector", {{"name", "mock"}}},
                           {"output_json", "report" + tag + ".json"},
                           {"output_table", "report" + tag + ".txt"}};
    std::ofstream(dir / ("spec" + tag + ".json")) << spec.dump(2);
    const std::string cmd = std::string("\"") + MASK_CLI_PATH + "\" benchmark --spec \"" +
                            (dir / ("spec" + tag + ".json")).string() + "\" > \"" +
                            (dir / ("stdout" + tag)).string() + "\" 2>&1";
    const auto t0 = std::chrono::steady_clock::now();
    const int rc = std::system(cmd.c_str());
    worst = std::max(worst, seconds_since(t0));
    if (rc != 0) fail(o, "mask benchmark exited with " + std::to_string(rc) + ": " + slurp(dir / ("stdout" + tag)));
    reports[run][0] = slurp(dir / ("report" + tag + ".json"));
    reports[run][1] = slurp(dir / ("report" + tag + ".txt"));
  }
  if (reports[0][0].empty() || reports[0][1].empty()) fail(o, "reports missing");
  if (reports[0][0] != reports[1][0]) fail(o, "JSON reports differ");
  if (reports[0][1] != reports[1][1]) fail(o, "text reports differ");
  if (worst >= kBenchmarkBudgetS) fail(o, fmt("benchmark run took %.1f s", worst));
  fs::remove_all(dir);
  if (o.pass) o.detail = fmt("byte-identical reports, slowest run %.2f s", worst);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"passthrough baseline", criterion1},     {"vector strategies remove all PII", criterion2},
      {"mask privacy and utility", criterion3}, {"SRR ordering", criterion4},
      {"tf-idf oracle", criterion5},            {"PRR/SRR fixture", criterion6},
      {"classification exhaustive", criterion7}, {"adapter monotonicity", criterion8},
      {"no-leak boundary", criterion9},         {"benchmark determinism", criterion10},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::printf("criterion %2zu %-34s %s  %s\n", i + 1, criteria[i].first.c_str(),
                o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
