#include "mask/detector.hpp"

#include <algorithm>
#include <fstream>

#include <omp.h>

#include "mask/error.hpp"
#include "mask/text.hpp"

namespace mask {

namespace {

bool is_word_term(std::string_view term) {
  return !term.empty() && std::all_of(term.begin(), term.end(), [](char c) { return is_ascii_alnum(c); });
}

bool contains_word(std::string_view hay, std::string_view word) {
  std::size_t pos = 0;
  while ((pos = hay.find(word, pos)) != std::string_view::npos) {
    const bool left = pos == 0 || !is_ascii_alnum(hay[pos - 1]);
    const std::size_t end = pos + word.size();
    const bool right = end >= hay.size() || !is_ascii_alnum(hay[end]);
    if (left && right) return true;
    ++pos;
  }
  return false;
}

std::vector<std::string> ascii_words(std::string_view text) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : text) {
    if (is_ascii_alnum(c)) {
      cur.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
    } else if (!cur.empty()) {
      words.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

// ---------------------------------------------------------------------------
// Mock

MockRule MockRule::defaults() {
  return {{"transfer", "police", "urgent", "verify", "verification", "arrest", "warrant", "fee",
           "refund", "investigation", "safe account", "prize", "customs", "parcel", "frozen",
           "penalty", "immediately", "secret", "转账", "警察", "公安", "验证码", "安全账户", "冻结",
           "退款", "中奖", "洗钱", "逮捕"},
          2};
}

MockRule MockRule::from_json(const nlohmann::json& j) {
  try {
    MockRule r = defaults();
    if (auto it = j.find("triggers"); it != j.end()) r.triggers = it->get<std::vector<std::string>>();
    r.min_triggers = j.value("min_triggers", r.min_triggers);
    if (r.min_triggers < 1) throw ConfigError("min_triggers must be >= 1");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("mock rule: ") + e.what());
  }
}

Label classify_mock(const SanitizedRepresentation& rep, const MockRule& rule) {
  const auto text = ascii_lower(textualize(rep));
  int hits = 0;
  for (const auto& trigger : rule.triggers) {
    const auto t = ascii_lower(trigger);
    if (t.empty()) continue;
    const bool found = is_word_term(t) ? contains_word(text, t) : text.find(t) != std::string::npos;
    if (found && ++hits >= rule.min_triggers) return Label::kScam;
  }
  return Label::kNormal;
}

Verdict MockDetector::classify(const SanitizedRepresentation& rep) const {
  return {classify_mock(rep, rule_), "trigger rule", 1, std::chrono::milliseconds(0)};
}

// ---------------------------------------------------------------------------
// Remote

std::string default_detector_prompt() {
  return "You are a phone scam detection assistant. The call below was sanitized for privacy: "
         "placeholders such as [NAME] or [PHONE] replace personal details, and some inputs are "
         "keyword counts or a short summary instead of the full conversation.\n"
         "Decide whether the call is a scam. Reply with exactly one word on the first line, "
         "SCAM or NORMAL, then one sentence giving the reason.\n\n```\n{payload}\n```";
}

void DetectorEndpointConfig::validate() const {
  std::size_t count = 0;
  for (auto pos = prompt_template.find(kPayloadPlaceholder); pos != std::string::npos;
       pos = prompt_template.find(kPayloadPlaceholder, pos + 1)) {
    ++count;
  }
  if (count != 1) {
    throw ConfigError("prompt_template must contain exactly one " + std::string(kPayloadPlaceholder) +
                      ", found " + std::to_string(count));
  }
  if (endpoint.timeout.count() <= 0) throw ConfigError("timeout must be positive");
  if (max_concurrency < 1) throw ConfigError("max_concurrency must be >= 1");
  if (endpoint.max_retries < 0) throw ConfigError("max_retries must be >= 0");
}

DetectorEndpointConfig DetectorEndpointConfig::from_json(const nlohmann::json& j) {
  DetectorEndpointConfig c;
  c.endpoint = chat_endpoint_from_json(j);
  try {
    c.prompt_template = j.value("prompt_template", default_detector_prompt());
    c.max_concurrency = j.value("max_concurrency", 4);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("endpoint config: ") + e.what());
  }
  c.validate();
  return c;
}

DetectorEndpointConfig DetectorEndpointConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open endpoint config " + path);
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("endpoint config " + path + ": " + e.what());
  }
}

std::optional<ParsedVerdict> parse_verdict(const std::string& reply) {
  const auto words = ascii_words(reply);
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto& w = words[i];
    std::optional<Label> label;
    if (w == "scam" || w == "fraud" || w == "fraudulent") label = Label::kScam;
    if (w == "normal" || w == "legitimate") label = Label::kNormal;
    if (!label) continue;
    const bool negated = (i >= 1 && words[i - 1] == "not") ||
                         (i >= 2 && words[i - 2] == "not" && (words[i - 1] == "a" || words[i - 1] == "an"));
    if (negated) return std::nullopt;

    auto rationale = trim(reply);
    auto lower = ascii_lower(rationale);
    if (auto pos = lower.find("reason:"); pos != std::string::npos) {
      rationale = trim(std::string_view(rationale).substr(pos + 7));
    }
    return ParsedVerdict{*label, std::move(rationale)};
  }
  return std::nullopt;
}

Verdict classify_remote(const SanitizedRepresentation& rep, const DetectorEndpointConfig& config) {
  config.validate();
  auto prompt = config.prompt_template;
  prompt.replace(prompt.find(kPayloadPlaceholder), kPayloadPlaceholder.size(), textualize(rep));

  const auto backend = "detector:" + config.endpoint.model_name;
  auto result = chat_complete(config.endpoint, prompt, backend, [](const std::string& content) {
    return parse_verdict(content) ? std::string{} : "no unambiguous verdict in reply: " + content;
  });
  auto parsed = parse_verdict(result.content);
  return {parsed->label, std::move(parsed->rationale), result.attempts, result.latency};
}

RemoteDetector::RemoteDetector(DetectorEndpointConfig config) : config_(std::move(config)) {
  config_.validate();
}

Verdict RemoteDetector::classify(const SanitizedRepresentation& rep) const {
  return classify_remote(rep, config_);
}

// ---------------------------------------------------------------------------
// Batch

DetectionRun run_detection(const std::vector<SanitizedOutput>& outputs, const Detector& detector,
                           const std::map<std::string, Label>& labels) {
  if (outputs.empty()) throw DataError("detection needs at least one item");
  DetectionRun run;
  run.items.resize(outputs.size());
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    auto it = labels.find(outputs[i].id);
    if (it == labels.end()) throw DataError("no label for \"" + outputs[i].id + "\"");
    run.items[i].id = outputs[i].id;
    run.items[i].label = it->second;
  }

  const auto n = static_cast<std::int64_t>(outputs.size());
  const int threads = std::max(1, detector.max_concurrency());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::int64_t i = 0; i < n; ++i) {
    auto& item = run.items[i];
    try {
      auto v = detector.classify(outputs[i].representation);
      item.verdict = v.label;
      item.rationale = std::move(v.rationale);
      item.attempts = v.attempts;
      item.latency = v.latency;
    } catch (const std::exception& e) {
      item.error = e.what();
    }
  }

  std::vector<Label> predictions;
  std::vector<Label> gold;
  for (const auto& item : run.items) {
    if (item.verdict) {
      predictions.push_back(*item.verdict);
      gold.push_back(item.label);
    } else {
      run.excluded_ids.push_back(item.id);
    }
  }
  if (!predictions.empty()) run.report = compute_classification(predictions, gold);
  return run;
}

nlohmann::ordered_json detection_run_json(const std::string& model, const DetectionRun& run,
                                          bool include_timings) {
  nlohmann::ordered_json j;
  if (run.report) {
    j["classification"] = classification_json(model, *run.report);
  } else {
    j["classification"] = {{"model", model}, {"status", "failed"}};
  }
  j["excluded"] = run.excluded_ids;
  auto& items = j["items"] = nlohmann::ordered_json::array();
  for (const auto& item : run.items) {
    nlohmann::ordered_json o;
    o["id"] = item.id;
    o["label"] = to_string(item.label);
    if (item.verdict) {
      o["verdict"] = to_string(*item.verdict);
      o["rationale"] = item.rationale;
    } else {
      o["verdict"] = nullptr;
      o["error"] = item.error;
    }
    if (include_timings) {
      o["attempts"] = item.attempts;
      o["latency_ms"] = item.latency.count();
    }
    items.push_back(std::move(o));
  }
  return j;
}

}  // namespace mask
