#include "mask/adapter.hpp"

#include <cmath>
#include <fstream>

#include "mask/error.hpp"
#include "mask/sanitizer.hpp"

namespace mask {

RiskTolerance::RiskTolerance(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw ConfigError("risk tolerance must lie in [0, 1], got " + std::to_string(value));
  }
}

std::map<std::string, int> default_srr_rank() {
  return {{"pii_stat", 0}, {"tfidf_keywords", 1}, {"summarize", 2}, {"pii_mask", 3}, {"passthrough", 4}};
}

PolicyProfile PolicyProfile::defaults() {
  PolicyProfile p;
  p.bands = {
      {0.2, "pii_stat"}, {0.4, "tfidf_keywords"}, {0.6, "summarize"}, {0.9, "pii_mask"}, {1.0, "passthrough"},
  };
  p.srr_rank = default_srr_rank();
  return p;
}

PolicyProfile PolicyProfile::from_json(const nlohmann::json& j) {
  try {
    PolicyProfile p;
    for (const auto& b : j.at("bands")) {
      p.bands.push_back({b.at("upper").get<double>(), b.at("strategy").get<std::string>(),
                         b.value("config", nlohmann::json::object())});
    }
    if (auto it = j.find("srr_rank"); it != j.end()) {
      p.srr_rank = it->get<std::map<std::string, int>>();
    } else {
      p.srr_rank = default_srr_rank();
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("profile: ") + e.what());
  }
}

PolicyProfile PolicyProfile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open profile " + path);
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("profile " + path + ": " + e.what());
  }
}

nlohmann::ordered_json PolicyProfile::to_json() const {
  nlohmann::ordered_json j;
  auto& bands_json = j["bands"] = nlohmann::ordered_json::array();
  for (const auto& b : bands) {
    nlohmann::ordered_json o;
    o["upper"] = b.upper;
    o["strategy"] = b.strategy;
    o["config"] = nlohmann::ordered_json::parse(b.config.dump());
    bands_json.push_back(std::move(o));
  }
  auto& rank = j["srr_rank"] = nlohmann::ordered_json::object();
  for (const auto& [name, r] : srr_rank) rank[name] = r;
  return j;
}

std::vector<std::string> validate_profile(const PolicyProfile& profile,
                                          const SanitizerRegistry& registry) {
  std::vector<std::string> out;
  if (profile.bands.empty()) {
    out.emplace_back("profile has no bands; [0, 1] is not covered");
    return out;
  }
  auto label = [&](std::size_t i) {
    return "band " + std::to_string(i) + " (" + profile.bands[i].strategy + ")";
  };

  double prev_upper = 0.0;
  const int* prev_rank = nullptr;
  for (std::size_t i = 0; i < profile.bands.size(); ++i) {
    const auto& b = profile.bands[i];
    if (!(b.upper > 0.0 && b.upper <= 1.0)) {
      out.push_back(label(i) + ": upper bound " + std::to_string(b.upper) + " outside (0, 1]");
    }
    if (i > 0 && !(b.upper > prev_upper)) {
      out.push_back(label(i) + ": upper bound " + std::to_string(b.upper) +
                    " does not exceed the previous bound " + std::to_string(prev_upper));
    }
    prev_upper = b.upper;

    if (!registry.contains(b.strategy)) {
      out.push_back(label(i) + ": strategy is not registered");
    }
    auto rank = profile.srr_rank.find(b.strategy);
    if (rank == profile.srr_rank.end()) {
      out.push_back(label(i) + ": strategy has no srr_rank");
    } else {
      if (prev_rank && rank->second < *prev_rank) {
        out.push_back(label(i) + ": srr_rank " + std::to_string(rank->second) +
                      " is lower than the previous band's " + std::to_string(*prev_rank) +
                      " (monotonicity)");
      }
      prev_rank = &rank->second;
    }
  }
  if (profile.bands.back().upper != 1.0) {
    out.push_back(label(profile.bands.size() - 1) + ": bands end at " +
                  std::to_string(profile.bands.back().upper) + ", not 1.0 (coverage)");
  }
  return out;
}

StrategySelection select_strategy(RiskTolerance r, const PolicyProfile& profile,
                                  const SanitizerRegistry& registry) {
  if (profile.bands.empty()) throw ConfigError("profile has no bands");
  const PolicyBand* chosen = &profile.bands.back();
  for (const auto& b : profile.bands) {
    if (r.value() < b.upper) {
      chosen = &b;
      break;
    }
  }
  if (!registry.contains(chosen->strategy)) {
    throw ConfigError("profile selects unregistered strategy \"" + chosen->strategy + "\"");
  }
  return {chosen->strategy, chosen->config};
}

}  // namespace mask
