#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace mask {

class SanitizerRegistry;

/// User preference in [0, 1]; low values ask for aggressive sanitization.
class RiskTolerance {
 public:
  /// Throws ConfigError outside [0, 1] or for NaN.
  explicit RiskTolerance(double value);
  double value() const { return value_; }

 private:
  double value_;
};

struct PolicyBand {
  double upper;  // exclusive, except the final band which includes 1.0
  std::string strategy;
  nlohmann::json config = nlohmann::json::object();
};

struct PolicyProfile {
  std::vector<PolicyBand> bands;
  std::map<std::string, int> srr_rank;  // higher = more utility retained

  /// pii_stat | tfidf_keywords | summarize | pii_mask | passthrough with
  /// edges 0.2, 0.4, 0.6, 0.9, 1.0.
  static PolicyProfile defaults();

  /// {"bands": [{"upper", "strategy", "config"?}], "srr_rank": {...}?};
  /// a missing srr_rank takes the default ranking.
  static PolicyProfile from_json(const nlohmann::json& j);
  static PolicyProfile load(const std::string& path);
  nlohmann::ordered_json to_json() const;
};

/// Utility ranking of the built-in strategies.
std::map<std::string, int> default_srr_rank();

/// Every violated profile invariant, each naming its band. Empty when valid.
std::vector<std::string> validate_profile(const PolicyProfile& profile,
                                          const SanitizerRegistry& registry);

struct StrategySelection {
  std::string strategy;
  nlohmann::json config;
};

/// First band whose upper bound exceeds the tolerance; the last band also
/// takes 1.0. Throws ConfigError if the chosen strategy is not registered.
StrategySelection select_strategy(RiskTolerance r, const PolicyProfile& profile,
                                  const SanitizerRegistry& registry);

}  // namespace mask
