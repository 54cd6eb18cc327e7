#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "mask/keywords.hpp"

namespace mask {

class Detector;
class SimilarityBackend;

/// "mock" takes a MockRule object; "remote" takes an endpoint config object
/// or a path to one.
std::unique_ptr<Detector> make_detector(const std::string& name, const nlohmann::json& config,
                                        const std::filesystem::path& base_dir);

/// "lexical" or "embedding" (the latter takes an endpoint config).
std::unique_ptr<SimilarityBackend> make_similarity(const std::string& name,
                                                   const nlohmann::json& config);

/// What `mask benchmark` runs. Loaded from JSON:
///
///   {"corpus": "corpus.jsonl",
///    "strategies": "all" | ["pii_mask", ...],
///    "detector": {"name": "mock" | "remote", "config": {...} | "path"},
///    "similarity": "lexical" | "embedding", "similarity_config": {...},
///    "sanitizer": {...sanitizer config...},
///    "n_top": 100, "jobs": 0,
///    "output_json": "report.json", "output_table": "report.txt"}
///
/// Relative paths resolve against the spec file's directory.
struct BenchmarkSpec {
  std::filesystem::path corpus;
  std::vector<std::string> strategies;
  std::string detector_name = "mock";
  nlohmann::json detector_config = nlohmann::json::object();
  std::string similarity = "lexical";
  nlohmann::json similarity_config = nlohmann::json::object();
  nlohmann::json sanitizer_config = nlohmann::json::object();
  std::size_t n_top = kDefaultTopN;
  int jobs = 0;
  std::filesystem::path output_json;
  std::filesystem::path output_table;
  std::filesystem::path base_dir;

  static BenchmarkSpec from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  static BenchmarkSpec load(const std::filesystem::path& path);
};

/// Runs sanitize -> PRR/SRR -> detection for every strategy. Stage failures
/// are recorded in the row; the remaining rows still run.
nlohmann::ordered_json run_benchmark(const BenchmarkSpec& spec);

/// Text table with columns Sanitization, Model, Acc., P., R., F1, PRR, SRR,
/// rendered only from the report JSON.
std::string render_table(const nlohmann::ordered_json& report);

}  // namespace mask
