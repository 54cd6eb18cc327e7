#include "mask/harness.hpp"

#include <cstdio>
#include <fstream>

#include "mask/detector.hpp"
#include "mask/error.hpp"
#include "mask/jsonl.hpp"
#include "mask/metrics.hpp"
#include "mask/parallel.hpp"
#include "mask/sanitizer.hpp"

namespace mask {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() ? base / path : path;
}

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

nlohmann::ordered_json failed_classification(const std::string& model, const std::string& error) {
  nlohmann::ordered_json j;
  j["model"] = model;
  j["status"] = "failed";
  j["error"] = error;
  return j;
}

}  // namespace

std::unique_ptr<Detector> make_detector(const std::string& name, const nlohmann::json& config,
                                        const std::filesystem::path& base_dir) {
  if (name == "mock") {
    return std::make_unique<MockDetector>(config.is_object() ? MockRule::from_json(config)
                                                             : MockRule::defaults());
  }
  if (name == "remote") {
    if (config.is_string()) {
      return std::make_unique<RemoteDetector>(
          DetectorEndpointConfig::load(resolve(base_dir, config.get<std::string>()).string()));
    }
    return std::make_unique<RemoteDetector>(DetectorEndpointConfig::from_json(config));
  }
  throw ConfigError("unknown detector \"" + name + "\" (expected mock or remote)");
}

std::unique_ptr<SimilarityBackend> make_similarity(const std::string& name,
                                                   const nlohmann::json& config) {
  if (name == "lexical") return std::make_unique<LexicalCosine>();
  if (name == "embedding") return std::make_unique<EmbeddingSimilarity>(chat_endpoint_from_json(config));
  throw ConfigError("unknown similarity backend \"" + name + "\" (expected lexical or embedding)");
}

BenchmarkSpec BenchmarkSpec::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  try {
    BenchmarkSpec s;
    s.base_dir = base_dir;
    s.corpus = resolve(base_dir, j.at("corpus").get<std::string>());
    const auto& strategies = j.value("strategies", nlohmann::json("all"));
    if (strategies.is_string() && strategies.get<std::string>() == "all") {
      s.strategies = builtin_strategy_names();
    } else {
      s.strategies = strategies.get<std::vector<std::string>>();
    }
    if (auto it = j.find("detector"); it != j.end()) {
      s.detector_name = it->value("name", std::string("mock"));
      s.detector_config = it->value("config", nlohmann::json::object());
    }
    s.similarity = j.value("similarity", std::string("lexical"));
    s.similarity_config = j.value("similarity_config", nlohmann::json::object());
    s.sanitizer_config = j.value("sanitizer", nlohmann::json::object());
    s.n_top = j.value("n_top", kDefaultTopN);
    s.jobs = j.value("jobs", 0);
    s.output_json = resolve(base_dir, j.at("output_json").get<std::string>());
    s.output_table = resolve(base_dir, j.at("output_table").get<std::string>());

    const auto registry = SanitizerRegistry::with_builtins();
    for (const auto& name : s.strategies) {
      if (!registry.contains(name)) registry.lookup(name, {});  // throws with the known list
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("benchmark spec: ") + e.what());
  }
}

BenchmarkSpec BenchmarkSpec::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open benchmark spec " + path.string());
  try {
    return from_json(nlohmann::json::parse(in), path.parent_path());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("benchmark spec " + path.string() + ": " + e.what());
  }
}

nlohmann::ordered_json run_benchmark(const BenchmarkSpec& spec) {
  const auto corpus = load_corpus(spec.corpus);
  if (corpus.empty()) throw DataError("benchmark corpus is empty");
  std::map<std::string, Label> labels;
  for (const auto& t : corpus.transcripts) {
    if (!t.label) throw DataError("benchmark needs a labeled corpus; \"" + t.id + "\" is unlabeled");
    labels.emplace(t.id, *t.label);
  }

  auto config = sanitizer_config_from_json(spec.sanitizer_config, spec.base_dir.string());
  std::vector<std::string> fit_warnings;
  std::string fit_error;
  const bool wants_tfidf =
      std::find(spec.strategies.begin(), spec.strategies.end(), "tfidf_keywords") != spec.strategies.end();
  if (!config.keyword_model && wants_tfidf) {
    try {
      auto fit = fit_private_keywords(corpus, spec.n_top, config.detector_or_default(), spec.jobs);
      fit_warnings = fit.warnings;
      config.keyword_model = std::make_shared<const KeywordModel>(std::move(fit.model));
    } catch (const std::exception& e) {
      fit_error = e.what();
    }
  }

  std::unique_ptr<Detector> detector;
  std::string detector_error;
  std::string model_name = spec.detector_name;
  try {
    detector = make_detector(spec.detector_name, spec.detector_config, spec.base_dir);
    model_name = detector->name();
  } catch (const std::exception& e) {
    detector_error = e.what();
  }
  const auto similarity = make_similarity(spec.similarity, spec.similarity_config);
  const auto registry = SanitizerRegistry::with_builtins();
  const auto& pii = config.detector_or_default();

  nlohmann::ordered_json report;
  report["corpus_size"] = corpus.size();
  report["similarity"] = similarity->name();
  report["detector"] = model_name;
  report["keyword_fit_warnings"] = fit_warnings;
  auto& rows = report["rows"] = nlohmann::ordered_json::array();

  for (const auto& name : spec.strategies) {
    nlohmann::ordered_json row;
    try {
      if (name == "tfidf_keywords" && !fit_error.empty()) throw DataError(fit_error);
      const auto sanitizer = registry.lookup(name, config);
      const auto outputs = kernels::sanitize_corpus(*sanitizer, corpus, spec.jobs);
      const auto privacy = compute_prr(corpus, outputs, pii, spec.jobs);
      const auto utility = compute_srr(corpus, outputs, *similarity, spec.jobs, true);

      nlohmann::ordered_json cls;
      if (!detector) {
        cls = failed_classification(model_name, detector_error);
      } else {
        try {
          auto run = run_detection(outputs, *detector, labels);
          if (run.report) {
            cls = classification_json(model_name, *run.report);
            cls["excluded"] = run.excluded_ids;
          } else {
            cls = failed_classification(model_name, "every item failed");
            cls["excluded"] = run.excluded_ids;
          }
        } catch (const std::exception& e) {
          cls = failed_classification(model_name, e.what());
        }
      }
      row = strategy_report_json(name, privacy, utility, cls);
    } catch (const std::exception& e) {
      row["strategy"] = name;
      row["status"] = "failed";
      row["error"] = e.what();
    }
    rows.push_back(std::move(row));
  }
  return report;
}

std::string render_table(const nlohmann::ordered_json& report) {
  const std::vector<std::string> header = {"Sanitization", "Model", "Acc.", "P.", "R.", "F1", "PRR", "SRR"};
  std::vector<std::vector<std::string>> cells;
  for (const auto& row : report.at("rows")) {
    std::vector<std::string> r(header.size(), "-");
    r[0] = row.at("strategy").get<std::string>();
    if (row.contains("status")) {
      for (std::size_t c = 1; c < r.size(); ++c) r[c] = "failed";
    } else {
      r[6] = fmt3(row.at("prr").get<double>());
      r[7] = fmt3(row.at("srr").get<double>());
      const auto& cls = row.at("classification");
      r[1] = cls.at("model").get<std::string>();
      if (cls.contains("status")) {
        for (std::size_t c = 2; c < 6; ++c) r[c] = "failed";
      } else {
        r[2] = fmt3(cls.at("acc").get<double>());
        r[3] = fmt3(cls.at("p").get<double>());
        r[4] = fmt3(cls.at("r").get<double>());
        r[5] = fmt3(cls.at("f1").get<double>());
      }
    }
    cells.push_back(std::move(r));
  }

  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& r : cells) width[c] = std::max(width[c], r[c].size());
  }
  auto line = [&](const std::vector<std::string>& r) {
    std::string out;
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c > 0) out += " | ";
      out += r[c];
      if (c + 1 < r.size()) out.append(width[c] - r[c].size(), ' ');
    }
    return out + "\n";
  };
  std::string out = line(header);
  std::string rule;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c > 0) rule += "-+-";
    rule.append(width[c], '-');
  }
  out += rule + "\n";
  for (const auto& r : cells) out += line(r);
  return out;
}

}  // namespace mask
