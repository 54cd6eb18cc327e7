#include "mask/cli.hpp"

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mask/adapter.hpp"
#include "mask/detector.hpp"
#include "mask/error.hpp"
#include "mask/harness.hpp"
#include "mask/jsonl.hpp"
#include "mask/metrics.hpp"
#include "mask/parallel.hpp"
#include "mask/sanitizer.hpp"
#include "mask/stub_server.hpp"

namespace mask {

namespace {

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("cannot write " + path);
  os << content;
  if (!os) throw DataError("write failed: " + path);
}

std::string parent_dir(const std::string& path) {
  return std::filesystem::path(path).parent_path().string();
}

struct Options {
  // fit-keywords
  std::string corpus;
  std::size_t top_n = kDefaultTopN;
  // shared
  std::string in;
  std::string out;
  std::string config;
  int jobs = 0;
  // sanitize / adapt
  std::string strategy;
  double risk = -1.0;
  std::string profile;
  // evaluate
  std::string raw;
  std::string sanitized;
  std::string sim = "lexical";
  std::string sim_config;
  // detect
  std::string detector = "mock";
  std::string endpoint_config;
  std::string mock_config;
  std::string labels;
  bool timings = false;
  // benchmark
  std::string spec;
  // show-defaults / stub-server
  std::string what = "detector";
  std::string fixture;
  int port = 0;
};

int cmd_fit_keywords(const Options& o, std::ostream& out, std::ostream& err) {
  const auto corpus = load_corpus(o.corpus);
  SanitizerConfig cfg;
  if (!o.config.empty()) cfg = sanitizer_config_from_json(read_json_file(o.config), parent_dir(o.config));
  auto fit = fit_private_keywords(corpus, o.top_n, cfg.detector_or_default(), o.jobs);
  for (const auto& w : fit.warnings) err << "warning: " << w << "\n";
  save_keyword_model(fit.model, o.out);
  out << "fitted " << fit.model.keywords.size() << " keywords from " << corpus.size()
      << " transcripts -> " << o.out << "\n";
  return kExitOk;
}

int cmd_sanitize(const Options& o, std::ostream& out, std::ostream& err) {
  const bool has_strategy = !o.strategy.empty();
  const bool has_risk = o.risk >= 0.0;
  if (has_strategy == has_risk) {
    err << "error: give exactly one of --strategy or --risk\n";
    return kExitUsage;
  }
  nlohmann::json config_json = o.config.empty() ? nlohmann::json::object() : read_json_file(o.config);
  const auto registry = SanitizerRegistry::with_builtins();

  std::string strategy = o.strategy;
  if (has_risk) {
    const auto profile = o.profile.empty() ? PolicyProfile::defaults() : PolicyProfile::load(o.profile);
    if (auto problems = validate_profile(profile, registry); !problems.empty()) {
      throw ConfigError("invalid profile: " + problems.front());
    }
    auto selection = select_strategy(RiskTolerance(o.risk), profile, registry);
    strategy = selection.strategy;
    config_json.merge_patch(selection.config);
    err << "strategy: " << strategy << "\n";
  }

  const auto corpus = load_corpus(o.in);
  auto cfg = sanitizer_config_from_json(config_json, parent_dir(o.config));
  const auto sanitizer = registry.lookup(strategy, cfg);
  const auto outputs = kernels::sanitize_corpus(*sanitizer, corpus, o.jobs);
  save_sanitized(outputs, o.out);
  out << "sanitized " << outputs.size() << " transcripts with " << strategy << " -> " << o.out << "\n";
  return kExitOk;
}

int cmd_evaluate(const Options& o, std::ostream& out, std::ostream&) {
  const auto raw = load_corpus(o.raw);
  const auto sanitized = load_sanitized(o.sanitized);
  if (raw.empty()) throw DataError("cannot evaluate an empty corpus");
  SanitizerConfig cfg;
  if (!o.config.empty()) cfg = sanitizer_config_from_json(read_json_file(o.config), parent_dir(o.config));
  const auto sim = make_similarity(o.sim, o.sim_config.empty() ? nlohmann::json::object()
                                                               : read_json_file(o.sim_config));
  const auto privacy = compute_prr(raw, sanitized, cfg.detector_or_default(), o.jobs);
  const auto utility = compute_srr(raw, sanitized, *sim, o.jobs, true);
  const auto strategy = sanitized.empty() ? std::string{} : sanitized.front().representation.strategy;
  auto report = strategy_report_json(strategy, privacy, utility, std::nullopt);
  write_file(o.out, report.dump(2) + "\n");
  char line[128];
  std::snprintf(line, sizeof line, "%s: PRR %.3f SRR %.3f%s\n", strategy.c_str(), privacy.prr,
                utility.srr, privacy.degenerate ? " (no raw PII)" : "");
  out << line;
  return kExitOk;
}

int cmd_detect(const Options& o, std::ostream& out, std::ostream& err) {
  const auto outputs = load_sanitized(o.in);
  const auto labels = load_labels(o.labels);
  nlohmann::json det_config = nlohmann::json::object();
  if (o.detector == "remote") {
    if (o.endpoint_config.empty()) {
      err << "error: --detector remote needs --endpoint-config\n";
      return kExitUsage;
    }
    det_config = read_json_file(o.endpoint_config);
  } else if (!o.mock_config.empty()) {
    det_config = read_json_file(o.mock_config);
  }
  const auto detector = make_detector(o.detector, det_config, {});
  const auto run = run_detection(outputs, *detector, labels);
  write_file(o.out, detection_run_json(detector->name(), run, o.timings).dump(2) + "\n");
  for (const auto& item : run.items) {
    if (!item.verdict) err << "failed: " << item.id << ": " << item.error << "\n";
  }
  if (!run.report) {
    err << "error: every item failed; no report\n";
    return kExitRemote;
  }
  char line[160];
  std::snprintf(line, sizeof line, "%s: Acc %.3f P %.3f R %.3f F1 %.3f (%zu excluded)\n",
                detector->name().c_str(), run.report->accuracy, run.report->precision,
                run.report->recall, run.report->f1, run.excluded_ids.size());
  out << line;
  return kExitOk;
}

int cmd_benchmark(const Options& o, std::ostream& out, std::ostream&) {
  auto spec = BenchmarkSpec::load(o.spec);
  if (o.jobs > 0) spec.jobs = o.jobs;
  const auto report = run_benchmark(spec);
  const auto table = render_table(report);
  write_file(spec.output_json.string(), report.dump(2) + "\n");
  write_file(spec.output_table.string(), table);
  out << table;
  return kExitOk;
}

int cmd_adapt(const Options& o, std::ostream& out, std::ostream&) {
  const auto profile = o.profile.empty() ? PolicyProfile::defaults() : PolicyProfile::load(o.profile);
  const auto registry = SanitizerRegistry::with_builtins();
  if (auto problems = validate_profile(profile, registry); !problems.empty()) {
    std::string all;
    for (const auto& p : problems) all += "\n  " + p;
    throw ConfigError("invalid profile:" + all);
  }
  const auto selection = select_strategy(RiskTolerance(o.risk), profile, registry);
  out << "strategy: " << selection.strategy << "\n";
  out << "config: " << selection.config.dump() << "\n";
  return kExitOk;
}

int cmd_show_defaults(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.what == "detector") {
    out << PiiDetector::defaults()->to_json().dump(2) << "\n";
  } else if (o.what == "profile") {
    out << PolicyProfile::defaults().to_json().dump(2) << "\n";
  } else if (o.what == "mock") {
    const auto rule = MockRule::defaults();
    out << nlohmann::ordered_json{{"triggers", rule.triggers}, {"min_triggers", rule.min_triggers}}.dump(2)
        << "\n";
  } else if (o.what == "prompt") {
    out << default_detector_prompt() << "\n";
  } else {
    err << "error: --what must be detector, profile, mock, or prompt\n";
    return kExitUsage;
  }
  return kExitOk;
}

int cmd_stub_server(const Options& o, std::ostream& out, std::ostream&) {
  StubChatServer server(parse_stub_fixture(read_json_file(o.fixture)));
  server.start(o.port);
  out << "serving " << server.base_url() << "\n" << std::flush;
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  int sig = 0;
  sigwait(&set, &sig);
  server.stop();
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"mask: modular transcript sanitization and privacy/utility evaluation"};
  app.require_subcommand(1);
  Options o;

  auto* fit = app.add_subcommand("fit-keywords", "Fit discriminative TF-IDF keywords on a labeled corpus");
  fit->add_option("--corpus", o.corpus, "Labeled transcript JSONL")->required();
  fit->add_option("--top-n", o.top_n, "Number of keywords to keep");
  fit->add_option("--out", o.out, "Keyword model JSON to write")->required();
  fit->add_option("--config", o.config, "Sanitizer config JSON (detector used for pre-masking)");
  fit->add_option("--jobs", o.jobs, "Worker threads (0 = all cores)");

  auto* san = app.add_subcommand("sanitize", "Sanitize a corpus with a strategy or a risk tolerance");
  san->add_option("--in", o.in, "Transcript JSONL")->required();
  auto* strategy_opt = san->add_option("--strategy", o.strategy, "Strategy name");
  auto* risk_opt = san->add_option("--risk", o.risk, "Risk tolerance in [0, 1]");
  strategy_opt->excludes(risk_opt);
  san->add_option("--config", o.config, "Sanitizer config JSON");
  san->add_option("--profile", o.profile, "Policy profile JSON (with --risk)");
  san->add_option("--out", o.out, "Sanitized JSONL to write")->required();
  san->add_option("--jobs", o.jobs, "Worker threads (0 = all cores)");

  auto* eval = app.add_subcommand("evaluate", "Compute PRR and SRR of a sanitized corpus");
  eval->add_option("--raw", o.raw, "Raw transcript JSONL")->required();
  eval->add_option("--sanitized", o.sanitized, "Sanitized JSONL")->required();
  eval->add_option("--sim", o.sim, "Similarity backend")->check(CLI::IsMember({"lexical", "embedding"}));
  eval->add_option("--sim-config", o.sim_config, "Embedding endpoint config JSON");
  eval->add_option("--config", o.config, "Sanitizer config JSON (detector for PII counting)");
  eval->add_option("--out", o.out, "Report JSON to write")->required();
  eval->add_option("--jobs", o.jobs, "Worker threads (0 = all cores)");

  auto* det = app.add_subcommand("detect", "Run a scam detector over sanitized records");
  det->add_option("--in", o.in, "Sanitized JSONL")->required();
  det->add_option("--detector", o.detector, "Detector")->check(CLI::IsMember({"mock", "remote"}));
  det->add_option("--endpoint-config", o.endpoint_config, "Remote endpoint config JSON");
  det->add_option("--mock-config", o.mock_config, "Mock rule JSON");
  det->add_option("--labels", o.labels, "JSONL with id and label per record")->required();
  det->add_option("--out", o.out, "Detection report JSON to write")->required();
  det->add_flag("--timings", o.timings, "Include per-item attempts and latency");

  auto* bench = app.add_subcommand("benchmark", "Run every strategy through metrics and detection");
  bench->add_option("--spec", o.spec, "Benchmark spec JSON")->required();
  bench->add_option("--jobs", o.jobs, "Worker threads, overrides the spec");

  auto* adapt = app.add_subcommand("adapt", "Show the strategy a risk tolerance selects");
  adapt->add_option("--risk", o.risk, "Risk tolerance in [0, 1]")->required();
  adapt->add_option("--profile", o.profile, "Policy profile JSON");

  auto* defaults = app.add_subcommand("show-defaults", "Print a built-in configuration");
  defaults->add_option("--what", o.what, "detector | profile | mock | prompt");

  auto* stub = app.add_subcommand("stub-server", "Serve scripted chat completions for offline runs");
  stub->add_option("--fixture", o.fixture, "Stub fixture JSON")->required();
  stub->add_option("--port", o.port, "Port (0 = any free port)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*fit) return cmd_fit_keywords(o, out, err);
    if (*san) return cmd_sanitize(o, out, err);
    if (*eval) return cmd_evaluate(o, out, err);
    if (*det) return cmd_detect(o, out, err);
    if (*bench) return cmd_benchmark(o, out, err);
    if (*adapt) return cmd_adapt(o, out, err);
    if (*defaults) return cmd_show_defaults(o, out, err);
    if (*stub) return cmd_stub_server(o, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const RemoteError& e) {
    err << "error: " << e.what() << "\n";
    return kExitRemote;
  }
  return kExitUsage;
}

}  // namespace mask
