#include "mask/jsonl.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mask/error.hpp"

namespace mask {

using ojson = nlohmann::ordered_json;

namespace {

bool is_blank(const std::string& s) {
  return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

std::string line_prefix(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

std::string require_string(const ojson& obj, const char* key, std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw DataError(line_prefix(line_no) + "missing or non-string \"" + key + "\"");
  }
  return it->get<std::string>();
}

ojson parse_line(const std::string& line, std::size_t line_no) {
  try {
    auto j = ojson::parse(line);
    if (!j.is_object()) throw DataError(line_prefix(line_no) + "expected a JSON object");
    return j;
  } catch (const ojson::parse_error& e) {
    throw DataError(line_prefix(line_no) + "malformed JSON: " + e.what());
  }
}

std::optional<Label> read_label(const ojson& obj, std::size_t line_no) {
  auto it = obj.find("label");
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw DataError(line_prefix(line_no) + "label must be a string or null");
  auto label = parse_label(it->get<std::string>());
  if (!label) {
    throw DataError(line_prefix(line_no) + "unknown label \"" + it->get<std::string>() + "\"");
  }
  return label;
}

Transcript transcript_from_json(const ojson& obj, std::size_t line_no) {
  Transcript t;
  t.id = require_string(obj, "id", line_no);
  t.label = read_label(obj, line_no);
  auto it = obj.find("utterances");
  if (it == obj.end() || !it->is_array()) {
    throw DataError(line_prefix(line_no) + "missing or non-array \"utterances\"");
  }
  for (const auto& u : *it) {
    if (!u.is_object()) throw DataError(line_prefix(line_no) + "utterance must be an object");
    Utterance utt{require_string(u, "speaker", line_no), require_string(u, "text", line_no)};
    if (utt.speaker.empty()) throw DataError(line_prefix(line_no) + "empty speaker");
    t.utterances.push_back(std::move(utt));
  }
  return t;
}

ojson representation_to_json(const SanitizedRepresentation& rep) {
  ojson r;
  r["kind"] = to_string(rep.kind);
  if (rep.kind == SanitizedRepresentation::Kind::kVector) {
    r["legend"] = rep.legend;
    r["vectors"] = rep.vectors;
  } else {
    r["text"] = rep.text.value_or("");
  }
  return r;
}

SanitizedOutput sanitized_from_json(const ojson& obj, std::size_t line_no) {
  SanitizedOutput out;
  out.id = require_string(obj, "id", line_no);
  auto& rep = out.representation;
  rep.strategy = require_string(obj, "strategy", line_no);
  auto it = obj.find("representation");
  if (it == obj.end() || !it->is_object()) {
    throw DataError(line_prefix(line_no) + "missing \"representation\" object");
  }
  auto kind = parse_kind(require_string(*it, "kind", line_no));
  if (!kind) throw DataError(line_prefix(line_no) + "unknown representation kind");
  rep.kind = *kind;
  try {
    if (rep.kind == SanitizedRepresentation::Kind::kVector) {
      rep.legend = it->at("legend").get<std::vector<std::string>>();
      rep.vectors = it->at("vectors").get<std::vector<std::vector<std::int64_t>>>();
    } else {
      rep.text = require_string(*it, "text", line_no);
    }
  } catch (const ojson::exception& e) {
    throw DataError(line_prefix(line_no) + "bad vector payload: " + e.what());
  }
  auto problems = rep.violations();
  if (!problems.empty()) throw DataError(line_prefix(line_no) + problems.front());
  return out;
}

std::string dump(const ojson& j) {
  try {
    return j.dump();
  } catch (const ojson::type_error& e) {
    throw DataError(std::string("cannot encode as JSON: ") + e.what());
  }
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("cannot write " + path.string());
  return os;
}

}  // namespace

Corpus parse_corpus(std::istream& in) {
  Corpus corpus;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    auto t = transcript_from_json(parse_line(line, line_no), line_no);
    if (!seen.insert(t.id).second) {
      throw DataError(line_prefix(line_no) + "duplicate id \"" + t.id + "\"");
    }
    corpus.transcripts.push_back(std::move(t));
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_corpus(in);
}

std::string encode_transcript(const Transcript& t) {
  ojson j;
  j["id"] = t.id;
  j["label"] = t.label ? ojson(to_string(*t.label)) : ojson(nullptr);
  auto& utts = j["utterances"] = ojson::array();
  for (const auto& u : t.utterances) {
    ojson o;
    o["speaker"] = u.speaker;
    o["text"] = u.text;
    utts.push_back(std::move(o));
  }
  return dump(j);
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  auto os = open_out(path);
  for (const auto& t : corpus.transcripts) os << encode_transcript(t) << '\n';
  if (!os) throw DataError("write failed: " + path.string());
}

std::string encode_sanitized(const SanitizedOutput& out) {
  auto problems = out.representation.violations();
  if (!problems.empty()) {
    throw DataError("refusing to serialize \"" + out.id + "\": " + problems.front());
  }
  ojson j;
  j["id"] = out.id;
  j["strategy"] = out.representation.strategy;
  j["representation"] = representation_to_json(out.representation);
  return dump(j);
}

std::vector<SanitizedOutput> parse_sanitized(std::istream& in) {
  std::vector<SanitizedOutput> outputs;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    auto out = sanitized_from_json(parse_line(line, line_no), line_no);
    if (!seen.insert(out.id).second) {
      throw DataError(line_prefix(line_no) + "duplicate id \"" + out.id + "\"");
    }
    outputs.push_back(std::move(out));
  }
  return outputs;
}

std::vector<SanitizedOutput> load_sanitized(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_sanitized(in);
}

void write_sanitized(const std::vector<SanitizedOutput>& outputs, std::ostream& os) {
  std::set<std::string> seen;
  // Encode everything first so a bad record leaves nothing half-written.
  std::string buffer;
  for (const auto& out : outputs) {
    if (!seen.insert(out.id).second) throw DataError("duplicate id \"" + out.id + "\"");
    buffer += encode_sanitized(out);
    buffer += '\n';
  }
  os << buffer;
}

void save_sanitized(const std::vector<SanitizedOutput>& outputs,
                    const std::filesystem::path& path) {
  std::ostringstream buffer;
  write_sanitized(outputs, buffer);
  auto os = open_out(path);
  os << buffer.str();
  if (!os) throw DataError("write failed: " + path.string());
}

std::map<std::string, Label> load_labels(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::map<std::string, Label> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    auto obj = parse_line(line, line_no);
    auto id = require_string(obj, "id", line_no);
    auto label = read_label(obj, line_no);
    if (!label) throw DataError(line_prefix(line_no) + "record \"" + id + "\" is unlabeled");
    if (!labels.emplace(id, *label).second) {
      throw DataError(line_prefix(line_no) + "duplicate id \"" + id + "\"");
    }
  }
  return labels;
}

}  // namespace mask
