#include "mask/pii.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "mask/error.hpp"
#include "mask/text.hpp"

namespace mask {

namespace {

constexpr std::array<std::string_view, kCategoryCount> kCategoryNames = {
    "ID", "PHONE", "ACCOUNT", "EMAIL", "URL", "BANKCARD", "DATE", "NAME", "ORG", "LOC", "NUM",
};

std::size_t index_of(PiiCategory c) { return static_cast<std::size_t>(c); }

// Accepted spans kept sorted by start for overlap queries.
class Occupancy {
 public:
  bool is_free(std::size_t start, std::size_t end) const {
    auto it = std::lower_bound(spans_.begin(), spans_.end(), end,
                               [](const EntitySpan& s, std::size_t pos) { return s.start < pos; });
    // Only the span right before the insertion point can reach into [start, end).
    if (it != spans_.begin() && std::prev(it)->end > start) return false;
    return true;
  }

  void insert(EntitySpan span) {
    auto it = std::lower_bound(
        spans_.begin(), spans_.end(), span.start,
        [](const EntitySpan& s, std::size_t pos) { return s.start < pos; });
    spans_.insert(it, std::move(span));
  }

  std::vector<EntitySpan> take() && { return std::move(spans_); }
  const std::vector<EntitySpan>& spans() const { return spans_; }

 private:
  std::vector<EntitySpan> spans_;
};

}  // namespace

std::string_view to_string(PiiCategory c) { return kCategoryNames[index_of(c)]; }

std::optional<PiiCategory> parse_category(std::string_view s) {
  for (std::size_t i = 0; i < kCategoryCount; ++i) {
    if (kCategoryNames[i] == s) return kAllCategories[i];
  }
  return std::nullopt;
}

std::vector<std::string> category_legend() {
  return {kCategoryNames.begin(), kCategoryNames.end()};
}

PlaceholderMap default_placeholders() {
  PlaceholderMap m;
  for (std::size_t i = 0; i < kCategoryCount; ++i) {
    m[i] = "[" + std::string(kCategoryNames[i]) + "]";
  }
  return m;
}

// ---------------------------------------------------------------------------
// PatternSet

PatternSet PatternSet::compile(std::vector<PatternSpec> specs) {
  PatternSet set;
  std::set<std::pair<PiiCategory, int>> priorities;
  for (const auto& spec : specs) {
    if (spec.category == PiiCategory::kNum) {
      throw ConfigError("NUM is reserved for the digit-run fallback; pattern \"" + spec.regex +
                        "\" cannot target it");
    }
    if (!priorities.insert({spec.category, spec.priority}).second) {
      throw ConfigError("duplicate priority " + std::to_string(spec.priority) + " for category " +
                        std::string(to_string(spec.category)));
    }
    auto flags = std::regex::ECMAScript | std::regex::optimize;
    if (spec.icase) flags |= std::regex::icase;
    try {
      set.compiled_.emplace_back(spec.regex, flags);
    } catch (const std::regex_error& e) {
      throw ConfigError("pattern for " + std::string(to_string(spec.category)) +
                        " does not compile: \"" + spec.regex + "\" (" + e.what() + ")");
    }
  }
  set.specs_ = std::move(specs);
  return set;
}

PatternSet PatternSet::defaults() {
  using C = PiiCategory;
  static const char* kMonths = "(?:jan|feb|mar|apr|may|jun|jul|aug|sep|sept|oct|nov|dec)[a-z]*\\.?";
  std::vector<PatternSpec> specs = {
      // Mainland resident ID (18 chars, legacy 15 digits) and HKID.
      {C::kId, R"(\b[1-9]\d{16}[0-9Xx]\b)", 10},
      {C::kId, R"(\b[1-9]\d{14}\b)", 11},
      {C::kId, R"(\b[A-Z]{1,2}\d{6}\([0-9A]\))", 12},

      {C::kEmail, R"(\b[A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(?:\.[A-Za-z0-9-]+)*\.[A-Za-z]{2,}\b)", 20},

      {C::kUrl, R"(\bhttps?://[A-Za-z0-9\-._~:/?#@!$&'*+,;=%]*[A-Za-z0-9/#=_~-])", 30, true},
      {C::kUrl, R"(\bwww\.[A-Za-z0-9\-._~:/?#@!$&'*+,;=%]*[A-Za-z0-9/#=_~-])", 31, true},

      // 13-19 digits, optionally grouped in fours.
      {C::kBankcard, R"(\b\d{4}(?:[ -]?\d{4}){2}[ -]?\d{1,4}(?:[ -]?\d{1,3})?\b)", 40},

      {C::kPhone, R"(\+\d{1,3}[ -]?\d{2,4}(?:[ -]?\d{3,4}){1,3}\b)", 50},
      {C::kPhone, R"(\b1[3-9]\d(?:[ -]?\d{4}){2}\b)", 51},
      {C::kPhone, R"((?:\(\d{3}\) ?|\b\d{3}[-. ])\d{3}[-. ]\d{4}\b)", 52},
      {C::kPhone, R"(\b0\d{2,3}-\d{7,8}\b)", 53},
      {C::kPhone, R"(\b[2-9]\d{3}[ -]\d{4}\b)", 54},

      // Context-anchored accounts outrank bare digit-length card matches.
      {C::kAccount,
       R"((?:account|acct|a/c)(?: +(?:no\.?|number))? *(?::|#)? *([A-Za-z0-9-]*\d[A-Za-z0-9-]{4,}))",
       35, true},
      {C::kAccount, R"((?:账号|账户|卡号)(?::|：)? *([A-Za-z0-9-]*\d[A-Za-z0-9-]{4,}))", 36},
      {C::kAccount, R"(\b[A-Z]{2}\d{2}[A-Z0-9]{11,30}\b)", 62},

      {C::kDate, R"(\b\d{4}[-/.]\d{1,2}[-/.]\d{1,2}\b)", 70},
      {C::kDate, R"(\b\d{1,2}/\d{1,2}/\d{2,4}\b)", 71},
      {C::kDate, R"(\d{4}年\d{1,2}月\d{1,2}(?:日|号))", 72},
      {C::kDate, R"(\d{1,2}月\d{1,2}(?:日|号))", 73},
      {C::kDate, std::string(R"(\b)") + kMonths + R"( +\d{1,2}(?:st|nd|rd|th)?,? +\d{4}\b)", 74, true},
      {C::kDate, std::string(R"(\b\d{1,2}(?:st|nd|rd|th)? +)") + kMonths + R"(,? +\d{4}\b)", 75, true},
  };
  return compile(std::move(specs));
}

std::vector<std::pair<EntitySpan, int>> PatternSet::candidates(std::string_view text) const {
  using Iter = std::string_view::const_iterator;
  std::vector<std::pair<EntitySpan, int>> out;
  for (std::size_t p = 0; p < compiled_.size(); ++p) {
    const auto& re = compiled_[p];
    const bool use_group = re.mark_count() >= 1;
    for (std::regex_iterator<Iter> it(text.begin(), text.end(), re), end; it != end; ++it) {
      const auto& m = *it;
      std::size_t start = 0;
      std::size_t len = 0;
      if (use_group) {
        if (!m[1].matched) continue;
        start = static_cast<std::size_t>(m[1].first - text.begin());
        len = static_cast<std::size_t>(m[1].length());
      } else {
        start = static_cast<std::size_t>(m.position(0));
        len = static_cast<std::size_t>(m.length(0));
      }
      if (len == 0) continue;
      const std::size_t stop = start + len;
      if (!is_codepoint_boundary(text, start) || !is_codepoint_boundary(text, stop)) continue;
      out.push_back({EntitySpan{specs_[p].category, start, stop, std::string(text.substr(start, len)),
                                EntitySpan::Source::kPattern},
                     specs_[p].priority});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gazetteer

Gazetteer::Gazetteer(Lexicon lexicon) : lexicon_(std::move(lexicon)) {
  for (const auto& [category, entries] : lexicon_) {
    if (category != PiiCategory::kName && category != PiiCategory::kOrg &&
        category != PiiCategory::kLoc) {
      throw ConfigError("gazetteer category must be NAME, ORG, or LOC, got " +
                        std::string(to_string(category)));
    }
    for (const auto& e : entries) {
      if (e.empty()) throw ConfigError("empty gazetteer entry");
      if (!is_valid_utf8(e)) throw ConfigError("gazetteer entry is not valid UTF-8");
      by_first_byte_[static_cast<unsigned char>(e[0])].push_back({e, category});
    }
  }
  for (auto& bucket : by_first_byte_) {
    std::stable_sort(bucket.begin(), bucket.end(), [](const Entry& a, const Entry& b) {
      return a.text.size() > b.text.size();
    });
  }
}

Gazetteer Gazetteer::defaults() {
  return Gazetteer(Lexicon{
      {PiiCategory::kName,
       {"Wang", "Zhang", "Chen", "Liu", "Chan", "Wong", "Cheung", "Lau", "Wang Wei", "Zhang Min",
        "Chan Tai Man", "Li Na", "John Smith", "Mary Johnson", "Peter Lee", "王伟", "张伟", "李娜",
        "王芳", "刘洋", "陈静", "张敏", "李强", "陈大文", "黄小明"}},
      {PiiCategory::kOrg,
       {"HSBC", "ICBC", "Bank of China", "China Construction Bank", "Hang Seng Bank", "Alipay",
        "WeChat Pay", "Standard Chartered", "中国银行", "工商银行", "建设银行", "招商银行",
        "支付宝", "汇丰银行"}},
      {PiiCategory::kLoc,
       {"Hong Kong", "Kowloon", "Beijing", "Shanghai", "Shenzhen", "Guangzhou", "Mong Kok",
        "Tsim Sha Tsui", "北京", "上海", "深圳", "广州", "香港", "九龙"}},
  });
}

bool Gazetteer::contains(std::string_view entry) const {
  if (entry.empty()) return false;
  for (const auto& e : by_first_byte_[static_cast<unsigned char>(entry[0])]) {
    if (e.text == entry) return true;
  }
  return false;
}

std::vector<RecognizedEntity> Gazetteer::recognize(std::string_view text) const {
  std::vector<RecognizedEntity> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const Entry* hit = nullptr;
    if (is_codepoint_boundary(text, pos)) {
      for (const auto& e : by_first_byte_[static_cast<unsigned char>(text[pos])]) {
        if (text.compare(pos, e.text.size(), e.text) != 0) continue;
        const std::size_t stop = pos + e.text.size();
        if (is_ascii_alnum(e.text.front()) && pos > 0 && is_ascii_alnum(text[pos - 1])) continue;
        if (is_ascii_alnum(e.text.back()) && stop < text.size() && is_ascii_alnum(text[stop])) {
          continue;
        }
        hit = &e;
        break;
      }
    }
    if (hit) {
      out.push_back({hit->category, pos, pos + hit->text.size()});
      pos += hit->text.size();
    } else {
      ++pos;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Detection and masking

std::vector<EntitySpan> detect_pii(std::string_view text, const PatternSet& patterns,
                                   const EntityRecognizer& ner, int num_fallback_min_digits) {
  Occupancy taken;

  auto candidates = patterns.candidates(text);
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second < b.second;
    if (a.first.start != b.first.start) return a.first.start < b.first.start;
    return (a.first.end - a.first.start) > (b.first.end - b.first.start);
  });
  for (auto& [span, priority] : candidates) {
    if (taken.is_free(span.start, span.end)) taken.insert(std::move(span));
  }

  for (const auto& ent : ner.recognize(text)) {
    if (ent.start >= ent.end || ent.end > text.size() || !is_codepoint_boundary(text, ent.start) ||
        !is_codepoint_boundary(text, ent.end)) {
      throw DataError("recognizer " + ner.name() + " returned an invalid span");
    }
    if (ent.category != PiiCategory::kName && ent.category != PiiCategory::kOrg &&
        ent.category != PiiCategory::kLoc) {
      throw DataError("recognizer " + ner.name() + " returned a non-entity category");
    }
    if (taken.is_free(ent.start, ent.end)) {
      taken.insert({ent.category, ent.start, ent.end,
                    std::string(text.substr(ent.start, ent.end - ent.start)),
                    EntitySpan::Source::kNer});
    }
  }

  // Digit runs not covered by a primary span. A run cut by a span boundary
  // contributes its uncovered pieces.
  std::vector<EntitySpan> fallback;
  const auto& primary = taken.spans();
  std::size_t next_span = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (!is_ascii_digit(text[pos])) {
      ++pos;
      continue;
    }
    std::size_t run_end = pos;
    while (run_end < text.size() && is_ascii_digit(text[run_end])) ++run_end;

    std::size_t piece = pos;
    while (piece < run_end) {
      while (next_span < primary.size() && primary[next_span].end <= piece) ++next_span;
      std::size_t piece_end = run_end;
      if (next_span < primary.size() && primary[next_span].start < run_end) {
        if (primary[next_span].start <= piece) {
          piece = std::min(run_end, primary[next_span].end);
          continue;
        }
        piece_end = primary[next_span].start;
      }
      if (static_cast<int>(piece_end - piece) >= num_fallback_min_digits) {
        fallback.push_back({PiiCategory::kNum, piece, piece_end,
                            std::string(text.substr(piece, piece_end - piece)),
                            EntitySpan::Source::kFallback});
      }
      piece = piece_end;
    }
    pos = run_end;
  }

  auto result = std::move(taken).take();
  if (!fallback.empty()) {
    result.insert(result.end(), std::make_move_iterator(fallback.begin()),
                  std::make_move_iterator(fallback.end()));
    std::sort(result.begin(), result.end(),
              [](const EntitySpan& a, const EntitySpan& b) { return a.start < b.start; });
  }
  return result;
}

std::string mask_text(std::string_view text, std::span<const EntitySpan> spans,
                      const PlaceholderMap& placeholders) {
  std::string out;
  out.reserve(text.size());
  std::size_t cursor = 0;
  for (const auto& s : spans) {
    if (s.start >= s.end || s.end > text.size()) {
      throw DataError("span [" + std::to_string(s.start) + "," + std::to_string(s.end) +
                      ") out of bounds for text of " + std::to_string(text.size()) + " bytes");
    }
    if (s.start < cursor) {
      throw DataError("span [" + std::to_string(s.start) + "," + std::to_string(s.end) +
                      ") overlaps or precedes the previous span");
    }
    out.append(text.substr(cursor, s.start - cursor));
    out.append(placeholders[index_of(s.category)]);
    cursor = s.end;
  }
  out.append(text.substr(cursor));
  return out;
}

std::vector<std::int64_t> count_by_category(std::span<const EntitySpan> spans) {
  std::vector<std::int64_t> counts(kCategoryCount, 0);
  for (const auto& s : spans) ++counts[index_of(s.category)];
  return counts;
}

// ---------------------------------------------------------------------------
// PiiDetector

PiiDetector::PiiDetector(PatternSet patterns, std::shared_ptr<const EntityRecognizer> ner,
                         int num_fallback_min_digits, PlaceholderMap placeholders)
    : patterns_(std::move(patterns)),
      ner_(std::move(ner)),
      num_fallback_min_digits_(num_fallback_min_digits),
      placeholders_(std::move(placeholders)) {
  if (!ner_) throw ConfigError("detector requires an entity recognizer");
  if (num_fallback_min_digits_ < 1) throw ConfigError("num_fallback_min_digits must be >= 1");
  for (const auto& p : placeholders_) {
    if (p.empty()) throw ConfigError("placeholder tokens must be non-empty");
  }
}

std::shared_ptr<const PiiDetector> PiiDetector::defaults() {
  static const auto instance = std::make_shared<const PiiDetector>(
      PatternSet::defaults(), std::make_shared<const Gazetteer>(Gazetteer::defaults()),
      kDefaultNumFallbackDigits, default_placeholders());
  return instance;
}

std::shared_ptr<const PiiDetector> PiiDetector::from_json(const nlohmann::json& config) {
  if (!config.is_object()) throw ConfigError("detector config must be a JSON object");
  try {
    PatternSet patterns;
    if (auto it = config.find("patterns"); it != config.end()) {
      std::vector<PatternSpec> specs;
      for (const auto& p : *it) {
        auto cat = parse_category(p.at("category").get<std::string>());
        if (!cat) throw ConfigError("unknown category " + p.at("category").dump());
        specs.push_back({*cat, p.at("regex").get<std::string>(), p.at("priority").get<int>(),
                         p.value("icase", false)});
      }
      patterns = PatternSet::compile(std::move(specs));
    } else {
      patterns = PatternSet::defaults();
    }

    std::shared_ptr<const EntityRecognizer> ner;
    if (auto it = config.find("gazetteer"); it != config.end()) {
      Gazetteer::Lexicon lexicon;
      for (const auto& [key, entries] : it->items()) {
        auto cat = parse_category(key);
        if (!cat) throw ConfigError("unknown gazetteer category " + key);
        lexicon[*cat] = entries.get<std::vector<std::string>>();
      }
      ner = std::make_shared<const Gazetteer>(std::move(lexicon));
    } else {
      ner = std::make_shared<const Gazetteer>(Gazetteer::defaults());
    }

    int min_digits = config.value("num_fallback_min_digits", kDefaultNumFallbackDigits);

    auto placeholders = default_placeholders();
    if (auto it = config.find("placeholders"); it != config.end()) {
      for (const auto& [key, token] : it->items()) {
        auto cat = parse_category(key);
        if (!cat) throw ConfigError("unknown placeholder category " + key);
        placeholders[index_of(*cat)] = token.get<std::string>();
      }
    }
    return std::make_shared<const PiiDetector>(std::move(patterns), std::move(ner), min_digits,
                                               std::move(placeholders));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad detector config: ") + e.what());
  }
}

std::shared_ptr<const PiiDetector> PiiDetector::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open detector config " + path);
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("detector config " + path + ": " + e.what());
  }
}

nlohmann::ordered_json PiiDetector::to_json() const {
  nlohmann::ordered_json j;
  auto& patterns = j["patterns"] = nlohmann::ordered_json::array();
  for (const auto& spec : patterns_.specs()) {
    nlohmann::ordered_json p;
    p["category"] = to_string(spec.category);
    p["regex"] = spec.regex;
    p["priority"] = spec.priority;
    if (spec.icase) p["icase"] = true;
    patterns.push_back(std::move(p));
  }
  if (const auto* gaz = dynamic_cast<const Gazetteer*>(ner_.get())) {
    auto& g = j["gazetteer"] = nlohmann::ordered_json::object();
    for (const auto& [cat, entries] : gaz->lexicon()) g[std::string(to_string(cat))] = entries;
  }
  j["num_fallback_min_digits"] = num_fallback_min_digits_;
  auto& ph = j["placeholders"] = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < kCategoryCount; ++i) ph[std::string(kCategoryNames[i])] = placeholders_[i];
  return j;
}

std::vector<EntitySpan> PiiDetector::detect(std::string_view text) const {
  return detect_pii(text, patterns_, *ner_, num_fallback_min_digits_);
}

std::string PiiDetector::mask(std::string_view text) const {
  auto spans = detect(text);
  return mask_text(text, spans, placeholders_);
}

}  // namespace mask
