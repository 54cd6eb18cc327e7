#pragma once

// Synthetic labeled phone-call corpora for property and acceptance tests.
// Injected PII is drawn only from what the default detector recognizes.

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mask/transcript.hpp"

namespace mask::testing {

inline const std::vector<std::string>& scam_cues() {
  static const std::vector<std::string> cues = {
      "transfer", "police",  "urgent",  "verify",  "arrest",    "warrant", "fee",
      "refund",   "customs", "parcel",  "frozen",  "penalty",   "immediately", "secret",
      "money",    "officer", "suspicious", "case", "legal",     "deposit"};
  return cues;
}

inline const std::vector<std::string>& normal_cues() {
  static const std::vector<std::string> cues = {
      "dinner", "weekend", "movie", "family", "birthday", "school", "lunch",
      "holiday", "game",   "weather", "shopping", "coffee", "garden", "concert"};
  return cues;
}

/// Pseudo-words built from consonant-vowel syllables; never collide with cue words.
inline const std::vector<std::string>& filler_vocabulary() {
  static const std::vector<std::string> vocab = [] {
    const std::string consonants = "bdfgklmnprstvz";
    const std::string vowels = "aeiou";
    std::set<std::string> reserved(scam_cues().begin(), scam_cues().end());
    reserved.insert(normal_cues().begin(), normal_cues().end());
    std::mt19937 rng(12345);
    std::set<std::string> words;
    while (words.size() < 1500) {
      const int syllables = 2 + static_cast<int>(rng() % 2);
      std::string w;
      for (int s = 0; s < syllables; ++s) {
        w += consonants[rng() % consonants.size()];
        w += vowels[rng() % vowels.size()];
      }
      if (!reserved.count(w)) words.insert(w);
    }
    return std::vector<std::string>(words.begin(), words.end());
  }();
  return vocab;
}

class CorpusGenerator {
 public:
  explicit CorpusGenerator(std::uint32_t seed) : rng_(seed) {}

  /// A PII phrase the default detector fully recognizes.
  std::string pii_phrase() {
    static const std::vector<std::string> names = {"Wang", "Chan Tai Man", "John Smith", "Li Na",
                                                   "Peter Lee", "王伟", "陈大文"};
    static const std::vector<std::string> orgs = {"HSBC", "Bank of China", "Hang Seng Bank", "Alipay"};
    static const std::vector<std::string> locs = {"Hong Kong", "Kowloon", "Shenzhen", "Mong Kok", "北京"};
    switch (pick(9)) {
      case 0: return "my name is " + names[pick(names.size())];
      case 1: return "call me at 1" + std::string(1, static_cast<char>('3' + pick(7))) + digits(9);
      case 2: return "email user" + digits(2) + "@mail" + digits(1) + ".com";
      case 3: return "meet on 2024-0" + std::to_string(1 + pick(9)) + "-1" + std::to_string(pick(10));
      case 4: return "card " + digits(4) + " " + digits(4) + " " + digits(4) + " " + digits(4);
      case 5: return "visit www.site" + digits(2) + ".com";
      case 6: return "I am in " + locs[pick(locs.size())];
      case 7: return "this is " + orgs[pick(orgs.size())];
      default: return "id " + std::to_string(1 + pick(9)) + digits(16) + "X";
    }
  }

  Transcript transcript(const std::string& id, Label label, bool with_pii = true) {
    Transcript t;
    t.id = id;
    t.label = label;
    const auto& own = label == Label::kScam ? scam_cues() : normal_cues();
    const int n_utt = 6 + static_cast<int>(pick(7));
    bool injected = false;
    for (int u = 0; u < n_utt; ++u) {
      Utterance utt;
      utt.speaker = (u % 2 == 0) ? "caller" : "recipient";
      const int n_sent = 1 + static_cast<int>(pick(2));
      for (int s = 0; s < n_sent; ++s) {
        std::vector<std::string> words;
        const int n_fill = 5 + static_cast<int>(pick(6));
        for (int k = 0; k < n_fill; ++k) words.push_back(filler());
        if (chance(0.6)) words.insert(words.begin() + pick(words.size()), own[pick(own.size())]);
        if (chance(0.15)) {
          const auto& other = label == Label::kScam ? normal_cues() : scam_cues();
          words.insert(words.begin() + pick(words.size()), other[pick(other.size())]);
        }
        if (with_pii && (chance(0.3) || (!injected && u == n_utt - 1))) {
          words.insert(words.begin() + pick(words.size() + 1), pii_phrase());
          injected = true;
        }
        std::string sentence;
        for (const auto& w : words) sentence += (sentence.empty() ? "" : " ") + w;
        sentence[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(sentence[0])) & 0xFF);
        sentence += chance(0.2) ? "?" : ".";
        utt.text += (utt.text.empty() ? "" : " ") + sentence;
      }
      t.utterances.push_back(std::move(utt));
    }
    return t;
  }

  Corpus corpus(std::size_t n, bool with_pii = true) {
    Corpus c;
    for (std::size_t i = 0; i < n; ++i) {
      const auto label = (i % 2 == 0) ? Label::kScam : Label::kNormal;
      c.transcripts.push_back(transcript("t" + std::to_string(i), label, with_pii));
    }
    return c;
  }

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
  std::mt19937& rng() { return rng_; }

 private:
  std::string filler() {
    const auto& v = filler_vocabulary();
    return v[pick(v.size())];
  }

  std::string digits(int n) {
    std::string s;
    for (int i = 0; i < n; ++i) s += static_cast<char>('0' + pick(10));
    return s;
  }

  std::mt19937 rng_;
};

}  // namespace mask::testing
