#pragma once

#include <map>
#include <memory>
#include <string>

#include "mask/chat_client.hpp"

namespace mask {

/// Instruction sent along with the transcript to any summarizer backend.
std::string summary_instruction();

class SummarizerBackend {
 public:
  virtual ~SummarizerBackend() = default;
  virtual std::string name() const = 0;
  virtual std::string summarize(const std::string& transcript_text,
                                const std::string& instruction) const = 0;
};

/// Deterministic offline summarizer. Splits the text into sentences, scores
/// each by the summed idf of its tokens (1 per token when no table is given),
/// and keeps the top `max_sentences` in original order. Speaker prefixes are
/// not part of the output.
class ExtractiveSummarizer final : public SummarizerBackend {
 public:
  explicit ExtractiveSummarizer(std::map<std::string, double> idf = {}, std::size_t max_sentences = 3);

  std::string name() const override { return "extractive"; }
  std::string summarize(const std::string& transcript_text,
                        const std::string& instruction) const override;

 private:
  std::map<std::string, double> idf_;
  std::size_t max_sentences_;
};

/// Summarizes through a locally hosted chat-completions model.
class RemoteSummarizer final : public SummarizerBackend {
 public:
  explicit RemoteSummarizer(ChatEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

  std::string name() const override { return "remote:" + endpoint_.model_name; }
  std::string summarize(const std::string& transcript_text,
                        const std::string& instruction) const override;

 private:
  ChatEndpoint endpoint_;
};

}  // namespace mask
