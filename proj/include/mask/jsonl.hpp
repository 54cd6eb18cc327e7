#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "mask/transcript.hpp"

namespace mask {

// Canonical JSONL: UTF-8, compact separators, one object per line, fields in
// schema order. Errors are DataError and name the offending line.

Corpus parse_corpus(std::istream& in);
Corpus load_corpus(const std::filesystem::path& path);

std::string encode_transcript(const Transcript& t);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

std::string encode_sanitized(const SanitizedOutput& out);
std::vector<SanitizedOutput> parse_sanitized(std::istream& in);
std::vector<SanitizedOutput> load_sanitized(const std::filesystem::path& path);
void write_sanitized(const std::vector<SanitizedOutput>& outputs, std::ostream& os);
void save_sanitized(const std::vector<SanitizedOutput>& outputs, const std::filesystem::path& path);

/// Reads id -> label from any JSONL whose objects carry "id" and "label".
std::map<std::string, Label> load_labels(const std::filesystem::path& path);

}  // namespace mask
