#pragma once

#include <cstdint>
#include <exception>
#include <span>
#include <string>
#include <vector>

#include "mask/transcript.hpp"

namespace mask {

class Sanitizer;
class PiiDetector;
class SimilarityBackend;

// Corpus-level kernels. Each parallel kernel has a serial twin with identical
// results; the serial versions are the reference the tests compare against.
// `jobs` <= 0 uses the OpenMP default. Results are in input order, and the
// error of the lowest failing index is rethrown.
namespace kernels {

std::vector<SanitizedOutput> sanitize_corpus(const Sanitizer& sanitizer, const Corpus& corpus,
                                             int jobs = 0);
std::vector<SanitizedOutput> sanitize_corpus_serial(const Sanitizer& sanitizer,
                                                    const Corpus& corpus);

/// Number of detected spans per text.
std::vector<std::int64_t> count_pii(const PiiDetector& detector, std::span<const std::string> texts,
                                    int jobs = 0);
std::vector<std::int64_t> count_pii_serial(const PiiDetector& detector,
                                           std::span<const std::string> texts);

/// Category counts per text, in legend order.
std::vector<std::vector<std::int64_t>> count_pii_by_category(const PiiDetector& detector,
                                                             std::span<const std::string> texts,
                                                             int jobs = 0);

struct SimOutcome {
  double sim = 0.0;
  std::exception_ptr error;  // set when the backend failed for this pair
};

std::vector<SimOutcome> similarities(const SimilarityBackend& backend,
                                     std::span<const std::string> a,
                                     std::span<const std::string> b, int jobs = 0);
std::vector<SimOutcome> similarities_serial(const SimilarityBackend& backend,
                                            std::span<const std::string> a,
                                            std::span<const std::string> b);

}  // namespace kernels
}  // namespace mask
