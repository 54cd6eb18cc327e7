#include "mask/parallel.hpp"

#include <omp.h>

#include "mask/metrics.hpp"
#include "mask/pii.hpp"
#include "mask/sanitizer.hpp"

namespace mask::kernels {

namespace {

int thread_count(int jobs) { return jobs > 0 ? jobs : omp_get_max_threads(); }

void rethrow_first(const std::vector<std::exception_ptr>& errors) {
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

std::vector<SanitizedOutput> sanitize_corpus(const Sanitizer& sanitizer, const Corpus& corpus,
                                             int jobs) {
  const auto n = static_cast<std::int64_t>(corpus.size());
  std::vector<SanitizedOutput> out(corpus.size());
  std::vector<std::exception_ptr> errors(corpus.size());
#pragma omp parallel for schedule(dynamic) num_threads(thread_count(jobs))
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      out[i] = {corpus.transcripts[i].id, sanitizer.sanitize(corpus.transcripts[i])};
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  rethrow_first(errors);
  return out;
}

std::vector<SanitizedOutput> sanitize_corpus_serial(const Sanitizer& sanitizer,
                                                    const Corpus& corpus) {
  std::vector<SanitizedOutput> out;
  out.reserve(corpus.size());
  for (const auto& t : corpus.transcripts) out.push_back({t.id, sanitizer.sanitize(t)});
  return out;
}

std::vector<std::int64_t> count_pii(const PiiDetector& detector, std::span<const std::string> texts,
                                    int jobs) {
  const auto n = static_cast<std::int64_t>(texts.size());
  std::vector<std::int64_t> out(texts.size(), 0);
  std::vector<std::exception_ptr> errors(texts.size());
#pragma omp parallel for schedule(dynamic) num_threads(thread_count(jobs))
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      out[i] = static_cast<std::int64_t>(detector.detect(texts[i]).size());
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  rethrow_first(errors);
  return out;
}

std::vector<std::int64_t> count_pii_serial(const PiiDetector& detector,
                                           std::span<const std::string> texts) {
  std::vector<std::int64_t> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(static_cast<std::int64_t>(detector.detect(t).size()));
  return out;
}

std::vector<std::vector<std::int64_t>> count_pii_by_category(const PiiDetector& detector,
                                                             std::span<const std::string> texts,
                                                             int jobs) {
  const auto n = static_cast<std::int64_t>(texts.size());
  std::vector<std::vector<std::int64_t>> out(texts.size());
  std::vector<std::exception_ptr> errors(texts.size());
#pragma omp parallel for schedule(dynamic) num_threads(thread_count(jobs))
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      out[i] = count_by_category(detector.detect(texts[i]));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  rethrow_first(errors);
  return out;
}

std::vector<SimOutcome> similarities(const SimilarityBackend& backend,
                                     std::span<const std::string> a,
                                     std::span<const std::string> b, int jobs) {
  const auto n = static_cast<std::int64_t>(std::min(a.size(), b.size()));
  std::vector<SimOutcome> out(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic) num_threads(thread_count(jobs))
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      out[i].sim = backend.sim(a[i], b[i]);
    } catch (...) {
      out[i].error = std::current_exception();
    }
  }
  return out;
}

std::vector<SimOutcome> similarities_serial(const SimilarityBackend& backend,
                                            std::span<const std::string> a,
                                            std::span<const std::string> b) {
  std::vector<SimOutcome> out;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    SimOutcome o;
    try {
      o.sim = backend.sim(a[i], b[i]);
    } catch (...) {
      o.error = std::current_exception();
    }
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace mask::kernels
