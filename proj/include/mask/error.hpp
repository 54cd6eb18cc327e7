#pragma once

#include <stdexcept>
#include <string>

namespace mask {

/// Bad input data: malformed JSONL, duplicate ids, invariant violations.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration: unknown strategy, bad pattern, missing fitted model.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A remote dependency (detector, summarizer, embedding service) failed.
class RemoteError : public std::runtime_error {
 public:
  RemoteError(std::string backend, const std::string& what)
      : std::runtime_error(backend + ": " + what), backend_(std::move(backend)) {}

  const std::string& backend() const noexcept { return backend_; }

 private:
  std::string backend_;
};

}  // namespace mask
