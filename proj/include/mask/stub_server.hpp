#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

namespace httplib {
class Server;
}

namespace mask {

/// One scripted reply. The first entry whose `request_match` occurs in the
/// prompt answers; an empty match answers anything. The entry fails with
/// `failure_status` for its first `failures_before_success` hits.
struct StubScript {
  std::string request_match;
  std::string response;
  int failures_before_success = 0;
  int failure_status = 503;
};

/// Parses the fixture format: a JSON list of
/// {"request_match", "response", "failures_before_success", "failure_status"?}.
std::vector<StubScript> parse_stub_fixture(const nlohmann::json& j);

/// In-process chat-completions server for tests and offline runs.
///
/// POST /chat/completions answers from the script; POST /embeddings returns a
/// deterministic byte-histogram embedding per input. Every request body is
/// recorded.
class StubChatServer {
 public:
  explicit StubChatServer(std::vector<StubScript> script);
  ~StubChatServer();

  StubChatServer(const StubChatServer&) = delete;
  StubChatServer& operator=(const StubChatServer&) = delete;

  /// Binds to 127.0.0.1 (port 0 picks a free one) and serves on a background thread.
  void start(int port = 0);
  void stop();

  std::string base_url() const;
  int port() const { return port_; }

  std::vector<std::string> request_bodies() const;
  std::size_t request_count() const;

 private:
  std::string handle_chat(const std::string& body, int& status);

  std::vector<StubScript> script_;
  std::vector<int> hits_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  mutable std::mutex mutex_;
  std::vector<std::string> bodies_;
};

}  // namespace mask
