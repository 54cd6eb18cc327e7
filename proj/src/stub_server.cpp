#include "mask/stub_server.hpp"

#include <httplib.h>

#include "mask/error.hpp"

namespace mask {

std::vector<StubScript> parse_stub_fixture(const nlohmann::json& j) {
  if (!j.is_array()) throw ConfigError("stub fixture must be a JSON list");
  std::vector<StubScript> out;
  try {
    for (const auto& e : j) {
      out.push_back({e.value("request_match", std::string{}), e.at("response").get<std::string>(),
                     e.value("failures_before_success", 0), e.value("failure_status", 503)});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("stub fixture: ") + e.what());
  }
  return out;
}

StubChatServer::StubChatServer(std::vector<StubScript> script)
    : script_(std::move(script)), hits_(script_.size(), 0), server_(std::make_unique<httplib::Server>()) {
  server_->Post("/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
    int status = 200;
    auto body = handle_chat(req.body, status);
    res.status = status;
    res.set_content(body, "application/json");
  });
  server_->Post("/embeddings", [this](const httplib::Request& req, httplib::Response& res) {
    {
      std::lock_guard lock(mutex_);
      bodies_.push_back(req.body);
    }
    try {
      auto j = nlohmann::json::parse(req.body);
      nlohmann::json data = nlohmann::json::array();
      for (const auto& input : j.at("input")) {
        std::vector<double> v(32, 0.0);
        for (unsigned char c : input.get<std::string>()) v[c % 32] += 1.0;
        data.push_back({{"embedding", v}});
      }
      res.set_content(nlohmann::json{{"data", data}}.dump(), "application/json");
    } catch (const nlohmann::json::exception&) {
      res.status = 400;
    }
  });
}

StubChatServer::~StubChatServer() { stop(); }

void StubChatServer::start(int port) {
  if (port == 0) {
    port_ = server_->bind_to_any_port("127.0.0.1");
  } else if (server_->bind_to_port("127.0.0.1", port)) {
    port_ = port;
  } else {
    port_ = -1;
  }
  if (port_ <= 0) throw ConfigError("stub server could not bind");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void StubChatServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string StubChatServer::base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

std::vector<std::string> StubChatServer::request_bodies() const {
  std::lock_guard lock(mutex_);
  return bodies_;
}

std::size_t StubChatServer::request_count() const {
  std::lock_guard lock(mutex_);
  return bodies_.size();
}

std::string StubChatServer::handle_chat(const std::string& body, int& status) {
  std::lock_guard lock(mutex_);
  bodies_.push_back(body);
  std::string prompt;
  try {
    prompt = nlohmann::json::parse(body).at("messages").at(0).at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    status = 400;
    return R"({"error":"bad request"})";
  }
  for (std::size_t i = 0; i < script_.size(); ++i) {
    const auto& s = script_[i];
    if (!s.request_match.empty() && prompt.find(s.request_match) == std::string::npos) continue;
    if (hits_[i]++ < s.failures_before_success) {
      status = s.failure_status;
      return R"({"error":"scripted failure"})";
    }
    nlohmann::json reply = {
        {"choices", nlohmann::json::array({{{"index", 0},
                                            {"message", {{"role", "assistant"}, {"content", s.response}}}}})},
    };
    return reply.dump();
  }
  status = 500;
  return R"({"error":"no scripted response"})";
}

}  // namespace mask
