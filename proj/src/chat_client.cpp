#include "mask/chat_client.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "mask/error.hpp"

namespace mask {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host:port
  std::string prefix;  // path without trailing slash
};

SplitUrl split_url(const std::string& base_url) {
  auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("base_url needs a scheme: " + base_url);
  const auto scheme = base_url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw ConfigError("base_url scheme must be http or https: " + base_url);
  }
  auto path_start = base_url.find('/', scheme_end + 3);
  SplitUrl out;
  if (path_start == std::string::npos) {
    out.origin = base_url;
  } else {
    out.origin = base_url.substr(0, path_start);
    out.prefix = base_url.substr(path_start);
  }
  while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  return out;
}

bool retryable_status(int status) { return status == 429 || status >= 500; }

// Runs `attempt` with the endpoint's retry policy. `attempt` returns an empty
// string on success or a retryable error message; it throws RemoteError for
// permanent failures.
int with_retries(const ChatEndpoint& ep, const std::string& backend,
                 const std::function<std::string()>& attempt) {
  std::string last_error;
  for (int k = 0; k <= ep.max_retries; ++k) {
    if (k > 0) std::this_thread::sleep_for(ep.backoff_base * (1LL << (k - 1)));
    last_error = attempt();
    if (last_error.empty()) return k + 1;
  }
  throw RemoteError(backend, "giving up after " + std::to_string(ep.max_retries + 1) +
                                 " attempts: " + last_error);
}

httplib::Headers auth_headers(const ChatEndpoint& ep, const std::string& backend) {
  httplib::Headers headers;
  if (ep.api_key_env.empty()) return headers;
  const char* key = std::getenv(ep.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw RemoteError(backend, "credential variable " + ep.api_key_env + " is not set");
  }
  headers.emplace("Authorization", std::string("Bearer ") + key);
  return headers;
}

httplib::Result post_json(const ChatEndpoint& ep, const std::string& path, const std::string& body,
                          const httplib::Headers& headers) {
  auto url = split_url(ep.base_url);
  httplib::Client client(url.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(ep.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(ep.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  return client.Post(url.prefix + path, headers, body, "application/json");
}

}  // namespace

ChatEndpoint chat_endpoint_from_json(const nlohmann::json& j) {
  try {
    ChatEndpoint ep;
    ep.base_url = j.at("base_url").get<std::string>();
    ep.model_name = j.value("model_name", std::string{});
    ep.api_key_env = j.value("api_key_env", std::string{});
    ep.timeout = std::chrono::milliseconds(j.value("timeout_ms", 30000));
    ep.max_retries = j.value("max_retries", 2);
    ep.backoff_base = std::chrono::milliseconds(j.value("backoff_base_ms", 500));
    if (ep.timeout.count() <= 0) throw ConfigError("timeout_ms must be positive");
    if (ep.max_retries < 0) throw ConfigError("max_retries must be >= 0");
    split_url(ep.base_url);
    return ep;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("endpoint config: ") + e.what());
  }
}

ChatResult chat_complete(const ChatEndpoint& ep, const std::string& prompt,
                         const std::string& backend, const ReplyCheck& check) {
  const auto headers = auth_headers(ep, backend);
  nlohmann::json body = {
      {"model", ep.model_name},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
  };
  const auto payload = body.dump();

  ChatResult result;
  const auto t0 = std::chrono::steady_clock::now();
  result.attempts = with_retries(ep, backend, [&]() -> std::string {
    auto res = post_json(ep, "/chat/completions", payload, headers);
    if (!res) return "transport error: " + httplib::to_string(res.error());
    if (res->status != 200) {
      if (retryable_status(res->status)) return "HTTP " + std::to_string(res->status);
      throw RemoteError(backend, "HTTP " + std::to_string(res->status) + ": " + res->body);
    }
    try {
      auto j = nlohmann::json::parse(res->body);
      result.content = j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      return std::string("malformed response: ") + e.what();
    }
    return check ? check(result.content) : std::string{};
  });
  result.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - t0);
  return result;
}

std::vector<std::vector<double>> fetch_embeddings(const ChatEndpoint& ep,
                                                  const std::vector<std::string>& inputs,
                                                  const std::string& backend) {
  const auto headers = auth_headers(ep, backend);
  nlohmann::json body = {{"model", ep.model_name}, {"input", inputs}};
  const auto payload = body.dump();

  std::vector<std::vector<double>> vectors;
  with_retries(ep, backend, [&]() -> std::string {
    auto res = post_json(ep, "/embeddings", payload, headers);
    if (!res) return "transport error: " + httplib::to_string(res.error());
    if (res->status != 200) {
      if (retryable_status(res->status)) return "HTTP " + std::to_string(res->status);
      throw RemoteError(backend, "HTTP " + std::to_string(res->status) + ": " + res->body);
    }
    try {
      auto j = nlohmann::json::parse(res->body);
      vectors.clear();
      for (const auto& item : j.at("data")) {
        vectors.push_back(item.at("embedding").get<std::vector<double>>());
      }
    } catch (const nlohmann::json::exception& e) {
      return std::string("malformed response: ") + e.what();
    }
    if (vectors.size() != inputs.size()) return "embedding count mismatch";
    return {};
  });
  return vectors;
}

}  // namespace mask
