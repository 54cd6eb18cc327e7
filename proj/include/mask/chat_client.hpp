#pragma once

#include <chrono>
#include <functional>
#include <string>

#include <json.hpp>

namespace mask {

/// Connection settings for an OpenAI-style chat-completions endpoint.
struct ChatEndpoint {
  std::string base_url;  // scheme://host[:port][/prefix]
  std::string model_name;
  std::string api_key_env;  // empty: no credential sent
  std::chrono::milliseconds timeout{30000};
  int max_retries = 2;
  std::chrono::milliseconds backoff_base{500};
};

ChatEndpoint chat_endpoint_from_json(const nlohmann::json& j);

struct ChatResult {
  std::string content;
  int attempts = 0;  // 1 + retries
  std::chrono::milliseconds latency{0};
};

/// Validates a reply; returns an error message to trigger a retry, or empty to accept.
using ReplyCheck = std::function<std::string(const std::string& content)>;

/// POST {base_url}/chat/completions with a single user message.
///
/// Transport errors, 429, 5xx, malformed bodies, and replies rejected by
/// `check` are retried up to max_retries times, sleeping backoff_base * 2^k
/// before retry k. Other HTTP statuses and a missing credential fail
/// immediately. Throws RemoteError tagged with `backend`.
ChatResult chat_complete(const ChatEndpoint& endpoint, const std::string& prompt,
                         const std::string& backend, const ReplyCheck& check = {});

/// Same retry policy for POST {base_url}/embeddings; returns one vector per input.
std::vector<std::vector<double>> fetch_embeddings(const ChatEndpoint& endpoint,
                                                  const std::vector<std::string>& inputs,
                                                  const std::string& backend);

}  // namespace mask
