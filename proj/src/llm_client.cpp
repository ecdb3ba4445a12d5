#include "icl/llm_client.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <random>
#include <thread>

#include "http.hpp"
#include "icl/error.hpp"
#include "icl/log.hpp"

namespace icl {

using nlohmann::json;

void BackendConfig::validate() const {
  if (!(timeout_seconds > 0.0)) throw ConfigError("backend timeout must be > 0");
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw ConfigError("backend temperature must be within [0, 2]");
  }
  if (max_in_flight < 1) throw ConfigError("backend max_in_flight must be >= 1");
  if (backoff_base_seconds < 0.0) throw ConfigError("backend backoff must be >= 0");
}

std::string api_key_from_env(std::string_view var) {
  const char* v = std::getenv(std::string(var).c_str());
  return v ? std::string(v) : std::string();
}

std::string chat_request_body(const BackendConfig& config, std::span<const ChatMessage> messages) {
  json body;
  body["model"] = config.model_name;
  body["messages"] = json::array();
  for (const auto& m : messages) {
    body["messages"].push_back({{"role", to_string(m.role)}, {"content", m.content}});
  }
  body["temperature"] = config.temperature;
  return body.dump();
}

namespace {

std::string trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\v\f";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

bool retryable(const http::Response& r) {
  if (r.status == 0) return r.timed_out;
  return r.status == 429 || r.status >= 500;
}

}  // namespace

std::string parse_chat_response(std::string_view body) {
  const auto doc = json::parse(body, nullptr, false);
  if (doc.is_discarded()) throw MalformedResponse("body is not JSON");
  if (!doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty()) {
    throw MalformedResponse("missing choices[0]");
  }
  const auto& choice = doc["choices"][0];
  if (!choice.contains("message") || !choice["message"].contains("content") ||
      !choice["message"]["content"].is_string()) {
    throw MalformedResponse("missing choices[0].message.content");
  }
  return trim(choice["message"]["content"].get<std::string>());
}

HttpChatBackend::HttpChatBackend(BackendConfig config)
    : config_(std::move(config)),
      in_flight_(std::make_unique<std::counting_semaphore<>>(
          static_cast<std::ptrdiff_t>(config_.max_in_flight))) {
  config_.validate();
  log::add_secret(config_.api_key);
}

CompletionResult HttpChatBackend::complete(std::span<const ChatMessage> messages) {
  if (messages.empty()) throw Error("cannot complete an empty conversation");
  const auto url = http::parse_url(config_.endpoint_url);
  const auto body = chat_request_body(config_, messages);
  http::Headers headers;
  if (!config_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + config_.api_key);

  std::mt19937_64 jitter_rng(std::random_device{}());
  std::uniform_real_distribution<double> jitter(0.5, 1.5);

  const auto start = std::chrono::steady_clock::now();
  http::Response last;
  std::size_t attempt = 0;
  while (true) {
    ++attempt;
    {
      in_flight_->acquire();
      last = http::post_json(url, body, headers, config_.timeout_seconds);
      in_flight_->release();
    }
    if (last.status == 200) {
      const auto elapsed = std::chrono::steady_clock::now() - start;
      return {parse_chat_response(last.body),
              std::chrono::duration<double, std::milli>(elapsed).count(), attempt};
    }
    if (last.status == 401 || last.status == 403) throw AuthError(last.status);
    if (!retryable(last)) {
      if (last.status == 0) throw BackendError(0, log::redact(last.transport_error));
      throw BackendError(last.status, log::redact(last.body));
    }
    if (attempt > config_.max_retries) break;

    const double delay = config_.backoff_base_seconds *
                         static_cast<double>(std::uint64_t{1} << std::min<std::size_t>(attempt - 1, 20)) *
                         jitter(jitter_rng);
    log::warn("chat request attempt " + std::to_string(attempt) + " failed (" +
              (last.status ? "HTTP " + std::to_string(last.status) : last.transport_error) +
              "); retrying in " + std::to_string(delay) + " s");
    std::this_thread::sleep_for(std::chrono::duration<double>(delay));
  }

  if (last.status == 429) throw RateLimited(attempt);
  if (last.status == 0) throw BackendError(0, log::redact(last.transport_error));
  throw BackendError(last.status, log::redact(last.body));
}

CompletionResult complete_chat(const BackendConfig& config, std::span<const ChatMessage> messages) {
  return HttpChatBackend(config).complete(messages);
}

std::uint64_t message_hash(std::span<const ChatMessage> messages) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;  // field separator
    h *= 0x100000001b3ULL;
  };
  for (const auto& m : messages) {
    mix(to_string(m.role));
    mix(m.content);
  }
  return h;
}

std::string first_example_target(std::span<const ChatMessage> messages) {
  constexpr std::string_view kHeader = "Here are some examples";
  for (const auto& m : messages) {
    if (m.role != Role::kSystem) continue;
    const auto header = m.content.find(kHeader);
    if (header == std::string::npos) continue;
    // Block layout after the header line: "<Src>: text\n<Tgt>: text\n".
    const auto src_line = m.content.find('\n', header);
    if (src_line == std::string::npos) continue;
    const auto tgt_line = m.content.find('\n', src_line + 1);
    if (tgt_line == std::string::npos) continue;
    auto tgt_end = m.content.find('\n', tgt_line + 1);
    if (tgt_end == std::string::npos) tgt_end = m.content.size();
    const std::string_view line(m.content.data() + tgt_line + 1, tgt_end - tgt_line - 1);
    const auto colon = line.find(": ");
    if (colon == std::string_view::npos) continue;
    return std::string(line.substr(colon + 2));
  }
  return "MOCK";
}

MockChatBackend::MockChatBackend(MockScript script) : script_(std::move(script)) {}

std::size_t MockChatBackend::call_count() const {
  std::lock_guard lock(mu_);
  return calls_;
}

CompletionResult MockChatBackend::complete(std::span<const ChatMessage> messages) {
  if (messages.empty()) throw Error("cannot complete an empty conversation");
  std::size_t ordinal;
  {
    std::lock_guard lock(mu_);
    ordinal = calls_++;
  }
  if (auto it = script_.by_hash.find(message_hash(messages)); it != script_.by_hash.end()) {
    return {it->second, 0.0, 1};
  }
  if (auto it = script_.by_ordinal.find(ordinal); it != script_.by_ordinal.end()) {
    return {it->second, 0.0, 1};
  }
  if (script_.echo_user) {
    for (const auto& m : messages) {
      if (m.role == Role::kUser) return {m.content, 0.0, 1};
    }
  }
  return {first_example_target(messages), 0.0, 1};
}

std::unique_ptr<ChatBackend> mock_backend(MockScript script) {
  return std::make_unique<MockChatBackend>(std::move(script));
}

}  // namespace icl
