#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>

#include "icl/prompting.hpp"

namespace icl {

struct BackendConfig {
  std::string endpoint_url = "https://api.openai.com/v1/chat/completions";
  std::string model_name = "gpt-4";
  std::string api_key;  // normally taken from ICL_API_KEY
  double timeout_seconds = 60.0;
  std::size_t max_retries = 5;
  double temperature = 0.0;
  std::size_t max_in_flight = 1;
  double backoff_base_seconds = 1.0;  // first retry delay; doubles per attempt, with jitter

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

inline constexpr std::string_view kApiKeyEnv = "ICL_API_KEY";

/// Value of ICL_API_KEY, or empty.
std::string api_key_from_env(std::string_view var = kApiKeyEnv);

struct CompletionResult {
  std::string text;
  double latency_ms = 0.0;
  std::size_t attempt_count = 1;
};

/// Anything that turns a chat prompt into a reply. Implementations are safe to share
/// between threads.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual CompletionResult complete(std::span<const ChatMessage> messages) = 0;
  virtual std::string model_name() const = 0;
};

/// Request body sent to a chat-completions endpoint: {model, messages, temperature}.
std::string chat_request_body(const BackendConfig& config, std::span<const ChatMessage> messages);

/// Extracts choices[0].message.content, trimmed. Throws MalformedResponse.
std::string parse_chat_response(std::string_view body);

/// Chat-completions client over HTTP(S) with retry and an in-flight request limit.
///
/// 429, 5xx and transport timeouts are retried up to max_retries times with exponential
/// backoff; 401/403 raise AuthError at once and other 4xx raise BackendError at once.
class HttpChatBackend final : public ChatBackend {
 public:
  explicit HttpChatBackend(BackendConfig config);
  CompletionResult complete(std::span<const ChatMessage> messages) override;
  std::string model_name() const override { return config_.model_name; }

 private:
  BackendConfig config_;
  std::unique_ptr<std::counting_semaphore<>> in_flight_;
};

CompletionResult complete_chat(const BackendConfig& config, std::span<const ChatMessage> messages);

/// Order-sensitive FNV-1a hash over every (role, content) pair.
std::uint64_t message_hash(std::span<const ChatMessage> messages);

struct MockScript {
  std::map<std::size_t, std::string> by_ordinal;     // n-th call (0-based)
  std::map<std::uint64_t, std::string> by_hash;      // message_hash of the prompt
  bool echo_user = false;                            // reply with the user message content
};

/// Offline backend. Reply precedence: hash script, ordinal script, echo mode, then the
/// default rule: the target text of the first example block in the system message, or
/// "MOCK" when the prompt carries no examples.
class MockChatBackend final : public ChatBackend {
 public:
  explicit MockChatBackend(MockScript script = {});
  CompletionResult complete(std::span<const ChatMessage> messages) override;
  std::string model_name() const override { return "mock"; }

  std::size_t call_count() const;

 private:
  MockScript script_;
  mutable std::mutex mu_;
  std::size_t calls_ = 0;
};

std::unique_ptr<ChatBackend> mock_backend(MockScript script = {});

/// The default mock rule on its own.
std::string first_example_target(std::span<const ChatMessage> messages);

}  // namespace icl
