#include "icl/log.hpp"

#include <iostream>
#include <mutex>
#include <vector>

namespace icl::log {

namespace {

std::string_view level_name(Level level) {
  switch (level) {
    case Level::kDebug: return "debug";
    case Level::kInfo: return "info";
    case Level::kWarn: return "warn";
    case Level::kError: return "error";
  }
  return "?";
}

struct State {
  std::mutex mu;
  Sink sink = [](Level level, std::string_view msg) {
    std::cerr << "[" << level_name(level) << "] " << msg << '\n';
  };
  Level min_level = Level::kInfo;
  std::vector<std::string> secrets;
};

State& state() {
  static State s;
  return s;
}

std::string redact_locked(std::string text, const std::vector<std::string>& secrets) {
  for (const auto& secret : secrets) {
    for (auto pos = text.find(secret); pos != std::string::npos; pos = text.find(secret, pos + 3)) {
      text.replace(pos, secret.size(), "***");
    }
  }
  return text;
}

}  // namespace

Sink set_sink(Sink sink) {
  std::lock_guard lock(state().mu);
  std::swap(state().sink, sink);
  return sink;
}

void set_min_level(Level level) {
  std::lock_guard lock(state().mu);
  state().min_level = level;
}

void add_secret(std::string secret) {
  if (secret.empty()) return;
  std::lock_guard lock(state().mu);
  state().secrets.push_back(std::move(secret));
}

std::string redact(std::string text) {
  std::lock_guard lock(state().mu);
  return redact_locked(std::move(text), state().secrets);
}

void write(Level level, std::string_view message) {
  std::lock_guard lock(state().mu);
  auto& s = state();
  if (level < s.min_level || !s.sink) return;
  s.sink(level, redact_locked(std::string(message), s.secrets));
}

}  // namespace icl::log
