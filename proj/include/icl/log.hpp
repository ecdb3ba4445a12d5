#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace icl::log {

enum class Level { kDebug, kInfo, kWarn, kError };

using Sink = std::function<void(Level, std::string_view)>;

/// Replaces the process-wide sink (default: stderr, info and above). Returns the old one.
Sink set_sink(Sink sink);
void set_min_level(Level level);

/// Registers a secret that is masked as "***" in every emitted line.
void add_secret(std::string secret);

void write(Level level, std::string_view message);
inline void debug(std::string_view m) { write(Level::kDebug, m); }
inline void info(std::string_view m) { write(Level::kInfo, m); }
inline void warn(std::string_view m) { write(Level::kWarn, m); }
inline void error(std::string_view m) { write(Level::kError, m); }

/// Masks every registered secret in `text`.
std::string redact(std::string text);

}  // namespace icl::log
