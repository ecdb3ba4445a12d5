#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace icl {

// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- corpus ---------------------------------------------------------------

class InvalidLangPair : public Error {
 public:
  explicit InvalidLangPair(const std::string& what) : Error("invalid language pair: " + what) {}
};

class LineCountMismatch : public Error {
 public:
  LineCountMismatch(std::size_t src_lines, std::size_t tgt_lines)
      : Error("line count mismatch: source has " + std::to_string(src_lines) +
              " lines, target has " + std::to_string(tgt_lines)),
        src_lines(src_lines),
        tgt_lines(tgt_lines) {}
  std::size_t src_lines;
  std::size_t tgt_lines;
};

// Line numbers are 1-based, as an editor shows them.
class InvalidUtf8 : public Error {
 public:
  explicit InvalidUtf8(std::size_t line_no)
      : Error("invalid UTF-8 on line " + std::to_string(line_no)), line_no(line_no) {}
  std::size_t line_no;
};

class EmptySegment : public Error {
 public:
  explicit EmptySegment(std::size_t line_no)
      : Error("empty segment on line " + std::to_string(line_no)), line_no(line_no) {}
  std::size_t line_no;
};

class MalformedLine : public Error {
 public:
  explicit MalformedLine(std::size_t line_no)
      : Error("malformed TSV record on line " + std::to_string(line_no) +
              " (expected exactly one tab)"),
        line_no(line_no) {}
  std::size_t line_no;
};

class SizeExceedsCorpus : public Error {
 public:
  SizeExceedsCorpus(std::size_t requested, std::size_t available)
      : Error("requested " + std::to_string(requested) + " pairs but corpus has " +
              std::to_string(available)),
        requested(requested),
        available(available) {}
  std::size_t requested;
  std::size_t available;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// ---- text analysis / retrieval ---------------------------------------------

class EmptyDocument : public Error {
 public:
  EmptyDocument() : Error("term frequency of an empty document is undefined") {}
};

class EmptyCollection : public Error {
 public:
  EmptyCollection() : Error("cannot fit TF-IDF on an empty collection") {}
};

class IndexFormatError : public Error {
 public:
  using Error::Error;
};

// ---- prompting -------------------------------------------------------------

class KExceedsPool : public Error {
 public:
  KExceedsPool(std::size_t k, std::size_t pool)
      : Error("cannot draw " + std::to_string(k) + " examples from a pool of " +
              std::to_string(pool)),
        k(k),
        pool(pool) {}
  std::size_t k;
  std::size_t pool;
};

// ---- llm client ------------------------------------------------------------

class AuthError : public Error {
 public:
  explicit AuthError(int status)
      : Error("backend rejected credentials (HTTP " + std::to_string(status) + ")"),
        status(status) {}
  int status;
};

class RateLimited : public Error {
 public:
  explicit RateLimited(std::size_t attempts)
      : Error("rate limited after " + std::to_string(attempts) + " attempts"),
        attempts(attempts) {}
  std::size_t attempts;
};

class BackendError : public Error {
 public:
  BackendError(int status, std::string body)
      : Error("backend error (HTTP " + std::to_string(status) + "): " + body),
        status(status),
        body(std::move(body)) {}
  int status;  // 0 when no HTTP response was received
  std::string body;
};

class MalformedResponse : public Error {
 public:
  explicit MalformedResponse(const std::string& what) : Error("malformed response: " + what) {}
};

// ---- metrics ---------------------------------------------------------------

class LengthMismatch : public Error {
 public:
  LengthMismatch(std::size_t hyps, std::size_t refs)
      : Error("got " + std::to_string(hyps) + " hypotheses but " + std::to_string(refs) +
              " references"),
        hyps(hyps),
        refs(refs) {}
  std::size_t hyps;
  std::size_t refs;
};

class ScorerUnavailable : public Error {
 public:
  explicit ScorerUnavailable(const std::string& what) : Error("COMET scorer unavailable: " + what) {}
};

class ScorerProtocolError : public Error {
 public:
  explicit ScorerProtocolError(const std::string& where)
      : Error("COMET scorer protocol error at " + where), where(where) {}
  std::string where;
};

class CountMismatch : public Error {
 public:
  CountMismatch(std::size_t sent, std::size_t received)
      : Error("sent " + std::to_string(sent) + " records but received " +
              std::to_string(received) + " scores"),
        sent(sent),
        received(received) {}
  std::size_t sent;
  std::size_t received;
};

// ---- configuration ---------------------------------------------------------

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config: " + what) {}
};

}  // namespace icl
