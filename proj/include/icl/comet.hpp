#pragma once

#include <span>
#include <string>
#include <vector>

namespace icl {

struct CometRecord {
  std::string source;
  std::string hypothesis;
  std::string reference;
};

struct CometResult {
  std::vector<double> scores;
  double mean = 0.0;
  std::string checkpoint;
};

/// Request body of the scorer protocol: {"records":[{"src","mt","ref"},...]}.
/// Throws ScorerProtocolError naming the first empty field (e.g. "records[2].mt").
std::string comet_request_body(std::span<const CometRecord> records);

/// Parses {"scores":[...], "checkpoint":"..."}; throws ScorerProtocolError or CountMismatch.
CometResult parse_comet_response(std::string_view body, std::size_t expected);

/// Client for an external COMET scorer.
///
/// An endpoint starting with http:// or https:// is a scoring service (POST <endpoint>/score).
/// Anything else is a shell command speaking the line protocol: the request is written to
/// its stdin as one JSON line and one JSON response line is read from its stdout.
class CometScorer {
 public:
  explicit CometScorer(std::string endpoint, double timeout_seconds = 600.0);

  const std::string& endpoint() const { return endpoint_; }

  /// One score per record, in order, plus their arithmetic mean.
  /// Throws ScorerUnavailable, ScorerProtocolError or CountMismatch.
  CometResult score(std::span<const CometRecord> records) const;

 private:
  CometResult score_http(const std::string& body, std::size_t n) const;
  CometResult score_command(const std::string& body, std::size_t n) const;

  std::string endpoint_;
  double timeout_seconds_;
};

inline CometResult comet_scores(const std::string& endpoint, std::span<const CometRecord> records) {
  return CometScorer(endpoint).score(records);
}

}  // namespace icl
