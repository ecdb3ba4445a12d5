#include "icl/comet.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "http.hpp"
#include "icl/error.hpp"
#include "icl/random.hpp"

namespace icl {

using nlohmann::json;

std::string comet_request_body(std::span<const CometRecord> records) {
  if (records.empty()) throw ScorerProtocolError("records (empty batch)");
  json doc;
  doc["records"] = json::array();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const auto where = "records[" + std::to_string(i) + "].";
    if (r.source.empty()) throw ScorerProtocolError(where + "src");
    if (r.hypothesis.empty()) throw ScorerProtocolError(where + "mt");
    if (r.reference.empty()) throw ScorerProtocolError(where + "ref");
    doc["records"].push_back({{"src", r.source}, {"mt", r.hypothesis}, {"ref", r.reference}});
  }
  return doc.dump();
}

CometResult parse_comet_response(std::string_view body, std::size_t expected) {
  const auto doc = json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw ScorerProtocolError("response (not a JSON object)");
  if (!doc.contains("scores") || !doc["scores"].is_array()) throw ScorerProtocolError("scores");

  CometResult out;
  const auto& scores = doc["scores"];
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!scores[i].is_number() || !std::isfinite(scores[i].get<double>())) {
      throw ScorerProtocolError("scores[" + std::to_string(i) + "]");
    }
    out.scores.push_back(scores[i].get<double>());
  }
  if (out.scores.size() != expected) throw CountMismatch(expected, out.scores.size());
  if (doc.contains("checkpoint")) {
    if (!doc["checkpoint"].is_string()) throw ScorerProtocolError("checkpoint");
    out.checkpoint = doc["checkpoint"].get<std::string>();
  }
  out.mean = std::accumulate(out.scores.begin(), out.scores.end(), 0.0) /
             static_cast<double>(out.scores.size());
  return out;
}

CometScorer::CometScorer(std::string endpoint, double timeout_seconds)
    : endpoint_(std::move(endpoint)), timeout_seconds_(timeout_seconds) {}

CometResult CometScorer::score(std::span<const CometRecord> records) const {
  const auto body = comet_request_body(records);
  if (endpoint_.starts_with("http://") || endpoint_.starts_with("https://")) {
    return score_http(body, records.size());
  }
  return score_command(body, records.size());
}

CometResult CometScorer::score_http(const std::string& body, std::size_t n) const {
  auto url = http::parse_url(endpoint_);
  if (!url.path.ends_with("/score")) {
    url.path = (url.path == "/" ? "" : url.path) + "/score";
  }
  const auto r = http::post_json(url, body, {}, timeout_seconds_);
  if (r.status == 0) throw ScorerUnavailable(r.transport_error);
  if (r.status == 503) throw ScorerUnavailable("model still loading (HTTP 503)");
  if (r.status == 400) throw ScorerProtocolError("request rejected: " + r.body);
  if (r.status != 200) throw ScorerUnavailable("HTTP " + std::to_string(r.status));
  return parse_comet_response(r.body, n);
}

CometResult CometScorer::score_command(const std::string& body, std::size_t n) const {
  namespace fs = std::filesystem;
  Rng rng(std::random_device{}());
  const auto request_path =
      fs::temp_directory_path() / ("icl-comet-" + std::to_string(rng()) + ".jsonl");
  {
    std::ofstream out(request_path, std::ios::binary);
    if (!out) throw ScorerUnavailable("cannot stage request file");
    out << body << '\n';
  }
  const auto command = endpoint_ + " < '" + request_path.string() + "'";
  std::string output;
  int status = -1;
  if (FILE* pipe = ::popen(command.c_str(), "r")) {
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) output.append(buf, got);
    status = ::pclose(pipe);
  }
  std::error_code ec;
  fs::remove(request_path, ec);
  if (status != 0) throw ScorerUnavailable("scorer command exited with status " + std::to_string(status));

  const auto nl = output.find('\n');
  return parse_comet_response(std::string_view(output).substr(0, nl), n);
}

}  // namespace icl
