#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Minimal HTTP client surface shared by the chat client and the COMET scorer client.
// Keeps cpp-httplib confined to one translation unit.
namespace icl::http {

struct Response {
  int status = 0;         // 0 when the request never got a response
  std::string body;
  std::string transport_error;  // set when status == 0
  bool timed_out = false;
};

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;    // starts with '/'
};

/// Throws icl::Error for URLs without an http(s) scheme.
Url parse_url(std::string_view url);

using Headers = std::vector<std::pair<std::string, std::string>>;

Response post_json(const Url& url, const std::string& body, const Headers& headers,
                   double timeout_seconds);
Response get(const Url& url, double timeout_seconds);

}  // namespace icl::http
