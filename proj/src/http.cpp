#include "http.hpp"

#include <httplib.h>

#include "icl/error.hpp"

namespace icl::http {

Url parse_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) throw Error("not an http(s) URL: " + std::string(url));
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error("unsupported URL scheme: " + std::string(scheme));
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string_view::npos) return {std::string(url), "/"};
  return {std::string(url.substr(0, path_start)), std::string(url.substr(path_start))};
}

namespace {

httplib::Client make_client(const Url& url, double timeout_seconds) {
  httplib::Client client(url.origin);
  const auto secs = static_cast<time_t>(timeout_seconds);
  const auto usecs = static_cast<time_t>((timeout_seconds - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  return client;
}

Response convert(const httplib::Result& result) {
  Response r;
  if (!result) {
    r.transport_error = httplib::to_string(result.error());
    r.timed_out = result.error() == httplib::Error::Read ||
                  result.error() == httplib::Error::Write ||
                  result.error() == httplib::Error::ConnectionTimeout;
    return r;
  }
  r.status = result->status;
  r.body = result->body;
  return r;
}

}  // namespace

Response post_json(const Url& url, const std::string& body, const Headers& headers,
                   double timeout_seconds) {
  auto client = make_client(url, timeout_seconds);
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);
  return convert(client.Post(url.path, h, body, "application/json"));
}

Response get(const Url& url, double timeout_seconds) {
  auto client = make_client(url, timeout_seconds);
  return convert(client.Get(url.path));
}

}  // namespace icl::http
