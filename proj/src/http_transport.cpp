#include "folk/http.hpp"

#include "folk/errors.hpp"

#ifdef FOLK_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include "httplib.h"

namespace folk {

namespace {

struct UrlParts {
  std::string origin;  // scheme://host[:port]
  std::string target;  // path[?query]
};

UrlParts split_url(const std::string& url) {
  std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw NetworkError("malformed url: " + url);
  std::size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

httplib::Headers to_httplib(const std::vector<HttpHeader>& headers) {
  httplib::Headers out;
  for (const HttpHeader& h : headers) out.emplace(h.name, h.value);
  return out;
}

HttpResponse from_result(const httplib::Result& res, const std::string& url) {
  if (!res) throw NetworkError("request to " + url + " failed: " + httplib::to_string(res.error()));
  return HttpResponse{res->status, res->body};
}

class HttplibTransport : public HttpTransport {
 public:
  explicit HttplibTransport(long timeout_ms) : timeout_ms_(timeout_ms) {}

  HttpResponse get(const std::string& url, const std::vector<HttpHeader>& headers) override {
    UrlParts parts = split_url(url);
    httplib::Client client(parts.origin);
    configure(client);
    return from_result(client.Get(parts.target, to_httplib(headers)), url);
  }

  HttpResponse post(const std::string& url, const std::vector<HttpHeader>& headers,
                    const std::string& body, const std::string& content_type) override {
    UrlParts parts = split_url(url);
    httplib::Client client(parts.origin);
    configure(client);
    return from_result(client.Post(parts.target, to_httplib(headers), body, content_type), url);
  }

 private:
  void configure(httplib::Client& client) {
    client.set_connection_timeout(std::chrono::milliseconds(timeout_ms_));
    client.set_read_timeout(std::chrono::milliseconds(timeout_ms_));
    client.set_write_timeout(std::chrono::milliseconds(timeout_ms_));
    client.set_follow_location(true);
  }

  long timeout_ms_;
};

}  // namespace

std::shared_ptr<HttpTransport> make_http_transport(long timeout_ms) {
  return std::make_shared<HttplibTransport>(timeout_ms);
}

}  // namespace folk
