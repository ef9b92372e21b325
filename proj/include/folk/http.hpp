#ifndef FOLK_HTTP_HPP
#define FOLK_HTTP_HPP

#include <memory>
#include <string>
#include <vector>

namespace folk {

struct HttpResponse {
  int status = 0;
  std::string body;
};

struct HttpHeader {
  std::string name;
  std::string value;
};

// Minimal transport seam so backends and search providers can be exercised
// with stub transports in tests. Implementations throw NetworkError on
// connection-level failures.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse get(const std::string& url, const std::vector<HttpHeader>& headers) = 0;
  virtual HttpResponse post(const std::string& url, const std::vector<HttpHeader>& headers,
                            const std::string& body, const std::string& content_type) = 0;
};

// cpp-httplib backed transport (HTTPS when built with OpenSSL support).
std::shared_ptr<HttpTransport> make_http_transport(long timeout_ms = 30000);

}  // namespace folk

#endif  // FOLK_HTTP_HPP
