#include <httplib.h>

#include "rifl/genbackend.hpp"

namespace rifl {

namespace {

class HttplibTransport final : public Transport {
 public:
  explicit HttplibTransport(const BackendConfig& config) {
    auto url = config.base_url;
    while (!url.empty() && url.back() == '/') url.pop_back();
    const auto scheme_end = url.find("://");
    const auto host_begin = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const auto path_begin = url.find('/', host_begin);
    origin_ = path_begin == std::string::npos ? url : url.substr(0, path_begin);
    prefix_ = path_begin == std::string::npos ? std::string{} : url.substr(path_begin);
    timeout_ = config.request_timeout;
  }

  HttpReply post(const std::string& path, const std::string& body, const Headers& headers) override {
    // One client per call keeps the transport safe under concurrent use.
    httplib::Client client(origin_);
    if (!client.is_valid()) return {0, {}, "unsupported base URL " + origin_};
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    httplib::Headers h;
    std::string content_type = "application/json";
    for (const auto& [k, v] : headers) {
      if (k == "Content-Type") {
        content_type = v;
      } else {
        h.emplace(k, v);
      }
    }
    auto res = client.Post(prefix_ + path, h, body, content_type);
    if (!res) return {0, {}, httplib::to_string(res.error())};
    return {res->status, res->body, {}};
  }

 private:
  std::string origin_;
  std::string prefix_;
  std::chrono::milliseconds timeout_{};
};

}  // namespace

std::unique_ptr<Transport> make_http_transport(const BackendConfig& config) {
  return std::make_unique<HttplibTransport>(config);
}

}  // namespace rifl
