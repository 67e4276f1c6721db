#include "core/annotate.hpp"

#include "core/errors.hpp"

#include <httplib.h>

namespace eventalpha {

namespace {

// "http://host:port/path" -> ("http://host:port", "/path")
std::pair<std::string, std::string> split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        fail_validation("BadUrl", "endpoint URL lacks a scheme: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

class HttplibTransport final : public HttpTransport {
public:
    explicit HttplibTransport(int timeout_seconds) : timeout_seconds_(timeout_seconds) {}

    Response post(const std::string& url, const std::string& body,
                  const std::string& auth_token) override {
        auto [base, path] = split_url(url);
        httplib::Client client(base);
        client.set_connection_timeout(timeout_seconds_, 0);
        client.set_read_timeout(timeout_seconds_, 0);
        client.set_write_timeout(timeout_seconds_, 0);
        httplib::Headers headers;
        if (!auth_token.empty()) headers.emplace("Authorization", "Bearer " + auth_token);
        auto result = client.Post(path, headers, body, "application/json");
        Response out;
        if (!result) {
            out.transport_ok = false;
            out.error = httplib::to_string(result.error());
            return out;
        }
        out.transport_ok = true;
        out.status = result->status;
        out.body = result->body;
        return out;
    }

private:
    int timeout_seconds_;
};

} // namespace

std::unique_ptr<HttpTransport> make_http_transport(int timeout_seconds) {
    return std::make_unique<HttplibTransport>(timeout_seconds);
}

} // namespace eventalpha
