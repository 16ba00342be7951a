#pragma once

// Discovery oracle backed by an HTTP endpoint (typically an LLM gateway).
// POSTs the request JSON and expects the ranking JSON back.

#include <chrono>
#include <cstdlib>
#include <string>
#include <thread>

#include <httplib.h>

#include "intellimove/discovery.hpp"

namespace intellimove {

struct HttpOracleConfig {
  std::string url;  // http://host[:port]/path
  std::string token;
  double timeout_s = 10.0;
  int retries = 2;
  int backoff_ms = 200;  // doubled after each failed attempt

  static HttpOracleConfig from_env() {
    HttpOracleConfig c;
    if (const char* u = std::getenv("INTELLIMOVE_ORACLE_URL")) c.url = u;
    if (const char* t = std::getenv("INTELLIMOVE_ORACLE_TOKEN")) c.token = t;
    return c;
  }
};

class HttpOracle final : public GoalOracle {
 public:
  explicit HttpOracle(HttpOracleConfig config) : config_(std::move(config)) {
    const auto scheme_end = config_.url.find("://");
    if (config_.url.rfind("http://", 0) != 0 || scheme_end == std::string::npos)
      throw ConfigError("oracle URL must start with http:// (got '" + config_.url + "')");
    const auto path_start = config_.url.find('/', scheme_end + 3);
    origin_ = config_.url.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : config_.url.substr(path_start);
    if (origin_.size() <= 7) throw ConfigError("oracle URL has no host");
  }

  // Safe to call concurrently: each query owns its client.
  DiscoveryResponse query(const std::vector<RoomContext>& contexts, const GoalQuery& goal) const override {
    const std::string body = discovery_request_json(contexts, goal).dump();
    httplib::Headers headers;
    if (!config_.token.empty()) headers.emplace("Authorization", "Bearer " + config_.token);

    const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::duration<double>(config_.timeout_s));
    std::string last_error;
    int backoff = config_.backoff_ms;
    for (int attempt = 0; attempt <= config_.retries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
        backoff *= 2;
      }
      httplib::Client client(origin_);
      client.set_connection_timeout(timeout);
      client.set_read_timeout(timeout);
      client.set_write_timeout(timeout);
      auto res = client.Post(path_, headers, body, "application/json");
      if (!res) {
        last_error = httplib::to_string(res.error());
        continue;
      }
      if (res->status < 200 || res->status >= 300) {
        last_error = "HTTP status " + std::to_string(res->status);
        continue;
      }
      return parse_discovery_response(res->body);
    }
    throw DiscoveryFailedError("oracle at " + config_.url + " failed after " + std::to_string(config_.retries + 1) +
                               " attempts: " + last_error);
  }

  std::string name() const override { return "http"; }

 private:
  HttpOracleConfig config_;
  std::string origin_;
  std::string path_;
};

}  // namespace intellimove
