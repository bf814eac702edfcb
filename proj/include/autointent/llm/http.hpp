#pragma once

#include <chrono>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <random>
#include <optional>
#include <string>

#include <json.hpp>

namespace autointent::llm {

class Clock {
 public:
  using duration = std::chrono::milliseconds;
  using time_point = std::chrono::time_point<std::chrono::steady_clock, duration>;

  virtual ~Clock() = default;
  virtual time_point now() = 0;
  virtual void sleep_for(duration d) = 0;
};

class SystemClock final : public Clock {
 public:
  time_point now() override;
  void sleep_for(duration d) override;
};

// Sleeping advances time instantly; used to test backoff and rate limits.
class VirtualClock final : public Clock {
 public:
  time_point now() override;
  void sleep_for(duration d) override;
  duration total_slept() const;

 private:
  mutable std::mutex mutex_;
  duration elapsed_{0};
  duration slept_{0};
};

// Sliding-window limiter: at most `per_minute` acquisitions fall inside any
// 60-second window. per_minute <= 0 disables limiting.
class RateLimiter {
 public:
  RateLimiter(int per_minute, std::shared_ptr<Clock> clock);
  void acquire();

 private:
  int per_minute_;
  std::shared_ptr<Clock> clock_;
  std::mutex mutex_;
  std::deque<Clock::time_point> dispatched_;
};

struct RetryPolicy {
  std::chrono::milliseconds base{1000};
  double factor = 2.0;
  std::chrono::milliseconds cap{32000};
  int max_attempts = 5;

  /// Un-jittered delay before retry number `retry` (1-based).
  std::chrono::milliseconds delay(int retry) const;
};

struct HttpResult {
  int status = 0;          // 0 when the transport failed before a response
  std::string body;
  std::string transport_error;
};

struct HttpEndpointConfig {
  std::string url;  // scheme://host[:port]/path
  std::string api_key;
  std::chrono::seconds timeout{60};
  int requests_per_minute = 0;
  RetryPolicy retry;
  std::uint64_t jitter_seed = 0;
};

struct ParsedUrl {
  std::string scheme_host_port;
  std::string path;
};
/// Throws ConfigError on anything but http(s) URLs.
ParsedUrl parse_url(const std::string& url);

// POSTs JSON bodies with retry on 429/5xx/transport failures (exponential
// backoff, jitter in [d/2, d]) and a shared rate limiter. 401/403 raise
// AuthError at once; other 4xx raise BackendError without retry.
class HttpTransport {
 public:
  using Sender = std::function<HttpResult(const std::string& body)>;

  explicit HttpTransport(HttpEndpointConfig config, std::shared_ptr<Clock> clock = nullptr);
  /// Replaces the network call; used by tests.
  HttpTransport(HttpEndpointConfig config, Sender sender, std::shared_ptr<Clock> clock);

  nlohmann::json post_json(const nlohmann::json& body);

  std::size_t retries() const;
  std::size_t dispatched() const;

 private:
  HttpResult send_http(const std::string& body) const;

  HttpEndpointConfig config_;
  ParsedUrl url_;
  Sender sender_;
  std::shared_ptr<Clock> clock_;
  RateLimiter limiter_;
  mutable std::mutex mutex_;
  std::mt19937_64 jitter_;
  std::size_t retries_ = 0;
  std::size_t dispatched_ = 0;
};

/// Requests sent over a real socket by any transport in this process.
std::size_t network_requests();

/// Reads the credential from `env_var`, falling back to `configured`.
std::string resolve_api_key(const std::string& env_var, const std::string& configured);

}  // namespace autointent::llm
