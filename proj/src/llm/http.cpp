#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "autointent/llm/http.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "autointent/errors.hpp"

namespace autointent::llm {

Clock::time_point SystemClock::now() {
  return std::chrono::time_point_cast<duration>(std::chrono::steady_clock::now());
}

void SystemClock::sleep_for(duration d) { std::this_thread::sleep_for(d); }

Clock::time_point VirtualClock::now() {
  std::lock_guard lock(mutex_);
  return time_point(elapsed_);
}

void VirtualClock::sleep_for(duration d) {
  std::lock_guard lock(mutex_);
  elapsed_ += d;
  slept_ += d;
}

Clock::duration VirtualClock::total_slept() const {
  std::lock_guard lock(mutex_);
  return slept_;
}

RateLimiter::RateLimiter(int per_minute, std::shared_ptr<Clock> clock)
    : per_minute_(per_minute), clock_(std::move(clock)) {}

void RateLimiter::acquire() {
  if (per_minute_ <= 0) return;
  constexpr Clock::duration kWindow = std::chrono::minutes(1);
  std::lock_guard lock(mutex_);
  for (;;) {
    const auto now = clock_->now();
    while (!dispatched_.empty() && dispatched_.front() + kWindow <= now) dispatched_.pop_front();
    if (static_cast<int>(dispatched_.size()) < per_minute_) {
      dispatched_.push_back(now);
      return;
    }
    clock_->sleep_for(dispatched_.front() + kWindow - now);
  }
}

std::chrono::milliseconds RetryPolicy::delay(int retry) const {
  const double raw = static_cast<double>(base.count()) * std::pow(factor, retry - 1);
  const double capped = std::min(raw, static_cast<double>(cap.count()));
  return std::chrono::milliseconds(static_cast<long long>(capped));
}

ParsedUrl parse_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint URL lacks a scheme: " + url);
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw ConfigError("unsupported URL scheme: " + scheme);
  const auto path_start = url.find('/', scheme_end + 3);
  ParsedUrl out;
  if (path_start == std::string::npos) {
    out.scheme_host_port = url;
    out.path = "/";
  } else {
    out.scheme_host_port = url.substr(0, path_start);
    out.path = url.substr(path_start);
  }
  if (out.scheme_host_port.size() <= scheme_end + 3) throw ConfigError("endpoint URL lacks a host: " + url);
  return out;
}

HttpTransport::HttpTransport(HttpEndpointConfig config, std::shared_ptr<Clock> clock)
    : config_(std::move(config)),
      url_(parse_url(config_.url)),
      clock_(clock ? std::move(clock) : std::make_shared<SystemClock>()),
      limiter_(config_.requests_per_minute, clock_),
      jitter_(config_.jitter_seed) {
  sender_ = [this](const std::string& body) { return send_http(body); };
}

HttpTransport::HttpTransport(HttpEndpointConfig config, Sender sender, std::shared_ptr<Clock> clock)
    : config_(std::move(config)),
      url_(parse_url(config_.url)),
      sender_(std::move(sender)),
      clock_(clock ? std::move(clock) : std::make_shared<SystemClock>()),
      limiter_(config_.requests_per_minute, clock_),
      jitter_(config_.jitter_seed) {}

namespace {
std::atomic<std::size_t> g_network_requests{0};
}  // namespace

std::size_t network_requests() { return g_network_requests.load(); }

HttpResult HttpTransport::send_http(const std::string& body) const {
  g_network_requests.fetch_add(1);
  httplib::Client client(url_.scheme_host_port);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(config_.timeout);
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
  auto res = client.Post(url_.path, headers, body, "application/json");
  if (!res) return HttpResult{0, {}, httplib::to_string(res.error())};
  return HttpResult{res->status, res->body, {}};
}

nlohmann::json HttpTransport::post_json(const nlohmann::json& body) {
  const std::string payload = body.dump();
  const int attempts = std::max(1, config_.retry.max_attempts);
  std::string last_failure;
  std::optional<int> last_status;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    limiter_.acquire();
    {
      std::lock_guard lock(mutex_);
      ++dispatched_;
    }
    HttpResult r = sender_(payload);
    if (r.status >= 200 && r.status < 300) {
      try {
        return nlohmann::json::parse(r.body);
      } catch (const nlohmann::json::parse_error& e) {
        throw BackendError(std::string("response is not JSON: ") + e.what(), r.status);
      }
    }
    if (r.status == 401 || r.status == 403)
      throw AuthError("authentication rejected (HTTP " + std::to_string(r.status) + ")", r.status);
    const bool transient = r.status == 0 || r.status == 408 || r.status == 429 || r.status >= 500;
    if (!transient) throw BackendError("HTTP " + std::to_string(r.status) + ": " + r.body.substr(0, 200), r.status);

    last_failure = r.status == 0 ? r.transport_error : "HTTP " + std::to_string(r.status);
    last_status = r.status == 0 ? std::nullopt : std::optional<int>(r.status);
    if (attempt == attempts) break;

    std::chrono::milliseconds wait;
    {
      std::lock_guard lock(mutex_);
      ++retries_;
      const auto d = config_.retry.delay(attempt).count();
      const auto half = d / 2;
      const auto spread = d - half;
      wait = std::chrono::milliseconds(half + (spread > 0 ? static_cast<long long>(jitter_() % (spread + 1)) : 0));
    }
    clock_->sleep_for(wait);
  }
  throw BackendError("request failed after " + std::to_string(attempts) + " attempts: " + last_failure, last_status);
}

std::size_t HttpTransport::retries() const {
  std::lock_guard lock(mutex_);
  return retries_;
}

std::size_t HttpTransport::dispatched() const {
  std::lock_guard lock(mutex_);
  return dispatched_;
}

std::string resolve_api_key(const std::string& env_var, const std::string& configured) {
  if (!env_var.empty()) {
    if (const char* v = std::getenv(env_var.c_str()); v && *v) return v;
  }
  return configured;
}

}  // namespace autointent::llm
