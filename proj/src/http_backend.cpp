#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cstdlib>
#include <semaphore>
#include <thread>

#include "tabrecon/error.hpp"
#include "tabrecon/llm.hpp"

namespace tabrecon {

using nlohmann::json;

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(Errc::invalid_config, "endpoint needs a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return Endpoint{url, "/"};
  return Endpoint{url.substr(0, path_start), url.substr(path_start)};
}

bool retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

struct HttpBackend::Impl {
  explicit Impl(BackendConfig c)
      : cfg(std::move(c)), endpoint(split_endpoint(cfg.endpoint)),
        in_flight(static_cast<std::ptrdiff_t>(cfg.max_in_flight)) {}

  BackendConfig cfg;
  Endpoint endpoint;
  std::counting_semaphore<1024> in_flight;
};

HttpBackend::HttpBackend(BackendConfig cfg) {
  validate(cfg);
  if (cfg.max_in_flight > 1024) cfg.max_in_flight = 1024;
  impl_ = std::make_unique<Impl>(std::move(cfg));
}

HttpBackend::~HttpBackend() = default;

std::string HttpBackend::id() const { return "http:" + impl_->cfg.model_id; }

std::string HttpBackend::complete(std::string_view prompt, std::size_t /*attempt*/) {
  const BackendConfig& cfg = impl_->cfg;
  const char* key = std::getenv(cfg.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw Error(Errc::auth_missing, "environment variable " + cfg.api_key_env + " is not set");
  }

  const json body{{"model", cfg.model_id},
                  {"temperature", cfg.temperature},
                  {"max_tokens", cfg.max_output_tokens},
                  {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})}};
  const std::string payload = body.dump();

  impl_->in_flight.acquire();
  struct Release {
    std::counting_semaphore<1024>& sem;
    ~Release() { sem.release(); }
  } release{impl_->in_flight};

  std::string last_error;
  for (std::size_t attempt = 0;; ++attempt) {
    httplib::Client client(impl_->endpoint.origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(cfg.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    client.set_bearer_token_auth(key);

    auto res = client.Post(impl_->endpoint.path, payload, "application/json");
    bool retry = false;
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      retry = true;
    } else if (res->status >= 200 && res->status < 300) {
      const json parsed = json::parse(res->body, nullptr, false);
      try {
        return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
      } catch (const json::exception&) {
        throw Error(Errc::transport, "response has no choices[0].message.content");
      }
    } else {
      last_error = "HTTP " + std::to_string(res->status);
      retry = retryable(res->status);
    }
    if (!retry || attempt >= cfg.retries) break;
    std::this_thread::sleep_for(cfg.backoff * (1LL << std::min<std::size_t>(attempt, 16)));
  }
  throw Error(Errc::transport, last_error);
}

}  // namespace tabrecon
