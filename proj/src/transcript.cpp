#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include "tabrecon/error.hpp"
#include "tabrecon/llm.hpp"

namespace tabrecon {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ChatExchange make_exchange(std::string fingerprint, std::string_view prompt, std::string response,
                           std::string backend_id, const BackendConfig& cfg, std::size_t attempt) {
  ChatExchange e;
  e.fingerprint = std::move(fingerprint);
  e.prompt = std::string(prompt);
  e.response = std::move(response);
  e.backend_id = std::move(backend_id);
  e.model_id = cfg.model_id;
  e.temperature = cfg.temperature;
  e.max_output_tokens = cfg.max_output_tokens;
  e.attempt = attempt;
  e.timestamp = utc_timestamp();
  return e;
}

}  // namespace

void validate(const BackendConfig& cfg) {
  if (cfg.temperature < 0.0) throw Error(Errc::invalid_config, "temperature must be >= 0");
  if (cfg.timeout.count() <= 0) throw Error(Errc::invalid_config, "timeout must be positive");
  if (cfg.max_output_tokens == 0) throw Error(Errc::invalid_config, "max_output_tokens must be positive");
  if (cfg.max_in_flight == 0) throw Error(Errc::invalid_config, "max_in_flight must be positive");
  if (cfg.model_id.empty()) throw Error(Errc::invalid_config, "model_id is empty");
}

std::string request_fingerprint(std::string_view prompt, const BackendConfig& cfg, std::size_t attempt) {
  json key{{"prompt", prompt},
           {"model_id", cfg.model_id},
           {"temperature", cfg.temperature},
           {"max_output_tokens", cfg.max_output_tokens}};
  if (attempt > 0) key["attempt"] = attempt;
  return sha256_hex(key.dump());
}

json to_json(const ChatExchange& e) {
  json params{{"temperature", e.temperature}, {"max_output_tokens", e.max_output_tokens}};
  if (e.attempt > 0) params["attempt"] = e.attempt;
  return json{{"fingerprint", e.fingerprint}, {"prompt", e.prompt},     {"response", e.response},
              {"backend_id", e.backend_id},   {"model_id", e.model_id}, {"params", std::move(params)},
              {"timestamp", e.timestamp}};
}

ChatExchange exchange_from_json(const json& j) {
  ChatExchange e;
  e.fingerprint = j.at("fingerprint").get<std::string>();
  e.prompt = j.at("prompt").get<std::string>();
  e.response = j.at("response").get<std::string>();
  e.backend_id = j.value("backend_id", "");
  e.model_id = j.at("model_id").get<std::string>();
  const json& params = j.at("params");
  e.temperature = params.value("temperature", 0.0);
  e.max_output_tokens = params.value("max_output_tokens", std::size_t{0});
  e.attempt = params.value("attempt", std::size_t{0});
  e.timestamp = j.value("timestamp", "");
  return e;
}

// ---------------------------------------------------------------------------
// TranscriptStore

TranscriptStore::TranscriptStore(fs::path dir) : dir_(std::move(dir)) {}

fs::path TranscriptStore::path_for(std::string_view fingerprint) const {
  return dir_ / (std::string(fingerprint) + ".json");
}

std::optional<ChatExchange> TranscriptStore::load(std::string_view fingerprint) const {
  std::ifstream in(path_for(fingerprint), std::ios::binary);
  if (!in) return std::nullopt;
  const json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  try {
    return exchange_from_json(j);
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

void TranscriptStore::record(const ChatExchange& exchange) {
  const std::lock_guard lock(write_mutex_);
  const fs::path target = path_for(exchange.fingerprint);
  std::error_code ec;
  if (fs::exists(target, ec)) return;
  fs::create_directories(dir_, ec);
  if (ec) throw Error(Errc::store_write_failure, "cannot create " + dir_.string() + ": " + ec.message());

  std::ostringstream tid;
  tid << std::this_thread::get_id();
  const fs::path tmp = target.string() + ".tmp." + tid.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << to_json(exchange).dump(2) << '\n';
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw Error(Errc::store_write_failure, "cannot write " + tmp.string());
    }
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(Errc::store_write_failure, "cannot rename into " + target.string());
  }
}

std::size_t TranscriptStore::size() const {
  std::error_code ec;
  std::size_t n = 0;
  for (const auto& entry : fs::directory_iterator(dir_, ec)) {
    if (entry.path().extension() == ".json") ++n;
  }
  return n;
}

// ---------------------------------------------------------------------------
// Replay / record

ReplayBackend::ReplayBackend(std::shared_ptr<const TranscriptStore> store, BackendConfig cfg)
    : store_(std::move(store)), cfg_(std::move(cfg)) {}

std::string ReplayBackend::complete(std::string_view prompt, std::size_t attempt) {
  const std::string fp = request_fingerprint(prompt, cfg_, attempt);
  auto hit = store_->load(fp);
  if (!hit) throw Error(Errc::replay_miss, "no recorded response for fingerprint " + fp);
  return std::move(hit->response);
}

RecordingBackend::RecordingBackend(std::shared_ptr<ChatBackend> inner, std::shared_ptr<TranscriptStore> store,
                                   BackendConfig cfg)
    : inner_(std::move(inner)), store_(std::move(store)), cfg_(std::move(cfg)) {}

std::string RecordingBackend::complete(std::string_view prompt, std::size_t attempt) {
  std::string fp = request_fingerprint(prompt, cfg_, attempt);
  if (auto hit = store_->load(fp)) return std::move(hit->response);
  std::string response = inner_->complete(prompt, attempt);
  store_->record(make_exchange(std::move(fp), prompt, response, inner_->id(), cfg_, attempt));
  return response;
}

}  // namespace tabrecon
