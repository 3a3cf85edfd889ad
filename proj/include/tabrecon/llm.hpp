#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace tabrecon {

enum class PromptKind { structural_decomposition, critique, regeneration, baseline, chain_of_thought };

/// "StructuralDecomposition", "Critique", ...
std::string_view prompt_kind_name(PromptKind kind) noexcept;
/// Accepts the names above and the CLI short forms sd, base, cot.
std::optional<PromptKind> parse_prompt_kind(std::string_view text);

/// Embedded template text with its {{slot}} placeholders.
std::string_view prompt_template(PromptKind kind);
/// Placeholders the caller must supply, in order of first appearance.
std::vector<std::string> prompt_slots(PromptKind kind);

/// Rendered in place of an empty critique findings list.
inline constexpr std::string_view kNoFindings = "(none: the rule-based checks found no issues)";

using Slots = std::map<std::string, std::string, std::less<>>;

/// Single-pass substitution: slot values are never rescanned for
/// placeholders. Throws MissingSlot naming the first absent placeholder.
std::string render_prompt(PromptKind kind, const Slots& slots);

struct BackendConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model_id = "gpt-4o";
  double temperature = 0.0;
  std::size_t max_output_tokens = 4096;
  std::chrono::milliseconds timeout{120'000};
  std::size_t retries = 3;
  std::chrono::milliseconds backoff{500};
  std::string api_key_env = "TEN_API_KEY";
  std::size_t max_in_flight = 4;
};

/// Throws InvalidConfig on out-of-range values.
void validate(const BackendConfig& cfg);

/// Hex SHA-256 of the canonical JSON of prompt, model id and decoding
/// params. A nonzero `attempt` (parse re-asks) is part of the key.
std::string request_fingerprint(std::string_view prompt, const BackendConfig& cfg, std::size_t attempt = 0);

struct ChatExchange {
  std::string fingerprint;
  std::string prompt;
  std::string response;
  std::string backend_id;
  std::string model_id;
  double temperature = 0.0;
  std::size_t max_output_tokens = 0;
  std::size_t attempt = 0;
  std::string timestamp;
};

nlohmann::json to_json(const ChatExchange& e);
ChatExchange exchange_from_json(const nlohmann::json& j);

/// One JSON file per fingerprint. Writes go through a temp file and a
/// rename, so readers never observe partial files.
class TranscriptStore {
 public:
  explicit TranscriptStore(std::filesystem::path dir);

  const std::filesystem::path& dir() const noexcept { return dir_; }
  std::optional<ChatExchange> load(std::string_view fingerprint) const;
  /// No-op when an entry for the fingerprint already exists.
  void record(const ChatExchange& exchange);
  std::size_t size() const;

 private:
  std::filesystem::path path_for(std::string_view fingerprint) const;

  std::filesystem::path dir_;
  std::mutex write_mutex_;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  /// `attempt` counts re-asks of the same prompt, starting at 0.
  virtual std::string complete(std::string_view prompt, std::size_t attempt = 0) = 0;
  virtual std::string id() const = 0;
};

/// Chat-completions POST with bearer auth. Retries 429, 5xx and transport
/// errors with exponential backoff.
class HttpBackend final : public ChatBackend {
 public:
  explicit HttpBackend(BackendConfig cfg);
  ~HttpBackend() override;

  std::string complete(std::string_view prompt, std::size_t attempt = 0) override;
  std::string id() const override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

class ReplayBackend final : public ChatBackend {
 public:
  ReplayBackend(std::shared_ptr<const TranscriptStore> store, BackendConfig cfg);

  /// Throws ReplayMiss naming the fingerprint when nothing was recorded.
  std::string complete(std::string_view prompt, std::size_t attempt = 0) override;
  std::string id() const override { return "replay"; }

 private:
  std::shared_ptr<const TranscriptStore> store_;
  BackendConfig cfg_;
};

/// Serves from the store when possible, otherwise asks `inner` and records.
class RecordingBackend final : public ChatBackend {
 public:
  RecordingBackend(std::shared_ptr<ChatBackend> inner, std::shared_ptr<TranscriptStore> store, BackendConfig cfg);

  std::string complete(std::string_view prompt, std::size_t attempt = 0) override;
  std::string id() const override { return "record:" + inner_->id(); }

 private:
  std::shared_ptr<ChatBackend> inner_;
  std::shared_ptr<TranscriptStore> store_;
  BackendConfig cfg_;
};

class CountingBackend final : public ChatBackend {
 public:
  explicit CountingBackend(std::shared_ptr<ChatBackend> inner) : inner_(std::move(inner)) {}

  std::string complete(std::string_view prompt, std::size_t attempt = 0) override {
    calls_.fetch_add(1, std::memory_order_relaxed);
    return inner_->complete(prompt, attempt);
  }
  std::string id() const override { return inner_->id(); }
  std::size_t calls() const noexcept { return calls_.load(std::memory_order_relaxed); }

 private:
  std::shared_ptr<ChatBackend> inner_;
  std::atomic<std::size_t> calls_{0};
};

}  // namespace tabrecon
