#pragma once

#include <deque>
#include <filesystem>
#include <functional>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tabrecon/checker.hpp"
#include "tabrecon/llm.hpp"
#include "tabrecon/table.hpp"

namespace tabrecon::testing {

std::filesystem::path fixture_path(std::string_view relative);
std::string read_file(const std::filesystem::path& path);
std::string read_fixture(std::string_view relative);
void write_file(const std::filesystem::path& path, std::string_view text);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Returns queued responses in order and remembers every prompt.
class ScriptedBackend final : public ChatBackend {
 public:
  explicit ScriptedBackend(std::vector<std::string> responses);

  std::string complete(std::string_view prompt, std::size_t attempt = 0) override;
  std::string id() const override { return "scripted"; }

  std::vector<std::string> prompts() const;
  std::size_t remaining() const;

 private:
  mutable std::mutex mutex_;
  std::deque<std::string> responses_;
  std::vector<std::string> prompts_;
};

class FunctionBackend final : public ChatBackend {
 public:
  using Fn = std::function<std::string(std::string_view prompt, std::size_t attempt)>;
  explicit FunctionBackend(Fn fn) : fn_(std::move(fn)) {}

  std::string complete(std::string_view prompt, std::size_t attempt = 0) override { return fn_(prompt, attempt); }
  std::string id() const override { return "function"; }

 private:
  Fn fn_;
};

/// JSON response body in the shape the extraction prompts ask for.
struct ResponsePart {
  std::string starting_token;  // empty: null
  Table table;
};
std::string extraction_response(const std::vector<ResponsePart>& parts);
std::string extraction_response(const Table& t);

struct CorpusFixture {
  std::string name;
  Table table;
  SourceText source;
  std::set<std::string> expected_rules;
};

/// tests/fixtures/checker_corpus.json
std::vector<CorpusFixture> load_checker_corpus();

std::set<std::string> reported_rules(const ValidationReport& report);

Table load_html_fixture(std::string_view relative);

// Replay scenarios. Each builds a transcript store by recording scripted
// responses through RecordingBackend, exactly as a live recording would.

/// The balance sheet answer split at its two section markers.
std::string balance_sheet_response();

/// Generation answers for both tasks of the paired dataset.
void record_paired_store(const std::filesystem::path& store_dir, const BackendConfig& cfg = {});

/// Two-step repair: merged "102, 205" cells, a critique, then the fixed table.
struct TwoStepScenario {
  SourceText source;
  Table merged;
  Table fixed;
  std::string critique;
};
TwoStepScenario two_step_scenario();

}  // namespace tabrecon::testing
