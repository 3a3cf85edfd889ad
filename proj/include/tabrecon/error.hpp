#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tabrecon {

enum class Errc {
  // table model
  malformed_json,
  missing_tables_key,
  html_parse_failure,
  csv_parse_failure,
  empty_extraction,
  // llm gateway
  missing_slot,
  transport,
  replay_miss,
  auth_missing,
  store_write_failure,
  // pipeline
  no_candidate_produced,
  task_timeout,
  // harness
  unreadable_file,
  no_tasks_found,
  invalid_config,
};

std::string_view errc_name(Errc code) noexcept;

/// Every failure surfaced by the library. `index()` carries the offending
/// extraction entry for per-entry HTML failures.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, std::optional<std::size_t> index = std::nullopt);

  Errc code() const noexcept { return code_; }
  const std::optional<std::size_t>& index() const noexcept { return index_; }

 private:
  Errc code_;
  std::optional<std::size_t> index_;
};

}  // namespace tabrecon
