#include "tabrecon/error.hpp"

namespace tabrecon {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::malformed_json: return "MalformedJson";
    case Errc::missing_tables_key: return "MissingTablesKey";
    case Errc::html_parse_failure: return "HtmlParseFailure";
    case Errc::csv_parse_failure: return "CsvParseFailure";
    case Errc::empty_extraction: return "EmptyExtraction";
    case Errc::missing_slot: return "MissingSlot";
    case Errc::transport: return "Transport";
    case Errc::replay_miss: return "ReplayMiss";
    case Errc::auth_missing: return "AuthMissing";
    case Errc::store_write_failure: return "StoreWriteFailure";
    case Errc::no_candidate_produced: return "NoCandidateProduced";
    case Errc::task_timeout: return "TaskTimeout";
    case Errc::unreadable_file: return "UnreadableFile";
    case Errc::no_tasks_found: return "NoTasksFound";
    case Errc::invalid_config: return "InvalidConfig";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message, std::optional<std::size_t> index)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code), index_(index) {}

}  // namespace tabrecon
