#include <json.hpp>
#include <string>

#include "tabrecon/error.hpp"
#include "tabrecon/table.hpp"

namespace tabrecon {
namespace {

using nlohmann::json;

/// Contents of the outermost ``` fence, or the whole text if there is none.
std::string_view strip_code_fence(std::string_view text) {
  const auto open = text.find("```");
  if (open == std::string_view::npos) return text;
  auto body_start = text.find('\n', open + 3);
  if (body_start == std::string_view::npos) return text;
  ++body_start;
  const auto close = text.rfind("```");
  if (close == open || close < body_start) return text.substr(body_start);
  return text.substr(body_start, close - body_start);
}

/// End (exclusive) of the balanced object starting at text[start] == '{'.
std::optional<std::size_t> balanced_object_end(std::string_view text, std::size_t start) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::nullopt;
}

std::optional<json> first_json_object(std::string_view text) {
  // Only top-level candidates: an unbalanced '{' swallows the rest of the text.
  for (auto start = text.find('{'); start != std::string_view::npos;) {
    const auto end = balanced_object_end(text, start);
    if (!end) return std::nullopt;
    json parsed = json::parse(text.substr(start, *end - start), nullptr, false);
    if (!parsed.is_discarded() && parsed.is_object()) return parsed;
    start = text.find('{', *end);
  }
  return std::nullopt;
}

const json* find_key(const json& obj, std::string_view bare) {
  const std::string dollar = "$" + std::string(bare) + "$";
  if (auto it = obj.find(dollar); it != obj.end()) return &*it;
  if (auto it = obj.find(std::string(bare)); it != obj.end()) return &*it;
  return nullptr;
}

}  // namespace

ExtractionResult parse_extraction_json(std::string_view text) {
  auto parsed = first_json_object(strip_code_fence(text));
  if (!parsed) parsed = first_json_object(text);
  if (!parsed) throw Error(Errc::malformed_json, "no parseable JSON object in response");

  const json* tables = find_key(*parsed, "tables");
  if (tables == nullptr || !tables->is_array()) {
    throw Error(Errc::missing_tables_key, "response object has no \"tables\" array");
  }

  ExtractionResult result;
  for (std::size_t i = 0; i < tables->size(); ++i) {
    const json& entry = (*tables)[i];
    const json* html = entry.is_object() ? find_key(entry, "html_output") : nullptr;
    if (html == nullptr || !html->is_string()) {
      throw Error(Errc::html_parse_failure, "entry " + std::to_string(i) + " has no html_output string", i);
    }
    PartialTable part;
    try {
      part.table = parse_html_table(html->get_ref<const std::string&>());
    } catch (const Error& e) {
      throw Error(Errc::html_parse_failure, "entry " + std::to_string(i) + ": " + e.what(), i);
    }
    if (const json* token = find_key(entry, "starting_token"); token && token->is_string()) {
      if (!token->get_ref<const std::string&>().empty()) part.starting_token = token->get<std::string>();
    }
    result.tables.push_back(std::move(part));
  }
  if (const json* delim = find_key(*parsed, "row_delimiter"); delim && delim->is_string()) {
    result.row_delimiter = delim->get<std::string>();
  }
  return result;
}

}  // namespace tabrecon
