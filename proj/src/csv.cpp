#include <string>

#include "layout.hpp"
#include "tabrecon/error.hpp"
#include "tabrecon/table.hpp"

namespace tabrecon {

Table parse_csv_table(std::string_view csv, std::size_t header_rows) {
  std::vector<Row> records;
  Row record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    record.push_back(Cell{std::move(field), 0, 0, {}});
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < csv.size(); ++i) {
    const char c = csv[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < csv.size() && csv[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field.empty()) {
          in_quotes = true;
          field_started = true;
        } else {
          field.push_back(c);
        }
        break;
      case ',':
        end_field();
        field_started = true;
        break;
      case '\r':
        if (i + 1 < csv.size() && csv[i + 1] == '\n') ++i;
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw Error(Errc::csv_parse_failure, "unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();

  Table t;
  for (std::size_t r = 0; r < records.size(); ++r) {
    (r < header_rows ? t.header_rows : t.body_rows).push_back(std::move(records[r]));
  }
  detail::layout_table(t);
  return t;
}

std::string serialize_csv(const Table& t) {
  std::string out;
  bool first = true;
  auto emit = [&](const Row& row) {
    if (!first) out += "\r\n";
    first = false;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out.push_back(',');
      const std::string& text = row[c].text;
      // a lone empty field would otherwise read back as no record at all
      const bool lone_empty = text.empty() && row.size() == 1;
      if (!lone_empty && text.find_first_of(",\"\r\n") == std::string::npos) {
        out += text;
        continue;
      }
      out.push_back('"');
      for (char ch : text) {
        if (ch == '"') out.push_back('"');
        out.push_back(ch);
      }
      out.push_back('"');
    }
  };
  for (const Row& row : t.header_rows) emit(row);
  for (const Row& row : t.body_rows) emit(row);
  return out;
}

}  // namespace tabrecon
