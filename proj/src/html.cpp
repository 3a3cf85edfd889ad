#include <charconv>
#include <optional>
#include <string>

#include "layout.hpp"
#include "tabrecon/error.hpp"
#include "tabrecon/table.hpp"
#include "text_util.hpp"

namespace tabrecon {
namespace {

void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::optional<unsigned long> named_entity(std::string_view name) {
  struct Entry {
    std::string_view name;
    unsigned long cp;
  };
  static constexpr Entry kEntities[] = {
      {"amp", '&'},      {"lt", '<'},        {"gt", '>'},       {"quot", '"'},
      {"apos", '\''},    {"nbsp", 0xA0},     {"plusmn", 0xB1},  {"ndash", 0x2013},
      {"mdash", 0x2014}, {"minus", 0x2212},  {"times", 0xD7},   {"le", 0x2264},
      {"ge", 0x2265},    {"deg", 0xB0},      {"micro", 0xB5},   {"middot", 0xB7},
  };
  for (const auto& e : kEntities) {
    if (e.name == name) return e.cp;
  }
  return std::nullopt;
}

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out.push_back(s[i]);
      continue;
    }
    const auto semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 10) {
      out.push_back('&');
      continue;
    }
    const std::string_view body = s.substr(i + 1, semi - i - 1);
    std::optional<unsigned long> cp;
    if (body.size() > 1 && body[0] == '#') {
      unsigned long value = 0;
      const bool hex = body[1] == 'x' || body[1] == 'X';
      const std::string_view digits = body.substr(hex ? 2 : 1);
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value, hex ? 16 : 10);
      if (ec == std::errc{} && ptr == digits.data() + digits.size() && !digits.empty() && value <= 0x10FFFF) {
        cp = value;
      }
    } else {
      cp = named_entity(body);
    }
    if (!cp) {
      out.push_back('&');
      continue;
    }
    append_utf8(out, *cp);
    i = semi;
  }
  return out;
}

std::string escape_html(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

struct Tag {
  std::string name;  // lower-case
  bool closing = false;
  std::size_t rowspan = 1;
  std::size_t colspan = 1;
};

std::size_t parse_span(std::string_view value) {
  value = detail::trim(value);
  std::size_t n = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
  if (ec != std::errc{} || n == 0) return 1;
  return n;
}

/// Parses the tag starting at html[pos] == '<'. Returns nullopt when the
/// '<' does not start markup, in which case it is literal text.
std::optional<Tag> read_tag(std::string_view html, std::size_t& pos) {
  std::size_t i = pos + 1;
  Tag tag;
  if (i < html.size() && html[i] == '/') {
    tag.closing = true;
    ++i;
  }
  const std::size_t name_start = i;
  while (i < html.size() && detail::is_alnum(html[i])) ++i;
  if (i == name_start || !detail::is_alpha(html[name_start])) return std::nullopt;
  tag.name = detail::to_lower(html.substr(name_start, i - name_start));

  // Attributes up to the closing '>', honouring quotes.
  while (i < html.size() && html[i] != '>') {
    if (detail::is_space(html[i]) || html[i] == '/') {
      ++i;
      continue;
    }
    const std::size_t key_start = i;
    while (i < html.size() && !detail::is_space(html[i]) && html[i] != '=' && html[i] != '>') ++i;
    const std::string key = detail::to_lower(html.substr(key_start, i - key_start));
    std::string_view value;
    while (i < html.size() && detail::is_space(html[i])) ++i;
    if (i < html.size() && html[i] == '=') {
      ++i;
      while (i < html.size() && detail::is_space(html[i])) ++i;
      if (i < html.size() && (html[i] == '"' || html[i] == '\'')) {
        const char quote = html[i++];
        const std::size_t v_start = i;
        while (i < html.size() && html[i] != quote) ++i;
        value = html.substr(v_start, i - v_start);
        if (i < html.size()) ++i;
      } else {
        const std::size_t v_start = i;
        while (i < html.size() && !detail::is_space(html[i]) && html[i] != '>') ++i;
        value = html.substr(v_start, i - v_start);
      }
    }
    if (key == "rowspan") tag.rowspan = parse_span(value);
    if (key == "colspan") tag.colspan = parse_span(value);
  }
  if (i >= html.size()) return std::nullopt;
  pos = i + 1;
  return tag;
}

enum class Section { none, head, body };

class TableBuilder {
 public:
  void open_section(Section s) {
    close_row();
    section_ = s;
    if (s == Section::head) saw_thead_ = true;
  }
  void close_section() {
    close_row();
    section_ = Section::none;
  }
  void open_row() {
    close_row();
    row_open_ = true;
    row_ = Row{};
    row_all_th_ = true;
  }
  void close_row() {
    close_cell();
    if (!row_open_) return;
    row_open_ = false;
    bool header = section_ == Section::head;
    // Leading all-<th> rows outside any section act as the header.
    if (section_ == Section::none && !saw_thead_ && table_.body_rows.empty() && !row_.empty() &&
        row_all_th_) {
      header = true;
    }
    (header ? table_.header_rows : table_.body_rows).push_back(std::move(row_));
  }
  void open_cell(const Tag& tag) {
    close_cell();
    if (!row_open_) open_row();
    cell_open_ = true;
    cell_text_.clear();
    cell_span_ = Span{tag.rowspan, tag.colspan};
    if (tag.name != "th") row_all_th_ = false;
  }
  void close_cell() {
    if (!cell_open_) return;
    cell_open_ = false;
    row_.push_back(Cell{decode_entities(cell_text_), 0, 0, cell_span_});
  }
  void text(std::string_view s) {
    if (cell_open_) cell_text_.append(s);
  }
  bool in_cell() const { return cell_open_; }

  Table finish() {
    close_section();
    detail::layout_table(table_);
    return std::move(table_);
  }

 private:
  Table table_;
  Section section_ = Section::none;
  bool saw_thead_ = false;
  bool row_open_ = false;
  bool row_all_th_ = true;
  Row row_;
  bool cell_open_ = false;
  std::string cell_text_;
  Span cell_span_;
};

}  // namespace

Table parse_html_table(std::string_view html) {
  std::size_t pos = 0;
  TableBuilder builder;
  bool in_table = false;
  while (pos < html.size()) {
    if (html.compare(pos, 4, "<!--") == 0) {
      const auto end = html.find("-->", pos + 4);
      pos = end == std::string_view::npos ? html.size() : end + 3;
      continue;
    }
    if (html[pos] != '<') {
      const auto next = html.find('<', pos + 1);
      const std::size_t end = next == std::string_view::npos ? html.size() : next;
      if (in_table) builder.text(html.substr(pos, end - pos));
      pos = end;
      continue;
    }
    const std::size_t tag_start = pos;
    auto tag = read_tag(html, pos);
    if (!tag) {
      if (in_table) builder.text(html.substr(tag_start, 1));
      pos = tag_start + 1;
      continue;
    }
    if (!in_table) {
      if (tag->name == "table" && !tag->closing) in_table = true;
      continue;
    }
    const std::string& name = tag->name;
    if (name == "table") {
      if (!tag->closing) {
        throw Error(Errc::html_parse_failure, "nested <table> elements are not supported");
      }
      return builder.finish();
    }
    if (name == "thead") {
      tag->closing ? builder.close_section() : builder.open_section(Section::head);
    } else if (name == "tbody" || name == "tfoot") {
      tag->closing ? builder.close_section() : builder.open_section(Section::body);
    } else if (name == "tr") {
      tag->closing ? builder.close_row() : builder.open_row();
    } else if (name == "td" || name == "th") {
      if (tag->closing) {
        builder.close_cell();
      } else {
        builder.open_cell(*tag);
      }
    } else if (name == "br" && builder.in_cell()) {
      builder.text("\n");
    }
    // Other inline markup inside cells is dropped; its text is kept.
  }
  if (!in_table) throw Error(Errc::html_parse_failure, "no <table> element found");
  throw Error(Errc::html_parse_failure, "unclosed <table> element");
}

std::string serialize_html(const Table& t) {
  std::string out = "<table>";
  auto emit_rows = [&out](const std::vector<Row>& rows, std::string_view cell_tag) {
    for (const Row& row : rows) {
      out += "<tr>";
      for (const Cell& cell : row) {
        out.push_back('<');
        out += cell_tag;
        if (cell.span.rows != 1) out += " rowspan=\"" + std::to_string(cell.span.rows) + "\"";
        if (cell.span.cols != 1) out += " colspan=\"" + std::to_string(cell.span.cols) + "\"";
        out.push_back('>');
        out += escape_html(cell.text);
        out += "</";
        out += cell_tag;
        out.push_back('>');
      }
      out += "</tr>";
    }
  };
  if (!t.header_rows.empty()) {
    out += "<thead>";
    emit_rows(t.header_rows, "th");
    out += "</thead>";
  }
  out += "<tbody>";
  emit_rows(t.body_rows, "td");
  out += "</tbody></table>";
  return out;
}

}  // namespace tabrecon
