#include "tabrecon/table.hpp"

#include <algorithm>

#include "layout.hpp"
#include "tabrecon/error.hpp"
#include "text_util.hpp"

namespace tabrecon {

SourceText::SourceText(std::string raw) : raw_(std::move(raw)) {
  alnum_.reserve(raw_.size());
  for (char c : raw_) {
    if (detail::is_alnum(c)) alnum_.push_back(c);
  }
  tokens_ = detail::split_tokens(raw_);
}

std::size_t Table::cell_count() const noexcept {
  std::size_t n = body_cell_count();
  for (const auto& row : header_rows) n += row.size();
  return n;
}

std::size_t Table::body_cell_count() const noexcept {
  std::size_t n = 0;
  for (const auto& row : body_rows) n += row.size();
  return n;
}

namespace detail {

SectionLayout layout_section(std::vector<Row>& rows) {
  SectionLayout out;
  std::vector<std::size_t> covered;  // rows still covered from above, per grid column
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::vector<std::size_t> next(covered.size(), 0);
    std::size_t occupied = 0;
    for (std::size_t c = 0; c < covered.size(); ++c) {
      if (covered[c] > 0) {
        next[c] = covered[c] - 1;
        ++occupied;
        out.extent = std::max(out.extent, c + 1);
      }
    }
    std::size_t col = 0;
    for (Cell& cell : rows[r]) {
      while (col < covered.size() && covered[col] > 0) ++col;
      cell.row = r;
      cell.col = col;
      const std::size_t cols = std::max<std::size_t>(cell.span.cols, 1);
      const std::size_t rows_below = std::max<std::size_t>(cell.span.rows, 1) - 1;
      if (next.size() < col + cols) {
        next.resize(col + cols, 0);
        covered.resize(col + cols, 0);
      }
      for (std::size_t k = col; k < col + cols; ++k) next[k] = std::max(next[k], rows_below);
      occupied += cols;
      col += cols;
      out.extent = std::max(out.extent, col);
    }
    out.occupied.push_back(occupied);
    covered = std::move(next);
  }
  return out;
}

std::size_t layout_table(Table& t) {
  const auto head = layout_section(t.header_rows);
  const auto body = layout_section(t.body_rows);
  t.width = std::max(head.extent, body.extent);
  return t.width;
}

}  // namespace detail

Table make_table(const std::vector<std::vector<std::string>>& header,
                 const std::vector<std::vector<std::string>>& body) {
  Table t;
  auto fill = [](const std::vector<std::vector<std::string>>& src, std::vector<Row>& dst) {
    for (const auto& texts : src) {
      Row row;
      for (const auto& text : texts) row.push_back(Cell{text, 0, 0, {}});
      dst.push_back(std::move(row));
    }
  };
  fill(header, t.header_rows);
  fill(body, t.body_rows);
  detail::layout_table(t);
  return t;
}

Table normalize_rectangular(Table t) {
  auto head = detail::layout_section(t.header_rows);
  auto body = detail::layout_section(t.body_rows);
  std::size_t width = std::max(head.extent, body.extent);
  if (width == 0 && !t.empty()) width = 1;

  auto pad = [width](std::vector<Row>& rows, const detail::SectionLayout& layout) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t k = layout.occupied[r]; k < width; ++k) rows[r].push_back(Cell{});
    }
  };
  pad(t.header_rows, head);
  pad(t.body_rows, body);
  detail::layout_table(t);
  t.width = width;
  return t;
}

namespace {

bool opens_with_label(const Table& t, const std::string& label) {
  if (t.body_rows.empty()) return false;
  const Row& first = t.body_rows.front();
  std::size_t non_blank = 0;
  bool match = false;
  for (const Cell& cell : first) {
    if (detail::is_blank(cell.text)) continue;
    ++non_blank;
    match = detail::trim(cell.text) == detail::trim(label);
  }
  return non_blank == 1 && match;
}

std::vector<std::string> row_texts(const Row& row) {
  std::vector<std::string> out;
  for (const Cell& cell : row) {
    if (!detail::is_blank(cell.text)) out.push_back(detail::normalize_ws(cell.text));
  }
  return out;
}

bool same_header(const std::vector<Row>& a, const std::vector<Row>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (row_texts(a[i]) != row_texts(b[i])) return false;
  }
  return true;
}

}  // namespace

Table concat_partial_tables(const ExtractionResult& r) {
  if (r.tables.empty()) {
    throw Error(Errc::empty_extraction, "extraction result contains no tables");
  }
  Table out;
  out.header_rows = r.tables.front().table.header_rows;
  for (std::size_t i = 0; i < r.tables.size(); ++i) {
    const auto& part = r.tables[i];
    // A later header that differs from the first would otherwise be lost.
    if (i > 0 && !same_header(part.table.header_rows, out.header_rows)) {
      for (const Row& row : part.table.header_rows) out.body_rows.push_back(row);
    }
    if (part.starting_token && !opens_with_label(part.table, *part.starting_token)) {
      out.body_rows.push_back(Row{Cell{*part.starting_token, 0, 0, {}}});
    }
    for (const Row& row : part.table.body_rows) out.body_rows.push_back(row);
  }
  return normalize_rectangular(std::move(out));
}

std::vector<std::string> unverified_starting_tokens(const ExtractionResult& r,
                                                    const SourceText& source) {
  std::vector<std::string> out;
  for (const auto& part : r.tables) {
    if (part.starting_token && source.raw().find(*part.starting_token) == std::string::npos) {
      out.push_back(*part.starting_token);
    }
  }
  return out;
}

SourceText flatten_table(const Table& t, FlattenStyle style) {
  if (style == FlattenStyle::csv) return SourceText(serialize_csv(t));

  std::string out;
  bool first_line = true;
  auto emit = [&](const Row& row) {
    std::string line;
    for (const Cell& cell : row) {
      if (detail::is_blank(cell.text)) continue;
      if (!line.empty()) line.push_back(' ');
      line += cell.text;
    }
    if (line.empty()) return;
    if (!first_line) out += "\r\n";
    out += line;
    first_line = false;
  };
  for (const Row& row : t.header_rows) emit(row);
  for (const Row& row : t.body_rows) emit(row);
  return SourceText(std::move(out));
}

namespace {

std::string_view strip_trailing_cr(std::string_view s) {
  while (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

bool rows_equivalent(const std::vector<Row>& a, const std::vector<Row>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t r = 0; r < a.size(); ++r) {
    if (a[r].size() != b[r].size()) return false;
    for (std::size_t c = 0; c < a[r].size(); ++c) {
      if (a[r][c].span != b[r][c].span) return false;
      if (strip_trailing_cr(a[r][c].text) != strip_trailing_cr(b[r][c].text)) return false;
    }
  }
  return true;
}

}  // namespace

bool equivalent(const Table& a, const Table& b) {
  const Table na = normalize_rectangular(a);
  const Table nb = normalize_rectangular(b);
  return na.width == nb.width && rows_equivalent(na.header_rows, nb.header_rows) &&
         rows_equivalent(na.body_rows, nb.body_rows);
}

std::string render_rows(const Table& t) {
  std::string out;
  auto emit = [&out](const Row& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out += " | ";
      out += detail::normalize_ws(row[c].text);
    }
    out.push_back('\n');
  };
  for (const Row& row : t.header_rows) emit(row);
  for (const Row& row : t.body_rows) emit(row);
  if (!out.empty()) out.pop_back();
  return out;
}

}  // namespace tabrecon
