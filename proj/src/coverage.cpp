#include <algorithm>
#include <iterator>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tabrecon/checker.hpp"
#include "text_util.hpp"

namespace tabrecon {
namespace {

using TokenCounts = std::unordered_map<std::string, std::size_t>;

TokenCounts count_tokens(const std::vector<std::string>& tokens) {
  TokenCounts counts;
  for (const std::string& tok : tokens) ++counts[tok];
  return counts;
}

template <typename F>
void for_each_cell(const Table& t, F&& f) {
  for (const Row& row : t.header_rows) {
    for (const Cell& cell : row) f(cell);
  }
  for (const Row& row : t.body_rows) {
    for (const Cell& cell : row) f(cell);
  }
}

double cell_coverage(const Cell& cell, const SourceText& source, const TokenCounts& source_counts) {
  const std::string_view text = detail::trim(cell.text);
  if (text.empty()) return 1.0;
  const auto tokens = detail::split_tokens(text);
  std::size_t total = 0;
  std::size_t found = 0;
  std::vector<std::pair<std::string_view, std::size_t>> used;
  for (const std::string& tok : tokens) {
    const std::size_t weight = detail::alnum_count(tok);
    total += weight;
    const auto it = source_counts.find(tok);
    if (it == source_counts.end()) continue;
    auto u = std::find_if(used.begin(), used.end(), [&tok](const auto& p) { return p.first == tok; });
    if (u == used.end()) {
      used.emplace_back(tok, 0);
      u = std::prev(used.end());
    }
    if (u->second < it->second) {
      ++u->second;
      found += weight;
    }
  }
  if (total == 0 || found == total) return 1.0;
  if (source.raw().find(text) != std::string::npos) return 1.0;
  return static_cast<double>(found) / static_cast<double>(total);
}

}  // namespace

double compute_coverage(const SourceText& source, const Table& t) {
  const std::size_t source_alnum = source.alnum().size();
  if (source_alnum == 0) return 1.0;
  TokenCounts available;
  for_each_cell(t, [&available](const Cell& cell) {
    for (std::string& tok : detail::split_tokens(cell.text)) ++available[std::move(tok)];
  });
  std::size_t uncovered = 0;
  for (const std::string& tok : source.tokens()) {
    auto it = available.find(tok);
    if (it != available.end() && it->second > 0) {
      --it->second;
    } else {
      uncovered += detail::alnum_count(tok);
    }
  }
  return 1.0 - static_cast<double>(uncovered) / static_cast<double>(source_alnum);
}

double compute_hallucination(const SourceText& source, const Table& t) {
  const TokenCounts source_counts = count_tokens(source.tokens());
  double sum = 0.0;
  std::size_t rows = 0;
  auto add_row = [&](const Row& row) {
    if (row.empty()) return;
    double missing = 0.0;
    for (const Cell& cell : row) missing += 1.0 - cell_coverage(cell, source, source_counts);
    sum += missing / static_cast<double>(row.size());
    ++rows;
  };
  for (const Row& row : t.header_rows) add_row(row);
  for (const Row& row : t.body_rows) add_row(row);
  return rows == 0 ? 0.0 : sum / static_cast<double>(rows);
}

}  // namespace tabrecon
