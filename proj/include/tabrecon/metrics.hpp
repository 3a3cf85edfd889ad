#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tabrecon/table.hpp"

namespace tabrecon {

struct MetricReport {
  int em = 0;
  double ted = 0.0;
  double cvm = 0.0;
  double colvm = 0.0;
  double coverage = 0.0;
  double hallucination = 0.0;

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

nlohmann::json to_json(const MetricReport& m);
/// task id followed by em, ted, cvm, colvm, coverage, hallucination.
std::string to_tsv_row(std::string_view task_id, const MetricReport& m);

/// Labelled ordered tree: root "table", one child per row (header rows
/// first), one leaf per cell labelled by its normalized text and span.
struct TableTree {
  struct Node {
    std::string label;
    std::vector<std::size_t> children;
  };
  std::vector<Node> nodes;  // nodes[0] is the root; preorder

  static TableTree from_table(const Table& t);
  std::size_t size() const noexcept { return nodes.size(); }
};

int exact_match(const Table& pred, const Table& gold);

/// Unit-cost ordered tree edit distance between the two table trees,
/// divided by the larger node count.
double tree_edit_distance(const Table& pred, const Table& gold);
/// Unnormalized distance.
std::size_t tree_edit_cost(const Table& pred, const Table& gold);

/// Exhaustive search over all valid ordered mappings. Exponential; meant
/// for trees of a dozen nodes or so.
std::size_t tree_edit_cost_bruteforce(const TableTree& a, const TableTree& b);

double cell_value_match(const Table& pred, const Table& gold);

/// Body columns only. Each pred column can satisfy one gold column; gold
/// columns are assigned left to right to the first unused identical pred
/// column.
double column_value_match(const Table& pred, const Table& gold);

/// Normalizes both tables, then fills every field. Coverage and
/// hallucination are those of `pred` against `source`.
MetricReport evaluate(const Table& pred, const Table& gold, const SourceText& source);

}  // namespace tabrecon
