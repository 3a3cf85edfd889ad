#include "tabrecon/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_map>

#include "tabrecon/checker.hpp"
#include "text_util.hpp"

namespace tabrecon {

using nlohmann::json;

namespace {

std::string cell_label(const Cell& cell) {
  std::string label = "cell:" + detail::normalize_ws(cell.text);
  if (!cell.span.is_unit()) {
    label += "\x1f" + std::to_string(cell.span.rows) + "x" + std::to_string(cell.span.cols);
  }
  return label;
}

constexpr std::string_view kHeaderRow = "header-row";
constexpr std::string_view kBodyRow = "body-row";

}  // namespace

TableTree TableTree::from_table(const Table& t) {
  TableTree tree;
  tree.nodes.push_back(Node{"table", {}});
  auto add_row = [&tree](const Row& row, std::string_view label) {
    const std::size_t row_index = tree.nodes.size();
    tree.nodes[0].children.push_back(row_index);
    tree.nodes.push_back(Node{std::string(label), {}});
    for (const Cell& cell : row) {
      tree.nodes[row_index].children.push_back(tree.nodes.size());
      tree.nodes.push_back(Node{cell_label(cell), {}});
    }
  };
  for (const Row& row : t.header_rows) add_row(row, kHeaderRow);
  for (const Row& row : t.body_rows) add_row(row, kBodyRow);
  return tree;
}

int exact_match(const Table& pred, const Table& gold) {
  if (pred.header_rows.size() != gold.header_rows.size() || pred.body_rows.size() != gold.body_rows.size()) {
    return 0;
  }
  auto same_rows = [](const std::vector<Row>& a, const std::vector<Row>& b) {
    for (std::size_t r = 0; r < a.size(); ++r) {
      if (a[r].size() != b[r].size()) return false;
      for (std::size_t c = 0; c < a[r].size(); ++c) {
        if (a[r][c].span != b[r][c].span) return false;
        if (detail::normalize_ws(a[r][c].text) != detail::normalize_ws(b[r][c].text)) return false;
      }
    }
    return true;
  };
  return same_rows(pred.header_rows, gold.header_rows) && same_rows(pred.body_rows, gold.body_rows) ? 1 : 0;
}

// ---------------------------------------------------------------------------
// Tree edit distance
//
// Both roots carry the same label, so some optimal mapping pairs them and
// the distance reduces to the forest distance between the row sequences.
// Deleting a row exposes its cells as roots, so every forest reachable by
// rightmost-root removal is "k complete rows + the first j cells of row k".
// Those states are numbered k-major; state 0 is the empty forest.

namespace {

struct ForestIndex {
  struct State {
    bool leaf = false;          // rightmost root is a cell (else a row)
    std::size_t row = 0;        // row of the rightmost root
    std::size_t label = 0;      // cell label id when leaf
    std::size_t sub = 0;        // state after removing the rightmost subtree
    std::size_t nodes = 0;      // node count of the forest
  };
  std::vector<State> states;
  std::vector<int> row_header;
  std::vector<std::vector<std::size_t>> row_labels;
};

ForestIndex index_forest(const Table& t, std::unordered_map<std::string, std::size_t>& ids) {
  ForestIndex f;
  auto id_of = [&ids](const Cell& c) { return ids.emplace(cell_label(c), ids.size()).first->second; };
  auto add_row = [&](const Row& row, int header) {
    std::vector<std::size_t> labels;
    labels.reserve(row.size());
    for (const Cell& c : row) labels.push_back(id_of(c));
    f.row_header.push_back(header);
    f.row_labels.push_back(std::move(labels));
  };
  for (const Row& row : t.header_rows) add_row(row, 1);
  for (const Row& row : t.body_rows) add_row(row, 0);

  f.states.push_back(ForestIndex::State{});
  std::size_t nodes = 0;
  std::size_t row_start = 0;  // state index of (k, 0)
  for (std::size_t k = 0; k < f.row_labels.size(); ++k) {
    const auto& labels = f.row_labels[k];
    for (std::size_t j = 0; j < labels.size(); ++j) {
      ++nodes;
      f.states.push_back(ForestIndex::State{true, k, labels[j], f.states.size() - 1, nodes});
    }
    ++nodes;
    f.states.push_back(ForestIndex::State{false, k, 0, row_start, nodes});
    row_start = f.states.size() - 1;
  }
  return f;
}

std::size_t levenshtein(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

std::size_t tree_edit_cost(const Table& pred, const Table& gold) {
  std::unordered_map<std::string, std::size_t> ids;
  const ForestIndex a = index_forest(pred, ids);
  const ForestIndex b = index_forest(gold, ids);
  const std::size_t n = b.states.size();

  auto match_cost = [&a, &b](const ForestIndex::State& v, const ForestIndex::State& w) -> std::size_t {
    if (v.leaf && w.leaf) return v.label == w.label ? 0 : 1;
    if (v.leaf) return 1 + b.row_labels[w.row].size();
    if (w.leaf) return 1 + a.row_labels[v.row].size();
    return (a.row_header[v.row] == b.row_header[w.row] ? 0 : 1) +
           levenshtein(a.row_labels[v.row], b.row_labels[w.row]);
  };

  // Rolling storage: the previous state's line plus the line of the most
  // recent complete-rows state, which is what a row's subtree removal needs.
  std::vector<std::size_t> prev(n);
  std::vector<std::size_t> cur(n);
  std::vector<std::size_t> rows_line(n);
  for (std::size_t q = 0; q < n; ++q) prev[q] = b.states[q].nodes;
  rows_line = prev;

  for (std::size_t p = 1; p < a.states.size(); ++p) {
    const auto& v = a.states[p];
    const std::vector<std::size_t>& sub_line = v.leaf ? prev : rows_line;
    cur[0] = v.nodes;
    for (std::size_t q = 1; q < n; ++q) {
      const auto& w = b.states[q];
      cur[q] = std::min({prev[q] + 1, cur[q - 1] + 1, sub_line[w.sub] + match_cost(v, w)});
    }
    std::swap(prev, cur);
    if (!v.leaf) rows_line = prev;
  }
  return prev[n - 1];
}

double tree_edit_distance(const Table& pred, const Table& gold) {
  const std::size_t pred_nodes = 1 + pred.row_count() + pred.cell_count();
  const std::size_t gold_nodes = 1 + gold.row_count() + gold.cell_count();
  return static_cast<double>(tree_edit_cost(pred, gold)) / static_cast<double>(std::max(pred_nodes, gold_nodes));
}

// ---------------------------------------------------------------------------
// Brute-force oracle

namespace {

struct Numbered {
  std::vector<std::size_t> post;  // postorder rank by preorder index
};

Numbered number_tree(const TableTree& t) {
  Numbered out;
  out.post.assign(t.size(), 0);
  std::size_t counter = 0;
  auto visit = [&](auto&& self, std::size_t node) -> void {
    for (std::size_t child : t.nodes[node].children) self(self, child);
    out.post[node] = counter++;
  };
  if (!t.nodes.empty()) visit(visit, 0);
  return out;
}

/// Depth-first over A's nodes in preorder. A mapping is valid iff it keeps
/// both preorder and postorder relations; preorder is kept by construction.
class MappingSearch {
 public:
  MappingSearch(const TableTree& a, const TableTree& b)
      : a_(a), b_(b), pa_(number_tree(a)), pb_(number_tree(b)), best_(a.size() + b.size()) {}

  std::size_t run() {
    search(0, 0, 0);
    return best_;
  }

 private:
  // `next_b` is the first B node still available; `cost` counts relabels,
  // unmapped A nodes so far, and B nodes skipped before next_b.
  void search(std::size_t i, std::size_t next_b, std::size_t cost) {
    const std::size_t rem_a = a_.size() - i;
    const std::size_t rem_b = b_.size() - next_b;
    const std::size_t bound = cost + (rem_a > rem_b ? rem_a - rem_b : rem_b - rem_a);
    if (bound >= best_) return;
    if (i == a_.size()) {
      best_ = cost + rem_b;
      return;
    }
    for (std::size_t j = next_b; j < b_.size(); ++j) {
      if (!postorder_consistent(i, j)) continue;
      const std::size_t relabel = a_.nodes[i].label == b_.nodes[j].label ? 0 : 1;
      pairs_.emplace_back(i, j);
      search(i + 1, j + 1, cost + relabel + (j - next_b));
      pairs_.pop_back();
    }
    search(i + 1, next_b, cost + 1);
  }

  bool postorder_consistent(std::size_t i, std::size_t j) const {
    return std::all_of(pairs_.begin(), pairs_.end(), [&](const auto& p) {
      return (pa_.post[p.first] < pa_.post[i]) == (pb_.post[p.second] < pb_.post[j]);
    });
  }

  const TableTree& a_;
  const TableTree& b_;
  Numbered pa_;
  Numbered pb_;
  std::size_t best_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
};

}  // namespace

std::size_t tree_edit_cost_bruteforce(const TableTree& a, const TableTree& b) {
  return MappingSearch(a, b).run();
}

// ---------------------------------------------------------------------------
// Value matches

double cell_value_match(const Table& pred, const Table& gold) {
  const std::size_t gold_cells = gold.cell_count();
  if (gold_cells == 0) return pred.cell_count() == 0 ? 100.0 : 0.0;
  std::unordered_map<std::string, std::size_t> available;
  for (const auto* rows : {&pred.header_rows, &pred.body_rows}) {
    for (const Row& row : *rows) {
      for (const Cell& cell : row) ++available[detail::normalize_ws(cell.text)];
    }
  }
  std::size_t hits = 0;
  for (const auto* rows : {&gold.header_rows, &gold.body_rows}) {
    for (const Row& row : *rows) {
      for (const Cell& cell : row) {
        auto it = available.find(detail::normalize_ws(cell.text));
        if (it != available.end() && it->second > 0) {
          --it->second;
          ++hits;
        }
      }
    }
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(gold_cells);
}

namespace {

/// Body columns by grid position; slots without a starting cell read "".
std::vector<std::vector<std::string>> body_columns(const Table& t) {
  std::vector<std::vector<std::string>> cols(t.width, std::vector<std::string>(t.body_rows.size()));
  for (std::size_t r = 0; r < t.body_rows.size(); ++r) {
    for (const Cell& cell : t.body_rows[r]) {
      if (cell.col < cols.size()) cols[cell.col][r] = detail::normalize_ws(cell.text);
    }
  }
  return cols;
}

}  // namespace

double column_value_match(const Table& pred, const Table& gold) {
  const auto gold_cols = body_columns(gold);
  const auto pred_cols = body_columns(pred);
  if (gold_cols.empty()) return pred_cols.empty() ? 100.0 : 0.0;
  std::vector<bool> used(pred_cols.size(), false);
  std::size_t matched = 0;
  for (const auto& g : gold_cols) {
    for (std::size_t p = 0; p < pred_cols.size(); ++p) {
      if (used[p] || pred_cols[p] != g) continue;
      used[p] = true;
      ++matched;
      break;
    }
  }
  return 100.0 * static_cast<double>(matched) / static_cast<double>(gold_cols.size());
}

MetricReport evaluate(const Table& pred, const Table& gold, const SourceText& source) {
  const Table p = normalize_rectangular(pred);
  const Table g = normalize_rectangular(gold);
  MetricReport m;
  m.em = exact_match(p, g);
  m.ted = tree_edit_distance(p, g);
  m.cvm = cell_value_match(p, g);
  m.colvm = column_value_match(p, g);
  m.coverage = compute_coverage(source, p);
  m.hallucination = compute_hallucination(source, p);
  return m;
}

json to_json(const MetricReport& m) {
  return json{{"em", m.em},       {"ted", m.ted},           {"cvm", m.cvm},
              {"colvm", m.colvm}, {"coverage", m.coverage}, {"hallucination", m.hallucination}};
}

std::string to_tsv_row(std::string_view task_id, const MetricReport& m) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "\t%d\t%.6f\t%.4f\t%.4f\t%.6f\t%.6f", m.em, m.ted, m.cvm, m.colvm, m.coverage,
                m.hallucination);
  return std::string(task_id) + buf;
}

}  // namespace tabrecon
