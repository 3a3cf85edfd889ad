#include <doctest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "table_gen.hpp"
#include "ted_oracle.hpp"
#include "tabrecon/metrics.hpp"

using namespace tabrecon;
using namespace tabrecon::testing;

namespace {

Table grid(const std::vector<std::vector<std::string>>& rows) { return normalize_rectangular(make_table({}, rows)); }

Table permute_rows(Table t, std::mt19937& rng) {
  std::shuffle(t.body_rows.begin(), t.body_rows.end(), rng);
  for (std::size_t r = 0; r < t.body_rows.size(); ++r) {
    for (Cell& c : t.body_rows[r]) c.row = r;
  }
  return t;
}

Table permute_columns(const Table& t, std::mt19937& rng) {
  std::vector<std::size_t> order(t.width);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::string>> header, body;
  for (const Row& row : t.header_rows) {
    header.emplace_back();
    for (std::size_t c : order) header.back().push_back(row[c].text);
  }
  for (const Row& row : t.body_rows) {
    body.emplace_back();
    for (std::size_t c : order) body.back().push_back(row[c].text);
  }
  return normalize_rectangular(make_table(header, body));
}

}  // namespace

TEST_CASE("tree shape") {
  const TableTree tree = TableTree::from_table(make_table({{"h"}}, {{"a", "b"}}));
  REQUIRE(tree.size() == 6);
  CHECK(tree.nodes[0].label == "table");
  CHECK(tree.nodes[0].children.size() == 2);
  CHECK(tree.nodes[1].label != tree.nodes[3].label);  // header row vs body row
}

TEST_CASE("ted examples") {
  const Table a = grid({{"a", "b"}, {"c", "d"}});
  CHECK(tree_edit_distance(a, a) == 0.0);
  CHECK(tree_edit_distance(Table{}, a) == doctest::Approx(6.0 / 7.0));
  CHECK(tree_edit_distance(a, grid({{"a", "b"}, {"c", "x"}})) == doctest::Approx(1.0 / 7.0));
  CHECK(tree_edit_cost(a, grid({{"a", "b"}})) == 3);
  CHECK(tree_edit_distance(Table{}, Table{}) == 0.0);
}

TEST_CASE("ted agrees with the exhaustive oracle on a slice of the pool") {
  const auto pool = small_table_pool();
  for (std::size_t i = 0; i < pool.size(); i += 3) {
    for (std::size_t j = 0; j < pool.size(); j += 5) {
      const auto ta = TableTree::from_table(pool[i]);
      const auto tb = TableTree::from_table(pool[j]);
      CHECK(tree_edit_cost(pool[i], pool[j]) == tree_edit_cost_bruteforce(ta, tb));
    }
  }
}

TEST_CASE("ted agrees with Zhang-Shasha on random tables") {
  std::mt19937 rng(3);
  RandomTableOptions opts;
  opts.ragged = true;
  opts.colspan_probability = 0.1;
  for (int i = 0; i < 300; ++i) {
    const Table a = random_table(rng, opts);
    const Table b = random_table(rng, opts);
    CHECK(tree_edit_cost(a, b) == zhang_shasha(TableTree::from_table(a), TableTree::from_table(b)));
  }
}

TEST_CASE("brute-force oracle agrees with Zhang-Shasha") {
  const auto pool = small_table_pool();
  for (std::size_t i = 0; i < pool.size(); i += 4) {
    for (std::size_t j = 1; j < pool.size(); j += 4) {
      const auto ta = TableTree::from_table(pool[i]);
      const auto tb = TableTree::from_table(pool[j]);
      CHECK(tree_edit_cost_bruteforce(ta, tb) == zhang_shasha(ta, tb));
    }
  }
}

TEST_CASE("ted is symmetric and obeys the triangle inequality on the pool") {
  const auto pool = small_table_pool();
  for (std::size_t i = 0; i < pool.size(); i += 2) {
    for (std::size_t j = 0; j < pool.size(); j += 3) {
      const std::size_t ij = tree_edit_cost(pool[i], pool[j]);
      CHECK(ij == tree_edit_cost(pool[j], pool[i]));
      for (std::size_t k = 0; k < pool.size(); k += 7) {
        CHECK(ij <= tree_edit_cost(pool[i], pool[k]) + tree_edit_cost(pool[k], pool[j]));
      }
    }
  }
}

TEST_CASE("cell value match") {
  const Table gold = grid({{"a", "b"}, {"c", "d"}});
  CHECK(cell_value_match(gold, gold) == 100.0);
  CHECK(cell_value_match(grid({{"w", "x"}, {"y", "z"}}), gold) == 0.0);
  CHECK(cell_value_match(grid({{"d", "c"}, {"x", "a"}}), gold) == doctest::Approx(75.0));
  // multiset: a repeated pred value matches one gold value only
  CHECK(cell_value_match(grid({{"a", "a"}, {"a", "a"}}), gold) == doctest::Approx(25.0));
  CHECK(cell_value_match(Table{}, Table{}) == 100.0);
}

TEST_CASE("column value match") {
  const Table gold = grid({{"1", "2", "3"}, {"4", "5", "6"}});
  CHECK(column_value_match(gold, gold) == 100.0);
  CHECK(column_value_match(grid({{"3", "1", "2"}, {"6", "4", "5"}}), gold) == 100.0);
  CHECK(column_value_match(grid({{"1", "x", "y"}, {"4", "z", "w"}}), gold) == doctest::Approx(100.0 / 3.0));
  CHECK(column_value_match(Table{}, gold) == 0.0);
  // one pred column cannot satisfy two identical gold columns
  CHECK(column_value_match(grid({{"1", "9"}}), grid({{"1", "1"}})) == doctest::Approx(50.0));
}

TEST_CASE("evaluate: one wrong cell in a 3x3") {
  const Table gold = grid({{"1", "2", "3"}, {"4", "5", "6"}, {"7", "8", "9"}});
  const Table pred = grid({{"1", "2", "3"}, {"4", "0", "6"}, {"7", "8", "9"}});
  const MetricReport m = evaluate(pred, gold, flatten_table(gold, FlattenStyle::ocr));
  CHECK(m.em == 0);
  CHECK(m.ted == doctest::Approx(1.0 / 13.0));
  CHECK(m.cvm == doctest::Approx(800.0 / 9.0));
  CHECK(m.colvm == doctest::Approx(200.0 / 3.0));
}

TEST_CASE("evaluate: identity and empty prediction") {
  const Table gold = grid({{"x", "1"}, {"y", "2"}});
  const SourceText s = flatten_table(gold, FlattenStyle::ocr);
  const MetricReport same = evaluate(gold, gold, s);
  CHECK(same.em == 1);
  CHECK(same.ted == 0.0);
  CHECK(same.cvm == 100.0);
  CHECK(same.colvm == 100.0);
  CHECK(same.coverage == 1.0);
  CHECK(same.hallucination == 0.0);
  const MetricReport none = evaluate(Table{}, gold, s);
  CHECK(none.em == 0);
  CHECK(none.cvm == 0.0);
  CHECK(none.colvm == 0.0);
  CHECK(none.coverage == 0.0);
}

TEST_CASE("exact match counts headers, spans and row shapes") {
  const Table a = make_table({{"h"}}, {{"1"}});
  CHECK(exact_match(a, make_table({}, {{"h"}, {"1"}})) == 0);
  CHECK(exact_match(a, make_table({{" h "}}, {{"1"}})) == 1);
  Table spanned = make_table({}, {{"x"}});
  spanned.body_rows[0][0].span.cols = 2;
  CHECK(exact_match(spanned, make_table({}, {{"x"}})) == 0);
}

TEST_CASE("permutation invariance") {
  std::mt19937 rng(5);
  for (int i = 0; i < 200; ++i) {
    RandomTableOptions opts;
    opts.colspan_probability = 0;
    const Table gold = random_table(rng, opts);
    const Table pred = random_table(rng, opts);
    CHECK(cell_value_match(permute_rows(pred, rng), gold) == doctest::Approx(cell_value_match(pred, gold)));
    CHECK(column_value_match(permute_columns(gold, rng), gold) == 100.0);
  }
}

TEST_CASE("tsv and json rows") {
  MetricReport m{1, 0.0, 100.0, 100.0, 1.0, 0.0};
  CHECK(to_tsv_row("t1", m) == "t1\t1\t0.000000\t100.0000\t100.0000\t1.000000\t0.000000");
  CHECK(to_json(m).at("em") == 1);
}
