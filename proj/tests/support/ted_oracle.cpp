#include "ted_oracle.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace tabrecon::testing {

namespace {

struct Postorder {
  std::vector<std::string> labels;  // 1-based
  std::vector<std::size_t> lml;     // leftmost leaf descendant, 1-based
  std::vector<std::size_t> keyroots;
};

std::size_t visit(const TableTree& t, std::size_t node, Postorder& out) {
  std::size_t leftmost = 0;
  for (std::size_t child : t.nodes[node].children) {
    const std::size_t l = visit(t, child, out);
    if (leftmost == 0) leftmost = l;
  }
  out.labels.push_back(t.nodes[node].label);
  const std::size_t index = out.labels.size() - 1;
  out.lml.push_back(leftmost == 0 ? index : leftmost);
  return out.lml.back();
}

Postorder postorder(const TableTree& t) {
  Postorder p;
  p.labels.emplace_back();
  p.lml.push_back(0);
  if (!t.nodes.empty()) visit(t, 0, p);
  const std::size_t n = p.labels.size() - 1;
  for (std::size_t i = 1; i <= n; ++i) {
    bool later = false;
    for (std::size_t j = i + 1; j <= n; ++j) later = later || p.lml[j] == p.lml[i];
    if (!later) p.keyroots.push_back(i);
  }
  return p;
}

}  // namespace

std::size_t zhang_shasha(const TableTree& a, const TableTree& b) {
  const Postorder A = postorder(a);
  const Postorder B = postorder(b);
  const std::size_t n = A.labels.size() - 1;
  const std::size_t m = B.labels.size() - 1;
  if (n == 0 || m == 0) return n + m;

  std::vector<std::vector<std::size_t>> td(n + 1, std::vector<std::size_t>(m + 1, 0));
  std::vector<std::vector<std::size_t>> fd(n + 2, std::vector<std::size_t>(m + 2, 0));
  for (std::size_t i : A.keyroots) {
    for (std::size_t j : B.keyroots) {
      const std::size_t li = A.lml[i];
      const std::size_t lj = B.lml[j];
      // fd indexed by offset from li-1 / lj-1
      fd[0][0] = 0;
      for (std::size_t x = li; x <= i; ++x) fd[x - li + 1][0] = fd[x - li][0] + 1;
      for (std::size_t y = lj; y <= j; ++y) fd[0][y - lj + 1] = fd[0][y - lj] + 1;
      for (std::size_t x = li; x <= i; ++x) {
        for (std::size_t y = lj; y <= j; ++y) {
          const std::size_t dx = x - li + 1;
          const std::size_t dy = y - lj + 1;
          const std::size_t del = fd[dx - 1][dy] + 1;
          const std::size_t ins = fd[dx][dy - 1] + 1;
          if (A.lml[x] == li && B.lml[y] == lj) {
            const std::size_t rel = fd[dx - 1][dy - 1] + (A.labels[x] == B.labels[y] ? 0 : 1);
            fd[dx][dy] = std::min({del, ins, rel});
            td[x][y] = fd[dx][dy];
          } else {
            const std::size_t sub = fd[A.lml[x] - li][B.lml[y] - lj] + td[x][y];
            fd[dx][dy] = std::min({del, ins, sub});
          }
        }
      }
    }
  }
  return td[n][m];
}

}  // namespace tabrecon::testing
