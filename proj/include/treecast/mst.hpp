// Copyright 2026 The Treecast Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Maximum spanning arborescence (Chu-Liu-Edmonds) with a single-root
// constraint, shared by vote decoding and the parser.

#ifndef TREECAST_MST_HPP_
#define TREECAST_MST_HPP_

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "treecast/common.hpp"

namespace treecast {

// Dense arc scores over nodes 0..n, node 0 being the root. score(h, d) is the
// weight of arc h -> d; dependents are 1..n. Arcs left at kForbidden are not
// available to the decoder.
class ScoreMatrix {
 public:
  static constexpr double kForbidden = -std::numeric_limits<double>::infinity();

  explicit ScoreMatrix(int n) : n_(n), data_(static_cast<std::size_t>(n + 1) * (n + 1), kForbidden) {
    if (n < 0) throw Error("ScoreMatrix: negative size");
  }

  int size() const { return n_; }

  double operator()(int head, int dep) const { return data_[index(head, dep)]; }

  void set(int head, int dep, double value) {
    if (head == dep) throw Error("ScoreMatrix: self-arc " + std::to_string(head));
    data_[index(head, dep)] = value;
  }

  void forbid(int head, int dep) { data_[index(head, dep)] = kForbidden; }

  bool allowed(int head, int dep) const {
    return head != dep && (*this)(head, dep) != kForbidden;
  }

 private:
  std::size_t index(int head, int dep) const {
    if (head < 0 || head > n_ || dep < 1 || dep > n_)
      throw Error("ScoreMatrix: arc " + std::to_string(head) + "->" + std::to_string(dep) +
                  " out of range for n=" + std::to_string(n_));
    return static_cast<std::size_t>(head) * (n_ + 1) + dep;
  }

  int n_;
  std::vector<double> data_;
};

// Sum of arc scores for heads[d-1] = head of d.
inline double tree_score(const ScoreMatrix& m, std::span<const int> heads) {
  double total = 0.0;
  for (std::size_t d = 1; d <= heads.size(); ++d) total += m(heads[d - 1], static_cast<int>(d));
  return total;
}

namespace detail {

// Arc weight ordered lexicographically on (score, tie). The tie component is
// -head, so among equal scores lower head indices win.
struct ArcWeight {
  double score = 0.0;
  double tie = 0.0;

  ArcWeight operator+(const ArcWeight& o) const { return {score + o.score, tie + o.tie}; }
  ArcWeight operator-(const ArcWeight& o) const { return {score - o.score, tie - o.tie}; }
  bool better_than(const ArcWeight& o) const {
    return score > o.score || (score == o.score && tie > o.tie);
  }
};

using WeightGrid = std::vector<std::vector<std::optional<ArcWeight>>>;

// Unconstrained maximum arborescence rooted at node 0. Returns parent per
// node (parent[0] = -1), or nullopt when some node cannot be reached.
inline std::optional<std::vector<int>> chu_liu_edmonds(const WeightGrid& w) {
  const int n = static_cast<int>(w.size());
  std::vector<int> parent(n, -1);
  for (int v = 1; v < n; ++v) {
    for (int h = 0; h < n; ++h) {
      if (h == v || !w[h][v]) continue;
      if (parent[v] < 0 || w[h][v]->better_than(*w[parent[v]][v])) parent[v] = h;
    }
    if (parent[v] < 0) return std::nullopt;
  }

  // Look for a cycle among the greedy choices.
  std::vector<int> mark(n, -1);
  std::vector<int> cycle;
  for (int start = 1; start < n && cycle.empty(); ++start) {
    int v = start;
    while (v > 0 && mark[v] < 0) {
      mark[v] = start;
      v = parent[v];
    }
    if (v > 0 && mark[v] == start) {
      int u = v;
      do {
        cycle.push_back(u);
        u = parent[u];
      } while (u != v);
    }
  }
  if (cycle.empty()) return parent;

  std::vector<char> in_cycle(n, 0);
  for (int v : cycle) in_cycle[v] = 1;
  std::vector<int> new_id(n, -1), old_id;
  for (int v = 0; v < n; ++v) {
    if (!in_cycle[v]) {
      new_id[v] = static_cast<int>(old_id.size());
      old_id.push_back(v);
    }
  }
  const int c = static_cast<int>(old_id.size());
  const int m = c + 1;

  WeightGrid w2(m, std::vector<std::optional<ArcWeight>>(m));
  std::vector<int> enter(m, -1);  // contracted source -> cycle node entered
  std::vector<int> leave(m, -1);  // contracted dependent -> cycle node leaving
  for (int u = 0; u < n; ++u) {
    if (in_cycle[u]) continue;
    const int uu = new_id[u];
    for (int v = 0; v < n; ++v) {
      if (u == v || !w[u][v]) continue;
      if (!in_cycle[v]) {
        w2[uu][new_id[v]] = w[u][v];
      } else {
        const ArcWeight cand = *w[u][v] - *w[parent[v]][v];
        if (!w2[uu][c] || cand.better_than(*w2[uu][c])) {
          w2[uu][c] = cand;
          enter[uu] = v;
        }
      }
    }
  }
  for (int u : cycle) {
    for (int v = 0; v < n; ++v) {
      if (in_cycle[v] || !w[u][v]) continue;
      const int vv = new_id[v];
      if (!w2[c][vv] || w[u][v]->better_than(*w2[c][vv])) {
        w2[c][vv] = w[u][v];
        leave[vv] = u;
      }
    }
  }

  const auto sub = chu_liu_edmonds(w2);
  if (!sub) return std::nullopt;

  std::vector<int> result = parent;
  for (int vv = 1; vv < c; ++vv) {
    const int p = (*sub)[vv];
    result[old_id[vv]] = p == c ? leave[vv] : old_id[p];
  }
  const int entering_from = (*sub)[c];
  result[enter[entering_from]] = old_id[entering_from];
  return result;
}

}  // namespace detail

// Highest-scoring spanning arborescence in which node 0 has exactly one
// child. Runs the unconstrained decoder once per admissible root child.
// Returns heads[d-1] for d = 1..n. Throws when no single-root tree exists.
inline std::vector<int> cle_decode(const ScoreMatrix& m) {
  const int n = m.size();
  if (n == 0) return {};
  using detail::ArcWeight;

  detail::WeightGrid base(n + 1, std::vector<std::optional<ArcWeight>>(n + 1));
  for (int h = 1; h <= n; ++h)
    for (int d = 1; d <= n; ++d)
      if (m.allowed(h, d)) base[h][d] = ArcWeight{m(h, d), -static_cast<double>(h)};

  std::optional<std::vector<int>> best;
  ArcWeight best_total{};
  for (int r = 1; r <= n; ++r) {
    if (!m.allowed(0, r)) continue;
    for (int d = 1; d <= n; ++d) base[0][d].reset();
    base[0][r] = ArcWeight{m(0, r), 0.0};
    auto parent = detail::chu_liu_edmonds(base);
    if (!parent) continue;
    ArcWeight total{};
    for (int d = 1; d <= n; ++d) total = total + *base[(*parent)[d]][d];
    if (!best || total.better_than(best_total)) {
      best = std::vector<int>(parent->begin() + 1, parent->end());
      best_total = total;
    }
  }
  if (!best) throw Error("cle_decode: no single-root spanning tree with finite score");
  return *best;
}

}  // namespace treecast

#endif  // TREECAST_MST_HPP_
