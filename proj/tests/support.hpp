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

// Shared test helpers and independent reference implementations. Nothing here
// calls into the library code it is used to check: the oracles recompute
// their answers from first principles, usually by exhaustive enumeration.

#ifndef TREECAST_TESTS_SUPPORT_HPP_
#define TREECAST_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "treecast/treecast.hpp"

#ifndef TREECAST_TEST_DATA
#define TREECAST_TEST_DATA "tests/data"
#endif

namespace testing_support {

inline std::string data_path(const std::string& rel) { return std::string(TREECAST_TEST_DATA) + "/" + rel; }

inline const std::vector<std::string>& deprel_pool() {
  static const std::vector<std::string> pool = {"nsubj", "obj", "obl", "nmod", "amod", "det",
                                                "case", "advmod", "punct", "nsubj:pass"};
  return pool;
}

inline const std::vector<std::string>& upos_pool() {
  static const std::vector<std::string> pool = {"NOUN", "VERB", "ADJ", "DET", "ADP", "PRON", "ADV"};
  return pool;
}

// Uniformly shaped random single-root tree: nodes are attached in a random
// order to a node already in the tree. Returns heads[d-1].
inline std::vector<int> random_heads(int n, std::mt19937_64& rng) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 1);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> heads(n, 0);
  for (int k = 1; k < n; ++k) heads[order[k] - 1] = order[rng() % k];
  return heads;
}

inline treecast::Sentence make_sentence(const std::vector<int>& heads,
                                        const std::vector<std::string>& deprels = {},
                                        const std::vector<std::string>& upos = {},
                                        const std::vector<std::string>& forms = {}) {
  treecast::Sentence s;
  for (std::size_t i = 0; i < heads.size(); ++i) {
    treecast::Token t;
    t.id = static_cast<int>(i) + 1;
    t.form = forms.empty() ? "w" + std::to_string(i + 1) : forms[i];
    t.upos = upos.empty() ? "X" : upos[i];
    t.head = heads[i];
    t.deprel = deprels.empty() ? (heads[i] == 0 ? "root" : "dep") : deprels[i];
    s.tokens.push_back(std::move(t));
  }
  return s;
}

inline treecast::Sentence random_sentence(int n, std::mt19937_64& rng) {
  const auto heads = random_heads(n, rng);
  std::vector<std::string> rels, tags, forms;
  for (int i = 0; i < n; ++i) {
    rels.push_back(heads[i] == 0 ? "root" : deprel_pool()[rng() % deprel_pool().size()]);
    tags.push_back(upos_pool()[rng() % upos_pool().size()]);
    forms.push_back("f" + std::to_string(rng() % 50));
  }
  return make_sentence(heads, rels, tags, forms);
}

// ---------------------------------------------------------------------------
// Tree validity by explicit reachability: a structure is a tree when exactly
// one token hangs off the root, all heads lie in 0..n, and a breadth-first
// walk down from node 0 visits every token.

inline bool reachability_tree_oracle(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size());
  int roots = 0;
  for (int d = 1; d <= n; ++d) {
    const int h = heads[d - 1];
    if (h < 0 || h > n || h == d) return false;
    if (h == 0) ++roots;
  }
  if (roots != 1) return false;
  std::vector<std::vector<int>> children(n + 1);
  for (int d = 1; d <= n; ++d) children[heads[d - 1]].push_back(d);
  std::vector<char> seen(n + 1, 0);
  std::vector<int> queue{0};
  seen[0] = 1;
  for (std::size_t q = 0; q < queue.size(); ++q)
    for (int c : children[queue[q]])
      if (!seen[c]) {
        seen[c] = 1;
        queue.push_back(c);
      }
  return std::count(seen.begin(), seen.end(), 1) == n + 1;
}

// ---------------------------------------------------------------------------
// Exhaustive maximum single-root arborescence. Enumerates every head
// assignment with heads[d] != d and keeps the valid trees using only
// allowed arcs. Returns the best total, or nullopt if none exists.

inline std::optional<double> brute_force_best_tree(const treecast::ScoreMatrix& m,
                                                   std::vector<int>* argmax = nullptr) {
  const int n = m.size();
  std::vector<int> heads(n, 0);
  std::optional<double> best;
  while (true) {
    bool usable = true;
    for (int d = 1; d <= n && usable; ++d) usable = heads[d - 1] != d && m.allowed(heads[d - 1], d);
    if (usable && reachability_tree_oracle(heads)) {
      double total = 0;
      for (int d = 1; d <= n; ++d) total += m(heads[d - 1], d);
      if (!best || total > *best) {
        best = total;
        if (argmax) *argmax = heads;
      }
    }
    int k = 0;
    while (k < n && ++heads[k] > n) heads[k++] = 0;
    if (k == n) break;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Dense reference for EM with a uniform distortion (lambda = 0): each target
// word picks null with probability p0 and each source word with probability
// (1 - p0) / l. Keyed by strings so it shares no indexing with the library.

struct ReferenceTable {
  std::map<std::string, std::map<std::string, double>> t;  // t[e][f], "" is the null word
  std::vector<double> log_likelihoods;
};

inline ReferenceTable model1_reference(const treecast::Bitext& bitext, int iterations, double p0) {
  std::set<std::string> src_vocab{""}, tgt_vocab;
  for (const auto& p : bitext) {
    src_vocab.insert(p.source.begin(), p.source.end());
    tgt_vocab.insert(p.target.begin(), p.target.end());
  }
  ReferenceTable ref;
  for (const auto& e : src_vocab)
    for (const auto& f : tgt_vocab) ref.t[e][f] = 1.0 / static_cast<double>(tgt_vocab.size());

  for (int it = 0; it < iterations; ++it) {
    std::map<std::string, std::map<std::string, double>> count;
    double ll = 0;
    for (const auto& p : bitext) {
      const double l = static_cast<double>(p.source.size());
      for (const auto& f : p.target) {
        double z = p0 * ref.t[""][f];
        for (const auto& e : p.source) z += (1 - p0) / l * ref.t[e][f];
        ll += std::log(z);
        count[""][f] += p0 * ref.t[""][f] / z;
        for (const auto& e : p.source) count[e][f] += (1 - p0) / l * ref.t[e][f] / z;
      }
    }
    ref.log_likelihoods.push_back(ll);
    for (const auto& e : src_vocab) {
      double total = 0;
      for (const auto& f : tgt_vocab) total += count[e][f];
      if (total <= 0) continue;
      for (const auto& f : tgt_vocab) ref.t[e][f] = count[e][f] / total;
    }
  }
  return ref;
}

// Distortion weight written out independently of the library's helper.
inline double reference_prior(int i, int j, int l, int m, double lambda, double p0) {
  double z = 0;
  for (int k = 0; k < l; ++k) z += std::exp(-lambda * std::fabs(double(k) / l - double(j) / m));
  return (1 - p0) * std::exp(-lambda * std::fabs(double(i) / l - double(j) / m)) / z;
}

inline double null_prob(const treecast::TranslationTable& table, const std::string& f) {
  const auto id = table.target_id(f);
  return id ? table.prob(treecast::TranslationTable::kNull, *id) : 0.0;
}

// Corpus log-likelihood of a trained table, by direct summation.
inline double direct_log_likelihood(const treecast::TranslationTable& table,
                                    const treecast::Bitext& bitext) {
  double ll = 0;
  for (const auto& p : bitext) {
    const int l = static_cast<int>(p.source.size());
    const int m = static_cast<int>(p.target.size());
    for (int j = 0; j < m; ++j) {
      double z = table.p0 * null_prob(table, p.target[j]);
      for (int i = 0; i < l; ++i)
        z += reference_prior(i, j, l, m, table.lambda, table.p0) * table.prob(p.source[i], p.target[j]);
      ll += std::log(z);
    }
  }
  return ll;
}

// Decoding score of a single link (i = -1 is null) under the documented
// rules for unseen words and pairs.
inline double link_score(const treecast::TranslationTable& table, const std::vector<std::string>& src,
                         const std::vector<std::string>& tgt, int i, int j) {
  const int l = static_cast<int>(src.size());
  const int m = static_cast<int>(tgt.size());
  const bool known_f = table.target_id(tgt[j]).has_value();
  if (i < 0) return known_f ? table.p0 * null_prob(table, tgt[j]) : table.p0;
  double t = table.prob(src[i], tgt[j]);
  if (!(t > 0)) t = treecast::kLexicalFloor;
  return reference_prior(i, j, l, m, table.lambda, table.p0) * t;
}

// Best alignment function by enumerating all (l + 1)^m of them. Among equal
// products the earliest enumerated one (null first, then ascending source
// index) is kept.
inline std::pair<double, std::vector<int>> brute_force_viterbi(const treecast::TranslationTable& table,
                                                               const std::vector<std::string>& src,
                                                               const std::vector<std::string>& tgt) {
  const int l = static_cast<int>(src.size());
  const int m = static_cast<int>(tgt.size());
  std::vector<int> a(m, -1);
  double best = -1;
  std::vector<int> best_a;
  while (true) {
    double p = 1;
    for (int j = 0; j < m; ++j) p *= link_score(table, src, tgt, a[j], j);
    if (p > best) {
      best = p;
      best_a = a;
    }
    int k = 0;
    while (k < m && ++a[k] >= l) a[k++] = -1;
    if (k == m) break;
  }
  return {best, best_a};
}

// ---------------------------------------------------------------------------
// Projection rules restated with explicit tuple-keyed minima.

struct ProjectionOracle {
  std::vector<int> heads;  // n + 1 marks an unresolved anchor
  std::vector<std::string> deprels, upos;
  int fallbacks = 0;
};

inline ProjectionOracle project_oracle(const treecast::Sentence& src, int nt,
                                       const std::set<std::pair<int, int>>& links) {
  const int ns = static_cast<int>(src.size());
  ProjectionOracle o;
  std::vector<int> anchor(nt + 1, 0);
  for (int j = 1; j <= nt; ++j) {
    std::optional<std::tuple<int, int>> key;
    for (const auto& [s, t] : links) {
      if (t + 1 != j) continue;
      const std::tuple<int, int> k{std::abs(s + 1 - j), s + 1};
      if (!key || k < *key) key = k;
    }
    if (key) {
      anchor[j] = std::get<1>(*key);
    } else if (j <= ns) {
      anchor[j] = j;
      ++o.fallbacks;
    }
  }
  for (int j = 1; j <= nt; ++j) {
    if (anchor[j] == 0) {
      o.heads.push_back(nt + 1);
      o.deprels.emplace_back("_");
      o.upos.emplace_back("_");
      continue;
    }
    const auto& tok = src.tokens[anchor[j] - 1];
    o.deprels.push_back(tok.deprel);
    o.upos.push_back(tok.upos);
    if (tok.head == 0) {
      o.heads.push_back(0);
      continue;
    }
    std::optional<std::tuple<int, int>> key;
    for (int k = 1; k <= nt; ++k) {
      if (anchor[k] != tok.head) continue;
      const std::tuple<int, int> cand{std::abs(k - tok.head), k};
      if (!key || cand < *key) key = cand;
    }
    o.heads.push_back(key ? std::get<1>(*key) : tok.head);
  }
  return o;
}

// ---------------------------------------------------------------------------
// Reattaches roughly `rate` of the non-root tokens to a random node outside
// their own subtree (never the root, so the result stays a valid tree) and
// draws a fresh label for them.

inline treecast::Sentence corrupt_tree(const treecast::Sentence& s, double rate, std::mt19937_64& rng) {
  treecast::Sentence out = s;
  const int n = static_cast<int>(s.size());
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int d = 1; d <= n; ++d) {
    auto& tok = out.tokens[d - 1];
    if (tok.head == 0 || coin(rng) >= rate) continue;
    std::vector<int> options;
    for (int h = 1; h <= n; ++h) {
      if (h == d || h == tok.head) continue;
      int v = h;
      while (v != 0 && v != d) v = out.tokens[v - 1].head;
      if (v == 0) options.push_back(h);
    }
    if (options.empty()) continue;
    tok.head = options[rng() % options.size()];
    tok.deprel = deprel_pool()[rng() % deprel_pool().size()];
  }
  return out;
}

}  // namespace testing_support

#endif  // TREECAST_TESTS_SUPPORT_HPP_
