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

// Word alignments: Pharaoh-format ingestion and a small lexical aligner.
//
// The aligner is IBM Model 1 with a fixed null probability and an optional
// diagonal prior over source positions,
//
//   P(a_j = i) = (1 - p0) * h(i, j) / sum_i' h(i', j)
//   h(i, j)    = exp(-lambda * |i / l - j / m|)
//
// with l, m the source and target lengths and 0-based i, j. lambda = 0 gives
// a uniform prior, i.e. plain Model 1. Only the lexical table is estimated.

#ifndef TREECAST_ALIGN_HPP_
#define TREECAST_ALIGN_HPP_

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "treecast/common.hpp"

namespace treecast {

struct AlignmentSet {
  std::set<std::pair<int, int>> pairs;  // (source index, target index), 0-based
  int src_len = 0;
  int tgt_len = 0;

  AlignmentSet() = default;
  AlignmentSet(int src, int tgt) : src_len(src), tgt_len(tgt) {}

  bool operator==(const AlignmentSet&) const = default;

  void add(int src, int tgt) {
    if (src < 0 || src >= src_len)
      throw Error("alignment source index " + std::to_string(src) + " out of range (length " +
                  std::to_string(src_len) + ")");
    if (tgt < 0 || tgt >= tgt_len)
      throw Error("alignment target index " + std::to_string(tgt) + " out of range (length " +
                  std::to_string(tgt_len) + ")");
    pairs.emplace(src, tgt);
  }

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
};

// Parses "i-j i-j ..." with source index first; `swap` reads "j-i" instead.
inline AlignmentSet parse_pharaoh(std::string_view line, int src_len, int tgt_len,
                                  bool swap = false) {
  AlignmentSet out(src_len, tgt_len);
  for (const auto& item : util::split_whitespace(line)) {
    const auto dash = item.find('-');
    std::optional<int> a, b;
    if (dash != std::string::npos) {
      a = util::parse_int<int>(std::string_view(item).substr(0, dash));
      b = util::parse_int<int>(std::string_view(item).substr(dash + 1));
    }
    if (!a || !b || *a < 0 || *b < 0) throw Error("malformed alignment pair '" + item + "'");
    if (swap) std::swap(a, b);
    out.add(*a, *b);
  }
  return out;
}

inline std::string to_pharaoh(const AlignmentSet& a, bool swap = false) {
  std::string out;
  for (const auto& [s, t] : a.pairs) {
    if (!out.empty()) out += ' ';
    out += std::to_string(swap ? t : s);
    out += '-';
    out += std::to_string(swap ? s : t);
  }
  return out;
}

struct SentencePair {
  std::vector<std::string> source;
  std::vector<std::string> target;
};

using Bitext = std::vector<SentencePair>;

// Reads fast_align-style "source ||| target" lines.
inline Bitext parse_bitext(const std::vector<std::string>& lines, bool lowercase = false) {
  Bitext out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto sep = lines[i].find("|||");
    if (sep == std::string::npos)
      throw Error("bitext line " + std::to_string(i + 1) + ": missing '|||' separator");
    std::string src = lines[i].substr(0, sep);
    std::string tgt = lines[i].substr(sep + 3);
    if (lowercase) {
      src = util::ascii_lower(src);
      tgt = util::ascii_lower(tgt);
    }
    out.push_back({util::split_whitespace(src), util::split_whitespace(tgt)});
  }
  return out;
}

struct EmOptions {
  int iterations = 5;
  double lambda = 4.0;
  double p0 = 0.08;
};

inline constexpr double kLexicalFloor = 1e-12;

class TranslationTable {
 public:
  static constexpr int kNull = 0;

  TranslationTable() : source_vocab_{"<null>"} {}

  double p0 = 0.08;
  double lambda = 4.0;
  // Corpus log-likelihood under the parameters entering each EM iteration.
  std::vector<double> log_likelihoods;

  std::optional<int> source_id(const std::string& w) const {
    auto it = source_index_.find(w);
    if (it == source_index_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<int> target_id(const std::string& w) const {
    auto it = target_index_.find(w);
    if (it == target_index_.end()) return std::nullopt;
    return it->second;
  }

  int intern_source(const std::string& w) {
    auto [it, inserted] = source_index_.emplace(w, static_cast<int>(source_vocab_.size()));
    if (inserted) {
      source_vocab_.push_back(w);
      rows_.resize(source_vocab_.size());
    }
    return it->second;
  }
  int intern_target(const std::string& w) {
    auto [it, inserted] = target_index_.emplace(w, static_cast<int>(target_vocab_.size()));
    if (inserted) target_vocab_.push_back(w);
    return it->second;
  }

  const std::vector<std::string>& source_vocab() const { return source_vocab_; }
  const std::vector<std::string>& target_vocab() const { return target_vocab_; }

  // t(f | e); 0 for pairs never seen together.
  double prob(int e, int f) const {
    if (e < 0 || e >= static_cast<int>(rows_.size())) return 0.0;
    const auto& row = rows_[e];
    auto it = row.find(f);
    return it == row.end() ? 0.0 : it->second;
  }

  double prob(const std::string& e, const std::string& f) const {
    const auto ei = source_id(e);
    const auto fi = target_id(f);
    if (!ei || !fi) return 0.0;
    return prob(*ei, *fi);
  }

  std::map<int, double>& row(int e) {
    if (rows_.size() < source_vocab_.size()) rows_.resize(source_vocab_.size());
    return rows_.at(e);
  }
  const std::map<int, double>& row(int e) const { return rows_.at(e); }
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> source_vocab_;
  std::vector<std::string> target_vocab_;
  std::unordered_map<std::string, int> source_index_;
  std::unordered_map<std::string, int> target_index_;
  std::vector<std::map<int, double>> rows_{1};
};

// Normalized diagonal prior over source positions for target position j,
// already scaled by (1 - p0).
inline std::vector<double> diagonal_prior(int j, int src_len, int tgt_len, double lambda,
                                          double p0) {
  std::vector<double> h(src_len);
  double z = 0.0;
  for (int i = 0; i < src_len; ++i) {
    const double d = std::abs(static_cast<double>(i) / src_len - static_cast<double>(j) / tgt_len);
    h[i] = std::exp(-lambda * d);
    z += h[i];
  }
  for (double& v : h) v = (1.0 - p0) * v / z;
  return h;
}

namespace detail {

struct IndexedPair {
  std::vector<int> source;  // without the null word
  std::vector<int> target;
};

}  // namespace detail

inline TranslationTable em_train(const Bitext& bitext, const EmOptions& opts) {
  if (opts.iterations < 1) throw Error("em_train: iterations must be >= 1");
  if (bitext.empty()) throw Error("em_train: empty corpus");
  if (!(opts.lambda >= 0.0)) throw Error("em_train: lambda must be >= 0");
  if (!(opts.p0 >= 0.0 && opts.p0 < 1.0)) throw Error("em_train: p0 must be in [0, 1)");

  TranslationTable table;
  table.p0 = opts.p0;
  table.lambda = opts.lambda;

  std::vector<detail::IndexedPair> corpus;
  corpus.reserve(bitext.size());
  for (std::size_t k = 0; k < bitext.size(); ++k) {
    const auto& sp = bitext[k];
    if (sp.source.empty() || sp.target.empty())
      throw Error("em_train: empty sentence in pair " + std::to_string(k));
    detail::IndexedPair ip;
    for (const auto& w : sp.source) ip.source.push_back(table.intern_source(w));
    for (const auto& w : sp.target) ip.target.push_back(table.intern_target(w));
    corpus.push_back(std::move(ip));
  }

  // Uniform start over the whole target vocabulary, stored only for pairs
  // that co-occur; other pairs can never receive expected counts.
  const double uniform = 1.0 / static_cast<double>(table.target_vocab().size());
  for (const auto& ip : corpus) {
    for (int f : ip.target) {
      table.row(TranslationTable::kNull)[f] = uniform;
      for (int e : ip.source) table.row(e)[f] = uniform;
    }
  }

  std::vector<std::map<int, double>> counts(table.rows());
  for (int it = 0; it < opts.iterations; ++it) {
    for (auto& c : counts) c.clear();
    double loglik = 0.0;
    std::vector<double> post;
    for (const auto& ip : corpus) {
      const int l = static_cast<int>(ip.source.size());
      const int m = static_cast<int>(ip.target.size());
      post.resize(l);
      for (int j = 0; j < m; ++j) {
        const int f = ip.target[j];
        const auto prior = diagonal_prior(j, l, m, opts.lambda, opts.p0);
        const double null_mass = opts.p0 * table.prob(TranslationTable::kNull, f);
        double total = null_mass;
        for (int i = 0; i < l; ++i) {
          post[i] = prior[i] * table.prob(ip.source[i], f);
          total += post[i];
        }
        if (!(total > 0.0)) continue;
        loglik += std::log(total);
        if (null_mass > 0.0) counts[TranslationTable::kNull][f] += null_mass / total;
        for (int i = 0; i < l; ++i) counts[ip.source[i]][f] += post[i] / total;
      }
    }
    table.log_likelihoods.push_back(loglik);

    for (std::size_t e = 0; e < counts.size(); ++e) {
      double z = 0.0;
      for (const auto& [f, c] : counts[e]) z += c;
      if (!(z > 0.0)) continue;
      auto& row = table.row(static_cast<int>(e));
      for (auto& [f, p] : row) {
        auto cit = counts[e].find(f);
        p = cit == counts[e].end() ? 0.0 : cit->second / z;
      }
    }
  }
  return table;
}

// Most probable alignment, one decision per target position. A target word
// is left unaligned when the null choice scores at least as high as every
// source word. Unseen pairs score kLexicalFloor; unseen target words give the
// null word probability p0.
inline AlignmentSet viterbi_align(const TranslationTable& table,
                                  const std::vector<std::string>& source,
                                  const std::vector<std::string>& target) {
  const int l = static_cast<int>(source.size());
  const int m = static_cast<int>(target.size());
  AlignmentSet out(l, m);
  if (l == 0 || m == 0) return out;

  std::vector<std::optional<int>> src_ids;
  src_ids.reserve(l);
  for (const auto& w : source) src_ids.push_back(table.source_id(w));

  for (int j = 0; j < m; ++j) {
    const auto f = table.target_id(target[j]);
    const auto prior = diagonal_prior(j, l, m, table.lambda, table.p0);
    double best = f ? table.p0 * table.prob(TranslationTable::kNull, *f) : table.p0;
    int best_i = -1;
    for (int i = 0; i < l; ++i) {
      double t = (f && src_ids[i]) ? table.prob(*src_ids[i], *f) : 0.0;
      if (t <= 0.0) t = kLexicalFloor;
      const double score = prior[i] * t;
      if (score > best) {
        best = score;
        best_i = i;
      }
    }
    if (best_i >= 0) out.add(best_i, j);
  }
  return out;
}

}  // namespace treecast

#endif  // TREECAST_ALIGN_HPP_
