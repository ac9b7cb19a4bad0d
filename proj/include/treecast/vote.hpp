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

// Multi-source combination of projected trees: arc votes are decoded into a
// single-root tree, then relations and UPOS are chosen by majority among the
// sources. Ties go to the source listed first.

#ifndef TREECAST_VOTE_HPP_
#define TREECAST_VOTE_HPP_

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "treecast/conllu.hpp"
#include "treecast/mst.hpp"
#include "treecast/project.hpp"

namespace treecast {

struct Vote {
  std::string value;
  std::string source;

  bool operator==(const Vote&) const = default;
};

struct VoteGraph {
  int n = 0;
  std::map<std::pair<int, int>, int> arc_weight;  // (head, dep) -> votes
  std::map<std::pair<int, int>, std::vector<Vote>> arc_labels;
  std::vector<std::vector<Vote>> pos_votes;  // index d-1
  std::vector<std::string> sources;          // priority order
  std::vector<std::string> forms;
};

using NamedSentence = std::pair<std::string, Sentence>;
inline VoteGraph build_vote_graph(const std::vector<NamedSentence>& trees) {
  if (trees.empty()) throw Error("vote: no trees to combine");
  VoteGraph g;
  g.n = static_cast<int>(trees.front().second.size());
  g.forms = trees.front().second.forms();
  g.pos_votes.resize(g.n);
  for (const auto& [name, s] : trees) {
    if (static_cast<int>(s.size()) != g.n)
      throw Error("vote: source '" + name + "' has " + std::to_string(s.size()) +
                  " tokens, expected " + std::to_string(g.n));
    if (s.forms() != g.forms) throw Error("vote: source '" + name + "' has different forms");
    if (const auto report = is_valid_tree(s); !report.ok())
      throw Error("vote: source '" + name + "' is not a valid tree (" +
                  std::string(to_string(report.violations.front().kind)) + ")");
    if (std::find(g.sources.begin(), g.sources.end(), name) != g.sources.end())
      throw Error("vote: duplicate source name '" + name + "'");
    g.sources.push_back(name);
    for (const auto& t : s.tokens) {
      const std::pair<int, int> arc{t.head, t.id};
      ++g.arc_weight[arc];
      g.arc_labels[arc].push_back({t.deprel, name});
      g.pos_votes[t.id - 1].push_back({t.upos, name});
    }
  }
  return g;
}

// Most frequent value; ties resolved by the earliest source in `priority`
// proposing one of the tied values.
inline std::string majority(const std::vector<Vote>& votes,
                            const std::vector<std::string>& priority) {
  std::map<std::string, int> counts;
  for (const auto& v : votes) ++counts[v.value];
  int top = 0;
  for (const auto& [value, c] : counts) top = std::max(top, c);
  for (const auto& src : priority) {
    for (const auto& v : votes) {
      if (v.source == src && counts[v.value] == top) return v.value;
    }
  }
  return votes.empty() ? std::string(kEmptyField) : votes.front().value;
}

inline ScoreMatrix vote_scores(const VoteGraph& g) {
  ScoreMatrix m(g.n);
  for (const auto& [arc, w] : g.arc_weight) m.set(arc.first, arc.second, w);
  return m;
}

inline Sentence decode_votes(const VoteGraph& g) {
  const auto heads = cle_decode(vote_scores(g));
  Sentence out;
  for (int d = 1; d <= g.n; ++d) {
    Token t;
    t.id = d;
    t.form = g.forms[d - 1];
    t.head = heads[d - 1];
    t.deprel = majority(g.arc_labels.at({t.head, d}), g.sources);
    t.upos = majority(g.pos_votes[d - 1], g.sources);
    out.tokens.push_back(std::move(t));
  }
  out.set_meta("vote_sources", util::join(g.sources, ","));
  return out;
}

// Corpus indices present in at least `min_sources` of the treebanks.
inline std::set<std::size_t> shared_indices(const std::vector<NamedTreebank>& treebanks,
                                            int min_sources) {
  if (min_sources < 1 || min_sources > static_cast<int>(treebanks.size()))
    throw Error("min_sources must be between 1 and " + std::to_string(treebanks.size()));
  std::map<std::size_t, int> counts;
  for (const auto& [name, tb] : treebanks) {
    std::set<std::size_t> seen;
    for (const auto& s : tb.sentences) {
      const auto idx = source_index(s);
      if (!idx) throw Error("treebank '" + name + "': sentence without " + std::string(kIndexKey));
      if (!seen.insert(*idx).second)
        throw Error("treebank '" + name + "': duplicate " + std::string(kIndexKey) + " " +
                    std::to_string(*idx));
    }
    for (auto i : seen) ++counts[i];
  }
  std::set<std::size_t> out;
  for (const auto& [i, c] : counts)
    if (c >= min_sources) out.insert(i);
  return out;
}

inline Treebank multi_source_merge(const std::vector<NamedTreebank>& treebanks, int min_sources) {
  const auto keep = shared_indices(treebanks, min_sources);
  std::map<std::size_t, std::vector<NamedSentence>> by_index;
  for (const auto& [name, tb] : treebanks) {
    for (const auto& s : tb.sentences) {
      const auto idx = *source_index(s);
      if (keep.count(idx)) by_index[idx].emplace_back(name, s);
    }
  }
  Treebank out;
  out.name = "multi";
  for (const auto& [idx, trees] : by_index) {
    Sentence s = decode_votes(build_vote_graph(trees));
    Sentence merged;
    merged.set_meta(kIndexKey, std::to_string(idx));
    if (const auto text = trees.front().second.meta("text")) merged.set_meta("text", *text);
    for (const auto& c : s.comments) merged.comments.push_back(c);
    merged.tokens = std::move(s.tokens);
    out.sentences.push_back(std::move(merged));
  }
  return out;
}

// Keeps only sentences whose corpus index is in `indices`.
inline Treebank restrict_to(const Treebank& tb, const std::set<std::size_t>& indices) {
  Treebank out;
  out.name = tb.name;
  for (const auto& s : tb.sentences) {
    const auto idx = source_index(s);
    if (!idx) throw Error("treebank '" + tb.name + "': sentence without " + std::string(kIndexKey));
    if (indices.count(*idx)) out.sentences.push_back(s);
  }
  return out;
}

}  // namespace treecast

#endif  // TREECAST_VOTE_HPP_
