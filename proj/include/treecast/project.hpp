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

// Single-source annotation projection through word alignments.
//
// Every target token j gets a source anchor: the aligned source token closest
// in position (ties to the lower index), or source token j when j is
// unaligned and j <= |source|. Heads, relations and UPOS are read off the
// anchor. The projected tree is then filtered for validity.

#ifndef TREECAST_PROJECT_HPP_
#define TREECAST_PROJECT_HPP_

#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "treecast/align.hpp"
#include "treecast/conllu.hpp"

namespace treecast {

enum class RejectReason {
  LengthUnprojectable,
  MultipleRoots,
  ZeroRoots,
  SelfHead,
  HeadOutOfRange,
  Cycle,
};

inline constexpr std::string_view to_string(RejectReason r) {
  switch (r) {
    case RejectReason::LengthUnprojectable: return "LengthUnprojectable";
    case RejectReason::MultipleRoots: return "MultipleRoots";
    case RejectReason::ZeroRoots: return "ZeroRoots";
    case RejectReason::SelfHead: return "SelfHead";
    case RejectReason::HeadOutOfRange: return "HeadOutOfRange";
    case RejectReason::Cycle: return "Cycle";
  }
  return "?";
}

inline std::optional<RejectReason> reject_reason_from_string(std::string_view s) {
  for (auto r : {RejectReason::LengthUnprojectable, RejectReason::MultipleRoots,
                 RejectReason::ZeroRoots, RejectReason::SelfHead, RejectReason::HeadOutOfRange,
                 RejectReason::Cycle}) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

inline constexpr RejectReason to_reject_reason(Violation v) {
  switch (v) {
    case Violation::MultipleRoots: return RejectReason::MultipleRoots;
    case Violation::SelfHead: return RejectReason::SelfHead;
    case Violation::HeadOutOfRange: return RejectReason::HeadOutOfRange;
    case Violation::ZeroRoots: return RejectReason::ZeroRoots;
    case Violation::Cycle: return RejectReason::Cycle;
  }
  return RejectReason::LengthUnprojectable;
}

struct ProjectionOptions {
  bool reject_cycles = true;
};

struct ProjectionOutcome {
  std::optional<Sentence> result;
  std::optional<RejectReason> rejection;
  int fallback_count = 0;
  // The projected sentence before filtering; kept for diagnostics.
  Sentence candidate;

  bool accepted() const { return result.has_value(); }
};

namespace detail {

// Closest candidate to `pos`, ties to the smaller value; candidates ascending.
inline int closest(const std::vector<int>& candidates, int pos) {
  int best = candidates.front();
  for (int c : candidates) {
    if (std::abs(c - pos) < std::abs(best - pos)) best = c;
  }
  return best;
}

}  // namespace detail

inline ProjectionOutcome project_sentence(const Sentence& source,
                                          const std::vector<std::string>& target_forms,
                                          const AlignmentSet& align,
                                          const ProjectionOptions& opts = {}) {
  const int ns = static_cast<int>(source.size());
  const int nt = static_cast<int>(target_forms.size());
  if (align.src_len != ns || align.tgt_len != nt)
    throw Error("projection: alignment declares lengths (" + std::to_string(align.src_len) +
                ", " + std::to_string(align.tgt_len) + ") but sentences have (" +
                std::to_string(ns) + ", " + std::to_string(nt) + ")");

  ProjectionOutcome outcome;
  if (ns == 0 || nt == 0) {
    outcome.rejection = RejectReason::LengthUnprojectable;
    return outcome;
  }

  // 1-based ids throughout; anchor 0 = unresolved.
  std::vector<std::vector<int>> aligned(nt + 1);
  for (const auto& [s, t] : align.pairs) aligned[t + 1].push_back(s + 1);

  std::vector<int> anchor(nt + 1, 0);
  std::vector<std::vector<int>> anchored_to(ns + 1);
  for (int j = 1; j <= nt; ++j) {
    if (!aligned[j].empty()) {
      anchor[j] = detail::closest(aligned[j], j);
    } else if (j <= ns) {
      anchor[j] = j;
      ++outcome.fallback_count;
    }
    if (anchor[j]) anchored_to[anchor[j]].push_back(j);
  }

  Sentence& out = outcome.candidate;
  out.tokens.reserve(nt);
  for (int j = 1; j <= nt; ++j) {
    Token tok;
    tok.id = j;
    tok.form = target_forms[j - 1];
    const int a = anchor[j];
    if (!a) {
      tok.head = nt + 1;
      out.tokens.push_back(std::move(tok));
      continue;
    }
    const Token& src = source.tokens[a - 1];
    tok.upos = src.upos;
    tok.deprel = src.deprel;
    tok.misc = "Anchor=" + std::to_string(a);
    const int sh = src.head;
    if (sh == 0) {
      tok.head = 0;
    } else if (sh >= 1 && sh <= ns && !anchored_to[sh].empty()) {
      tok.head = detail::closest(anchored_to[sh], sh);
    } else {
      tok.head = sh;
    }
    out.tokens.push_back(std::move(tok));
  }

  const auto report = is_valid_tree(out);
  for (const auto& v : report.violations) {
    if (v.kind == Violation::Cycle && !opts.reject_cycles) continue;
    outcome.rejection = to_reject_reason(v.kind);
    return outcome;
  }
  outcome.result = out;
  return outcome;
}

struct Rejection {
  std::size_t index;
  RejectReason reason;

  bool operator==(const Rejection&) const = default;
};

using RejectionLog = std::vector<Rejection>;

struct ProjectedTreebank {
  Treebank treebank;
  RejectionLog rejections;
  int fallback_tokens = 0;
};

inline constexpr std::string_view kIndexKey = "source_sentence_index";

inline ProjectedTreebank project_treebank(const Treebank& source,
                                          const std::vector<std::vector<std::string>>& targets,
                                          const std::vector<AlignmentSet>& aligns,
                                          const ProjectionOptions& opts = {}) {
  if (source.size() != targets.size() || source.size() != aligns.size())
    throw Error("projection: parallel inputs differ in length (source " +
                std::to_string(source.size()) + ", target " + std::to_string(targets.size()) +
                ", alignments " + std::to_string(aligns.size()) + ")");
  ProjectedTreebank out;
  out.treebank.name = source.name;
  for (std::size_t i = 0; i < source.size(); ++i) {
    auto outcome = project_sentence(source.sentences[i], targets[i], aligns[i], opts);
    if (!outcome.accepted()) {
      out.rejections.push_back({i, *outcome.rejection});
      continue;
    }
    out.fallback_tokens += outcome.fallback_count;
    Sentence s = std::move(*outcome.result);
    s.set_meta(kIndexKey, std::to_string(i));
    s.set_meta("text", util::join(targets[i], " "));
    out.treebank.sentences.push_back(std::move(s));
  }
  return out;
}

inline std::string serialize_rejections(const RejectionLog& log) {
  std::string out;
  for (const auto& r : log) {
    out += std::to_string(r.index);
    out += '\t';
    out += to_string(r.reason);
    out += '\n';
  }
  return out;
}

inline RejectionLog parse_rejections(std::string_view text) {
  RejectionLog log;
  std::size_t line_no = 0;
  for (auto line : util::split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto cols = util::split(line, '\t');
    const auto idx = cols.size() == 2 ? util::parse_int<std::size_t>(cols[0]) : std::nullopt;
    const auto reason = cols.size() == 2 ? reject_reason_from_string(cols[1]) : std::nullopt;
    if (!idx || !reason)
      throw Error("rejection log line " + std::to_string(line_no) + ": expected 'index<TAB>reason'");
    log.push_back({*idx, *reason});
  }
  return log;
}

// Corpus index recorded by project_treebank, if any.
inline std::optional<std::size_t> source_index(const Sentence& s) {
  const auto v = s.meta(kIndexKey);
  if (!v) return std::nullopt;
  return util::parse_int<std::size_t>(*v);
}

}  // namespace treecast

#endif  // TREECAST_PROJECT_HPP_
