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

// Attachment scores with gold tokenization, following the CoNLL 2018 shared
// task scorer: heads must match for UAS, heads and the universal part of the
// relation for LAS. Punctuation is scored. Files the official scorer refuses
// (multiple roots, no root, cycles, heads outside the sentence) are refused
// here too.
//
// Also: treebank statistics and pairwise arc agreement between sources.

#ifndef TREECAST_EVAL_HPP_
#define TREECAST_EVAL_HPP_

#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include "treecast/conllu.hpp"
#include "treecast/project.hpp"

namespace treecast {

struct DeprelCount {
  long gold = 0;
  long correct = 0;

  bool operator==(const DeprelCount&) const = default;
};

struct EvalReport {
  long token_count = 0;
  long head_correct = 0;
  long label_correct = 0;
  double uas = 0.0;
  double las = 0.0;
  std::map<std::string, DeprelCount> per_deprel;  // keyed by universal relation
};

class EvalError : public Error {
 public:
  using Error::Error;
};

inline std::string nfc(const std::string& s) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
  const icu::UnicodeString in = icu::UnicodeString::fromUTF8(s);
  const icu::UnicodeString out = norm->normalize(in, status);
  if (U_FAILURE(status)) throw Error("NFC normalization failed");
  std::string result;
  out.toUTF8String(result);
  return result;
}

namespace detail {

inline void check_scorable(const Sentence& s, std::size_t idx, const char* which) {
  const auto report = is_valid_tree(s);
  if (report.ok()) return;
  std::string what;
  switch (report.violations.front().kind) {
    case Violation::MultipleRoots: what = "multiple roots"; break;
    case Violation::ZeroRoots: what = "no root"; break;
    case Violation::HeadOutOfRange: what = "head outside the sentence"; break;
    case Violation::SelfHead:
    case Violation::Cycle: what = "cycle"; break;
  }
  throw EvalError(std::string(which) + " sentence " + std::to_string(idx + 1) + ": " + what);
}

}  // namespace detail

inline EvalReport evaluate(const Treebank& gold, const Treebank& pred) {
  if (gold.size() != pred.size())
    throw EvalError("sentence count mismatch: gold " + std::to_string(gold.size()) + ", predicted " +
                    std::to_string(pred.size()));
  EvalReport r;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto& g = gold.sentences[i];
    const auto& p = pred.sentences[i];
    if (g.size() != p.size())
      throw EvalError("sentence " + std::to_string(i + 1) + ": token count mismatch (gold " +
                      std::to_string(g.size()) + ", predicted " + std::to_string(p.size()) + ")");
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (g.tokens[k].form != p.tokens[k].form && nfc(g.tokens[k].form) != nfc(p.tokens[k].form))
        throw EvalError("sentence " + std::to_string(i + 1) + " token " + std::to_string(k + 1) +
                        ": form mismatch '" + g.tokens[k].form + "' vs '" + p.tokens[k].form + "'");
    }
    detail::check_scorable(g, i, "gold");
    detail::check_scorable(p, i, "predicted");
    for (std::size_t k = 0; k < g.size(); ++k) {
      const auto& gt = g.tokens[k];
      const auto& pt = p.tokens[k];
      const std::string rel(universal_deprel(gt.deprel));
      auto& bucket = r.per_deprel[rel];
      ++bucket.gold;
      ++r.token_count;
      if (gt.head != pt.head) continue;
      ++r.head_correct;
      if (rel == universal_deprel(pt.deprel)) {
        ++r.label_correct;
        ++bucket.correct;
      }
    }
  }
  if (r.token_count > 0) {
    r.uas = 100.0 * static_cast<double>(r.head_correct) / static_cast<double>(r.token_count);
    r.las = 100.0 * static_cast<double>(r.label_correct) / static_cast<double>(r.token_count);
  }
  return r;
}

inline std::string format_report(const EvalReport& r) {
  char buf[128];
  std::string out;
  std::snprintf(buf, sizeof buf, "Tokens: %ld\nUAS: %.2f\nLAS: %.2f\n", r.token_count, r.uas, r.las);
  out += buf;
  out += "\nrelation      gold  correct\n";
  for (const auto& [rel, c] : r.per_deprel) {
    std::snprintf(buf, sizeof buf, "%-12s %5ld %8ld\n", rel.c_str(), c.gold, c.correct);
    out += buf;
  }
  out += "\n";
  std::snprintf(buf, sizeof buf, "metric\tvalue\ntokens\t%ld\nuas\t%.4f\nlas\t%.4f\n", r.token_count,
                r.uas, r.las);
  out += buf;
  return out;
}

struct TreebankStats {
  long valid_sentences = 0;
  long tokens = 0;
  long rejected = 0;
  std::map<RejectReason, long> rejections;
  double mean_length = 0.0;
};

inline TreebankStats treebank_stats(const Treebank& tb, const RejectionLog& log) {
  TreebankStats s;
  s.valid_sentences = static_cast<long>(tb.size());
  for (const auto& sent : tb.sentences) s.tokens += static_cast<long>(sent.size());
  for (const auto& r : log) {
    ++s.rejected;
    ++s.rejections[r.reason];
  }
  if (s.valid_sentences > 0) s.mean_length = static_cast<double>(s.tokens) / s.valid_sentences;
  return s;
}

// Pairwise head agreement (percent of tokens) over sentences both treebanks
// contain. nullopt where a pair shares no sentence.
using AgreementMatrix = std::vector<std::vector<std::optional<double>>>;

inline AgreementMatrix agreement_matrix(const std::vector<NamedTreebank>& tbs) {
  std::vector<std::map<std::size_t, const Sentence*>> index(tbs.size());
  for (std::size_t a = 0; a < tbs.size(); ++a) {
    for (const auto& s : tbs[a].second.sentences) {
      const auto idx = source_index(s);
      if (!idx)
        throw Error("treebank '" + tbs[a].first + "': sentence without " + std::string(kIndexKey));
      index[a][*idx] = &s;
    }
  }
  const std::size_t k = tbs.size();
  AgreementMatrix m(k, std::vector<std::optional<double>>(k));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      long total = 0, agree = 0;
      for (const auto& [idx, sa] : index[a]) {
        auto it = index[b].find(idx);
        if (it == index[b].end()) continue;
        const Sentence* sb = it->second;
        if (sa->size() != sb->size())
          throw Error("sentence " + std::to_string(idx) + " has different lengths in '" +
                      tbs[a].first + "' and '" + tbs[b].first + "'");
        for (std::size_t t = 0; t < sa->size(); ++t) {
          ++total;
          if (sa->tokens[t].head == sb->tokens[t].head) ++agree;
        }
      }
      if (total > 0) m[a][b] = m[b][a] = 100.0 * static_cast<double>(agree) / total;
    }
  }
  return m;
}

}  // namespace treecast

#endif  // TREECAST_EVAL_HPP_
