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

// Greedy left-to-right averaged-perceptron UPOS tagger and jackknife tagging.
// Only word forms and previously predicted tags are used as evidence.

#ifndef TREECAST_TAGGER_HPP_
#define TREECAST_TAGGER_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "treecast/conllu.hpp"
#include "treecast/linear_model.hpp"

namespace treecast {

struct TrainOptions {
  int epochs = 20;
  std::uint64_t seed = 1;
  // Use treebank-id conjunctions even with a single training treebank.
  bool force_multi = false;
};

namespace detail {

inline std::vector<std::string> treebank_ids(const std::vector<NamedTreebank>& tbs,
                                             bool force_multi) {
  if (tbs.empty()) throw Error("no training treebanks");
  std::set<std::string> seen;
  std::vector<std::string> ids;
  for (const auto& [id, tb] : tbs) {
    if (id.empty() || id.find_first_of("\t\n|") != std::string::npos)
      throw Error("invalid treebank id '" + id + "'");
    if (!seen.insert(id).second) throw Error("duplicate treebank id '" + id + "'");
    ids.push_back(id);
  }
  if (tbs.size() == 1 && !force_multi) ids.clear();
  return ids;
}

// Epoch-order shuffle. Fisher-Yates driven directly by the engine output so
// the order does not depend on the standard library's distributions.
template <typename T>
void shuffle_in_place(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng() % i]);
}

inline bool has_digit(const std::string& s) {
  for (char c : s)
    if (c >= '0' && c <= '9') return true;
  return false;
}

}  // namespace detail

inline std::vector<std::string> tagger_features(const std::vector<std::string>& forms, std::size_t i,
                                                const std::string& prev1, const std::string& prev2) {
  const std::string& form = forms[i];
  const std::string lower = util::ascii_lower(form);
  std::vector<std::string> f;
  f.reserve(20);
  f.emplace_back("b");
  f.push_back("w=" + lower);
  for (std::size_t k = 1; k <= 4 && k <= lower.size(); ++k) {
    f.push_back("pre" + std::to_string(k) + "=" + lower.substr(0, k));
    f.push_back("suf" + std::to_string(k) + "=" + lower.substr(lower.size() - k));
  }
  if (detail::has_digit(form)) f.emplace_back("digit");
  if (form.find('-') != std::string::npos) f.emplace_back("hyphen");
  if (!form.empty() && form[0] >= 'A' && form[0] <= 'Z') f.emplace_back("cap");
  f.push_back("w-1=" + (i > 0 ? util::ascii_lower(forms[i - 1]) : std::string("<s>")));
  f.push_back("w+1=" + (i + 1 < forms.size() ? util::ascii_lower(forms[i + 1]) : std::string("</s>")));
  f.push_back("t-1=" + prev1);
  f.push_back("t-2=" + prev2);
  f.push_back("t-1,t-2=" + prev1 + "," + prev2);
  return f;
}

inline std::vector<std::string> tag_with(const LinearModel& model, const std::vector<std::string>& forms,
                                         const std::optional<std::string>& treebank) {
  std::vector<std::string> tags;
  tags.reserve(forms.size());
  std::string p1 = "<s>", p2 = "<s>";
  for (std::size_t i = 0; i < forms.size(); ++i) {
    const auto feats = tagger_features(forms, i, p1, p2);
    tags.push_back(model.labels()[model.predict(feats, treebank)]);
    p2 = std::move(p1);
    p1 = tags.back();
  }
  return tags;
}

inline LinearModel train_tagger(const std::vector<NamedTreebank>& tbs, const TrainOptions& opts = {}) {
  if (opts.epochs < 1) throw Error("epochs must be >= 1");
  const auto ids = detail::treebank_ids(tbs, opts.force_multi);
  std::set<std::string> tagset;
  std::vector<std::pair<std::size_t, std::size_t>> order;
  for (std::size_t t = 0; t < tbs.size(); ++t) {
    const auto& sents = tbs[t].second.sentences;
    for (std::size_t s = 0; s < sents.size(); ++s) {
      if (sents[s].tokens.empty()) throw Error("empty training sentence");
      for (const auto& tok : sents[s].tokens) tagset.insert(tok.upos);
      order.emplace_back(t, s);
    }
  }
  if (order.empty()) throw Error("no training sentences");

  LinearModel model(ModelMode::Tagger, {tagset.begin(), tagset.end()}, ids);
  std::mt19937_64 rng(opts.seed);
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    detail::shuffle_in_place(order, rng);
    for (const auto& [t, s] : order) {
      const Sentence& sent = tbs[t].second.sentences[s];
      const std::optional<std::string> tb =
          model.multi() ? std::optional<std::string>(tbs[t].first) : std::nullopt;
      const auto forms = sent.forms();
      std::string p1 = "<s>", p2 = "<s>";
      for (std::size_t i = 0; i < forms.size(); ++i) {
        model.tick();
        const auto feats = tagger_features(forms, i, p1, p2);
        const int guess = model.predict(feats, tb);
        const int gold = *model.label_index(sent.tokens[i].upos);
        if (guess != gold) {
          model.update(feats, tb, gold, 1.0);
          model.update(feats, tb, guess, -1.0);
        }
        p2 = std::move(p1);
        p1 = model.labels()[guess];
      }
    }
  }
  model.finalize();
  return model;
}

inline std::vector<std::string> tag(const LinearModel& model, const std::vector<std::string>& forms,
                                    const std::optional<std::string>& proxy = std::nullopt) {
  if (model.mode() != ModelMode::Tagger) throw Error("tag: not a tagger model");
  return tag_with(model, forms, model.resolve_treebank(proxy));
}

// Silver UPOS by k-fold jackknifing: sentence i falls in fold i % folds and is
// tagged by a model trained on the other folds.
inline Treebank jackknife_tags(const Treebank& tb, int folds, const TrainOptions& opts = {}) {
  if (folds < 2) throw Error("jackknife: folds must be >= 2");
  if (tb.size() < static_cast<std::size_t>(folds))
    throw Error("jackknife: " + std::to_string(folds) + " folds but only " +
                std::to_string(tb.size()) + " sentences");
  Treebank out = tb;
  const std::string name = tb.name.empty() ? std::string("train") : tb.name;
  for (int k = 0; k < folds; ++k) {
    Treebank rest;
    rest.name = name;
    for (std::size_t i = 0; i < tb.size(); ++i)
      if (static_cast<int>(i % folds) != k) rest.sentences.push_back(tb.sentences[i]);
    TrainOptions fold_opts = opts;
    fold_opts.force_multi = false;
    const auto model = train_tagger({{name, rest}}, fold_opts);
    for (std::size_t i = k; i < tb.size(); i += folds) {
      auto& sent = out.sentences[i];
      const auto tags = tag(model, sent.forms());
      for (std::size_t j = 0; j < tags.size(); ++j) sent.tokens[j].upos = tags[j];
    }
  }
  return out;
}

}  // namespace treecast

#endif  // TREECAST_TAGGER_HPP_
