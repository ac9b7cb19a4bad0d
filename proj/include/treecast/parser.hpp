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

// First-order graph-based dependency parser trained as a structured averaged
// perceptron. Arcs are decoded with single-root Chu-Liu-Edmonds; relations
// are assigned afterwards by a multiclass perceptron over the chosen arcs.

#ifndef TREECAST_PARSER_HPP_
#define TREECAST_PARSER_HPP_

#include <cstdlib>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "treecast/conllu.hpp"
#include "treecast/linear_model.hpp"
#include "treecast/mst.hpp"
#include "treecast/tagger.hpp"

namespace treecast {

struct ParserModel {
  LinearModel arcs;
  LinearModel labels;
};

// Word and tag context with the artificial root at position 0.
class ArcContext {
 public:
  ArcContext(const std::vector<std::string>& forms, const std::vector<std::string>& upos) {
    if (forms.size() != upos.size()) throw Error("parser: forms and UPOS differ in length");
    forms_.reserve(forms.size() + 1);
    tags_.reserve(forms.size() + 1);
    forms_.emplace_back("<root>");
    tags_.emplace_back("ROOT");
    for (std::size_t i = 0; i < forms.size(); ++i) {
      forms_.push_back(util::ascii_lower(forms[i]));
      tags_.push_back(upos[i]);
    }
  }

  int size() const { return static_cast<int>(forms_.size()) - 1; }

  const std::string& tag(int i) const {
    static const std::string kNone = "<none>";
    return i < 0 || i > size() ? kNone : tags_[i];
  }

  std::vector<std::string> features(int head, int dep) const {
    const std::string& hw = forms_[head];
    const std::string& hp = tags_[head];
    const std::string& dw = forms_[dep];
    const std::string& dp = tags_[dep];
    const std::string dist = distance_bucket(head, dep);

    std::vector<std::string> f;
    f.reserve(28);
    f.emplace_back("b");
    f.push_back("hw=" + hw);
    f.push_back("hp=" + hp);
    f.push_back("dw=" + dw);
    f.push_back("dp=" + dp);
    f.push_back("hw,hp=" + hw + "," + hp);
    f.push_back("dw,dp=" + dw + "," + dp);
    f.push_back("hw,dw=" + hw + "," + dw);
    f.push_back("hp,dp=" + hp + "," + dp);
    f.push_back("hw,dp=" + hw + "," + dp);
    f.push_back("hp,dw=" + hp + "," + dw);
    f.push_back("dist=" + dist);
    f.push_back("hp,dp,dist=" + hp + "," + dp + "," + dist);
    f.push_back("hw,dp,dist=" + hw + "," + dp + "," + dist);
    f.push_back("hp,dw,dist=" + hp + "," + dw + "," + dist);

    const int lo = std::min(head, dep), hi = std::max(head, dep);
    std::set<std::string> between;
    for (int k = lo + 1; k < hi; ++k) between.insert(tags_[k]);
    for (const auto& bp : between) f.push_back("btw=" + hp + "," + bp + "," + dp);

    const std::string& hl = tag(head - 1);
    const std::string& hr = tag(head + 1);
    const std::string& dl = tag(dep - 1);
    const std::string& dr = tag(dep + 1);
    f.push_back("ctx1=" + hp + "," + hr + "," + dl + "," + dp);
    f.push_back("ctx2=" + hl + "," + hp + "," + dl + "," + dp);
    f.push_back("ctx3=" + hp + "," + hr + "," + dp + "," + dr);
    f.push_back("ctx4=" + hl + "," + hp + "," + dp + "," + dr);
    return f;
  }

 private:
  static std::string distance_bucket(int head, int dep) {
    const int d = std::abs(head - dep);
    std::string b;
    if (d <= 5) b = std::to_string(d);
    else if (d <= 10) b = "6-10";
    else b = ">10";
    return (head < dep ? "R" : "L") + b;
  }

  std::vector<std::string> forms_;
  std::vector<std::string> tags_;
};

inline ScoreMatrix arc_scores(const LinearModel& arcs, const ArcContext& ctx,
                              const std::optional<std::string>& treebank) {
  const int n = ctx.size();
  ScoreMatrix m(n);
  for (int h = 0; h <= n; ++h)
    for (int d = 1; d <= n; ++d)
      if (h != d) m.set(h, d, arcs.score_one(ctx.features(h, d), treebank));
  return m;
}

inline ParserModel train_parser(const std::vector<NamedTreebank>& tbs, const TrainOptions& opts = {}) {
  if (opts.epochs < 1) throw Error("epochs must be >= 1");
  const auto ids = detail::treebank_ids(tbs, opts.force_multi);
  std::set<std::string> relset;
  std::vector<std::pair<std::size_t, std::size_t>> order;
  for (std::size_t t = 0; t < tbs.size(); ++t) {
    const auto& sents = tbs[t].second.sentences;
    for (std::size_t s = 0; s < sents.size(); ++s) {
      if (sents[s].tokens.empty()) throw Error("empty training sentence");
      if (const auto r = is_valid_tree(sents[s]); !r.ok())
        throw Error("treebank '" + tbs[t].first + "' sentence " + std::to_string(s + 1) +
                    ": invalid training tree (" + std::string(to_string(*r.primary())) + ")");
      for (const auto& tok : sents[s].tokens) relset.insert(tok.deprel);
      order.emplace_back(t, s);
    }
  }
  if (order.empty()) throw Error("no training sentences");

  ParserModel model{LinearModel(ModelMode::Arcs, {"arc"}, ids),
                    LinearModel(ModelMode::Labeler, {relset.begin(), relset.end()}, ids)};
  std::mt19937_64 rng(opts.seed);
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    detail::shuffle_in_place(order, rng);
    for (const auto& [t, s] : order) {
      const Sentence& sent = tbs[t].second.sentences[s];
      const std::optional<std::string> tb =
          model.arcs.multi() ? std::optional<std::string>(tbs[t].first) : std::nullopt;
      std::vector<std::string> upos;
      for (const auto& tok : sent.tokens) upos.push_back(tok.upos);
      const ArcContext ctx(sent.forms(), upos);

      model.arcs.tick();
      const auto pred = cle_decode(arc_scores(model.arcs, ctx, tb));
      for (int d = 1; d <= ctx.size(); ++d) {
        const int gold = sent.tokens[d - 1].head;
        if (pred[d - 1] == gold) continue;
        model.arcs.update(ctx.features(gold, d), tb, 0, 1.0);
        model.arcs.update(ctx.features(pred[d - 1], d), tb, 0, -1.0);
      }

      for (int d = 1; d <= ctx.size(); ++d) {
        model.labels.tick();
        const auto feats = ctx.features(sent.tokens[d - 1].head, d);
        const int guess = model.labels.predict(feats, tb);
        const int gold = *model.labels.label_index(sent.tokens[d - 1].deprel);
        if (guess != gold) {
          model.labels.update(feats, tb, gold, 1.0);
          model.labels.update(feats, tb, guess, -1.0);
        }
      }
    }
  }
  model.arcs.finalize();
  model.labels.finalize();
  return model;
}

// Parses one sentence given forms and UPOS. Always returns a single-root tree.
inline Sentence parse(const ParserModel& model, const std::vector<std::string>& forms,
                      const std::vector<std::string>& upos,
                      const std::optional<std::string>& proxy = std::nullopt) {
  if (model.arcs.mode() != ModelMode::Arcs || model.labels.mode() != ModelMode::Labeler)
    throw Error("parse: model files have the wrong modes");
  const auto tb = model.arcs.resolve_treebank(proxy);
  const auto tb_labels = model.labels.resolve_treebank(proxy);
  const ArcContext ctx(forms, upos);
  Sentence out;
  if (forms.empty()) return out;
  const auto heads = cle_decode(arc_scores(model.arcs, ctx, tb));
  for (int d = 1; d <= ctx.size(); ++d) {
    Token t;
    t.id = d;
    t.form = forms[d - 1];
    t.upos = upos[d - 1];
    t.head = heads[d - 1];
    t.deprel = model.labels.labels()[model.labels.predict(ctx.features(t.head, d), tb_labels)];
    out.tokens.push_back(std::move(t));
  }
  return out;
}

}  // namespace treecast

#endif  // TREECAST_PARSER_HPP_
