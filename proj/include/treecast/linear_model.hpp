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

// Sparse averaged-perceptron weights shared by the tagger and the parser.
//
// In multi-treebank mode every feature also fires conjoined with the active
// treebank id. Plain and conjoined contributions are summed separately and
// then added, so a model trained on one treebank in multi mode scores exactly
// twice what the single-mode model scores.

#ifndef TREECAST_LINEAR_MODEL_HPP_
#define TREECAST_LINEAR_MODEL_HPP_

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "treecast/common.hpp"

namespace treecast {

enum class ModelMode { Tagger, Arcs, Labeler };

inline constexpr std::string_view to_string(ModelMode m) {
  switch (m) {
    case ModelMode::Tagger: return "tagger";
    case ModelMode::Arcs: return "arcs";
    case ModelMode::Labeler: return "labeler";
  }
  return "?";
}

inline constexpr std::string_view kModelMagic = "treecast-model v1";

class LinearModel {
 public:
  LinearModel() = default;
  LinearModel(ModelMode mode, std::vector<std::string> labels,
              std::vector<std::string> treebank_ids)
      : mode_(mode), labels_(std::move(labels)), treebank_ids_(std::move(treebank_ids)) {
    if (labels_.empty()) throw Error("model needs at least one label");
    for (std::size_t i = 0; i < labels_.size(); ++i) label_index_.emplace(labels_[i], static_cast<int>(i));
  }

  ModelMode mode() const { return mode_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::string>& treebank_ids() const { return treebank_ids_; }
  bool multi() const { return !treebank_ids_.empty(); }
  bool finalized() const { return finalized_; }
  std::int64_t updates() const { return clock_; }
  std::size_t num_features() const { return params_.size(); }

  std::optional<int> label_index(const std::string& label) const {
    auto it = label_index_.find(label);
    if (it == label_index_.end()) return std::nullopt;
    return it->second;
  }

  // Resolves the treebank whose conjoined features fire. Single-treebank
  // models ignore the argument.
  std::optional<std::string> resolve_treebank(const std::optional<std::string>& id) const {
    if (!multi()) return std::nullopt;
    if (!id) throw Error("multi-treebank model requires a proxy treebank id");
    if (std::find(treebank_ids_.begin(), treebank_ids_.end(), *id) == treebank_ids_.end())
      throw Error("unknown proxy treebank '" + *id + "'");
    return id;
  }

  // Per-label scores for a feature list.
  void score(std::span<const std::string> features, const std::optional<std::string>& treebank,
             std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    add_scores(features, {}, out);
    if (treebank) {
      std::vector<double> conj(out.size(), 0.0);
      add_scores(features, conj_prefix(*treebank), conj);
      for (std::size_t k = 0; k < out.size(); ++k) out[k] += conj[k];
    }
  }

  double score_one(std::span<const std::string> features, const std::optional<std::string>& treebank,
                   int label = 0) const {
    double plain = 0.0, conj = 0.0;
    for (const auto& f : features) plain += weight(f, label);
    if (treebank) {
      const std::string prefix = conj_prefix(*treebank);
      for (const auto& f : features) conj += weight(prefix + f, label);
    }
    return plain + conj;
  }

  // Highest-scoring label, ties to the lowest label index.
  int predict(std::span<const std::string> features, const std::optional<std::string>& treebank) const {
    std::vector<double> scores(labels_.size());
    score(features, treebank, scores);
    return static_cast<int>(std::max_element(scores.begin(), scores.end()) - scores.begin());
  }

  // Advances the averaging clock; call once per training instance.
  void tick() {
    check_trainable();
    ++clock_;
  }

  void update(std::span<const std::string> features, const std::optional<std::string>& treebank,
              int label, double delta) {
    check_trainable();
    for (const auto& f : features) bump(f, label, delta);
    if (treebank) {
      const std::string prefix = conj_prefix(*treebank);
      for (const auto& f : features) bump(prefix + f, label, delta);
    }
  }

  // Replaces the weights by their average over all ticks. Training is
  // rejected afterwards.
  void finalize() {
    if (finalized_) return;
    for (auto& [key, row] : params_) {
      for (auto& p : row) {
        // The weight set at `stamp` was in force after instances stamp..clock_ inclusive.
        p.total += static_cast<double>(clock_ - p.stamp + 1) * p.weight;
        p.stamp = clock_;
        if (clock_ > 0) p.weight = p.total / static_cast<double>(clock_);
      }
    }
    finalized_ = true;
  }

  std::string serialize() const {
    if (!finalized_) throw Error("serialize: model must be finalized first");
    std::string out(kModelMagic);
    out += ' ';
    out += to_string(mode_);
    out += "\nlabels";
    for (const auto& l : labels_) out += '\t' + l;
    out += "\ntreebanks";
    for (const auto& t : treebank_ids_) out += '\t' + t;
    out += '\n';
    std::vector<std::string> lines;
    char buf[64];
    for (const auto& [key, row] : params_) {
      for (std::size_t k = 0; k < row.size(); ++k) {
        if (row[k].weight == 0.0) continue;
        std::snprintf(buf, sizeof buf, "%.17g", row[k].weight);
        lines.push_back(std::to_string(k) + ':' + key + '\t' + buf);
      }
    }
    std::sort(lines.begin(), lines.end());
    for (const auto& l : lines) {
      out += l;
      out += '\n';
    }
    return out;
  }

  static LinearModel deserialize(std::string_view text) {
    const auto lines = util::split(text, '\n');
    if (lines.size() < 3) throw Error("model file truncated");
    const std::string header(lines[0]);
    const std::string prefix = std::string(kModelMagic) + ' ';
    if (header.rfind(prefix, 0) != 0) throw Error("not a treecast model (bad header)");
    const std::string mode_name = header.substr(prefix.size());
    ModelMode mode;
    if (mode_name == "tagger") mode = ModelMode::Tagger;
    else if (mode_name == "arcs") mode = ModelMode::Arcs;
    else if (mode_name == "labeler") mode = ModelMode::Labeler;
    else throw Error("unknown model mode '" + mode_name + "'");

    const auto read_list = [](std::string_view line, std::string_view key) {
      auto cols = util::split(line, '\t');
      if (cols.empty() || cols[0] != key) throw Error("model file: expected '" + std::string(key) + "' line");
      std::vector<std::string> out;
      for (std::size_t i = 1; i < cols.size(); ++i) out.emplace_back(cols[i]);
      return out;
    };
    LinearModel m(mode, read_list(lines[1], "labels"), read_list(lines[2], "treebanks"));
    for (std::size_t i = 3; i < lines.size(); ++i) {
      const auto line = lines[i];
      if (line.empty()) continue;
      const auto tab = line.rfind('\t');
      const auto colon = line.find(':');
      if (tab == std::string_view::npos || colon == std::string_view::npos || colon > tab)
        throw Error("model file line " + std::to_string(i + 1) + ": malformed");
      const auto label = util::parse_int<int>(line.substr(0, colon));
      double w = 0.0;
      const auto wtext = line.substr(tab + 1);
      const auto [ptr, ec] = std::from_chars(wtext.data(), wtext.data() + wtext.size(), w);
      if (!label || *label < 0 || *label >= static_cast<int>(m.labels_.size()) ||
          ec != std::errc{} || ptr != wtext.data() + wtext.size())
        throw Error("model file line " + std::to_string(i + 1) + ": malformed");
      m.row(std::string(line.substr(colon + 1, tab - colon - 1)))[*label].weight = w;
    }
    m.finalized_ = true;
    return m;
  }

 private:
  struct Param {
    double weight = 0.0;
    double total = 0.0;
    std::int64_t stamp = 0;
  };

  static std::string conj_prefix(const std::string& treebank) { return "tb=" + treebank + "|"; }

  void check_trainable() const {
    if (finalized_) throw Error("model is finalized; further training rejected");
  }

  std::vector<Param>& row(const std::string& key) {
    auto it = params_.find(key);
    if (it == params_.end()) it = params_.emplace(key, std::vector<Param>(labels_.size())).first;
    return it->second;
  }

  double weight(const std::string& key, int label) const {
    auto it = params_.find(key);
    return it == params_.end() ? 0.0 : it->second[label].weight;
  }

  void add_scores(std::span<const std::string> features, const std::string& prefix,
                  std::span<double> out) const {
    for (const auto& f : features) {
      auto it = params_.find(prefix.empty() ? f : prefix + f);
      if (it == params_.end()) continue;
      for (std::size_t k = 0; k < out.size(); ++k) out[k] += it->second[k].weight;
    }
  }

  void bump(const std::string& key, int label, double delta) {
    auto& p = row(key)[label];
    p.total += static_cast<double>(clock_ - p.stamp) * p.weight;
    p.stamp = clock_;
    p.weight += delta;
  }

  ModelMode mode_ = ModelMode::Tagger;
  std::vector<std::string> labels_;
  std::vector<std::string> treebank_ids_;
  std::unordered_map<std::string, int> label_index_;
  std::unordered_map<std::string, std::vector<Param>> params_;
  std::int64_t clock_ = 0;
  bool finalized_ = false;
};

inline LinearModel read_model_file(const std::string& path) {
  try {
    return LinearModel::deserialize(util::read_file(path));
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

}  // namespace treecast

#endif  // TREECAST_LINEAR_MODEL_HPP_
