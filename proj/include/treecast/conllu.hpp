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

// CoNLL-U reading and writing, plus the sentence/token model shared by the
// rest of the toolkit. Only syntactic words are modelled; multiword-token
// range lines are carried verbatim, empty nodes are rejected.

#ifndef TREECAST_CONLLU_HPP_
#define TREECAST_CONLLU_HPP_

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "treecast/common.hpp"

namespace treecast {

inline constexpr std::string_view kEmptyField = "_";

struct Token {
  int id = 0;
  std::string form;
  std::string lemma{kEmptyField};
  std::string upos{kEmptyField};
  std::string xpos{kEmptyField};
  std::string feats{kEmptyField};
  int head = 0;
  std::string deprel{kEmptyField};
  std::string deps{kEmptyField};
  std::string misc{kEmptyField};

  bool operator==(const Token&) const = default;
};

// A multiword-token range line such as "1-2\tdu\t_...". `first` is the id of
// the syntactic word it precedes.
struct MultiwordLine {
  std::string range;
  std::string raw;
  int first = 0;

  bool operator==(const MultiwordLine&) const = default;
};

struct Sentence {
  std::vector<Token> tokens;
  std::vector<std::string> comments;  // full lines, including the leading '#'
  std::vector<MultiwordLine> mwt_lines;

  bool operator==(const Sentence&) const = default;

  std::size_t size() const { return tokens.size(); }

  std::vector<int> heads() const {
    std::vector<int> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(t.head);
    return out;
  }

  std::vector<std::string> forms() const {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(t.form);
    return out;
  }

  // Value of a "# key = value" comment, if present.
  std::optional<std::string> meta(std::string_view key) const {
    for (const auto& c : comments) {
      if (auto v = parse_meta(c, key)) return v;
    }
    return std::nullopt;
  }

  void set_meta(std::string_view key, std::string_view value) {
    std::string line = "# " + std::string(key) + " = " + std::string(value);
    for (auto& c : comments) {
      if (parse_meta(c, key)) {
        c = std::move(line);
        return;
      }
    }
    comments.push_back(std::move(line));
  }

 private:
  static std::optional<std::string> parse_meta(std::string_view line, std::string_view key) {
    if (line.empty() || line.front() != '#') return std::nullopt;
    line.remove_prefix(1);
    while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    if (line.substr(0, key.size()) != key) return std::nullopt;
    line.remove_prefix(key.size());
    while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    if (line.empty() || line.front() != '=') return std::nullopt;
    line.remove_prefix(1);
    if (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    return std::string(line);
  }
};

struct Treebank {
  std::string name;
  std::vector<Sentence> sentences;

  bool operator==(const Treebank&) const = default;

  std::size_t size() const { return sentences.size(); }
};

// A treebank tagged with the identifier used for voting priority or as a
// treebank-id feature.
using NamedTreebank = std::pair<std::string, Treebank>;

// Universal part of a dependency relation: "nsubj:pass" -> "nsubj".
inline std::string_view universal_deprel(std::string_view deprel) {
  return deprel.substr(0, deprel.find(':'));
}

class ConlluError : public Error {
 public:
  ConlluError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

inline std::string field(std::string_view col, std::size_t line_no, const char* name) {
  if (col.empty()) throw ConlluError(line_no, std::string("empty ") + name + " field");
  return std::string(col);
}

}  // namespace detail

inline Treebank parse_conllu(std::string_view text, std::string name = {}) {
  Treebank tb;
  tb.name = std::move(name);
  Sentence current;
  bool open = false;
  bool seen_token = false;

  const auto close = [&](std::size_t line_no) {
    if (!open) return;
    if (current.tokens.empty())
      throw ConlluError(line_no, "sentence has no syntactic words");
    for (const auto& m : current.mwt_lines) {
      if (m.first > static_cast<int>(current.tokens.size()))
        throw ConlluError(line_no, "multiword range '" + m.range + "' past end of sentence");
    }
    tb.sentences.push_back(std::move(current));
    current = Sentence{};
    open = false;
    seen_token = false;
  };

  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const std::string_view line = lines[i];
    if (line.empty()) {
      close(line_no);
      continue;
    }
    open = true;
    if (line.front() == '#') {
      if (seen_token) throw ConlluError(line_no, "comment inside token block");
      current.comments.emplace_back(line);
      continue;
    }
    const auto cols = util::split(line, '\t');
    if (cols.size() != 10)
      throw ConlluError(line_no, "expected 10 tab-separated columns, found " +
                                     std::to_string(cols.size()));
    seen_token = true;
    const std::string_view id = cols[0];
    if (id.find('.') != std::string_view::npos)
      throw ConlluError(line_no, "empty nodes unsupported");
    if (const auto dash = id.find('-'); dash != std::string_view::npos) {
      const auto lo = util::parse_int<int>(id.substr(0, dash));
      const auto hi = util::parse_int<int>(id.substr(dash + 1));
      if (!lo || !hi || *lo < 1 || *hi < *lo)
        throw ConlluError(line_no, "malformed multiword range '" + std::string(id) + "'");
      if (*lo != static_cast<int>(current.tokens.size()) + 1)
        throw ConlluError(line_no, "multiword range '" + std::string(id) +
                                       "' does not start at the next word");
      current.mwt_lines.push_back({std::string(id), std::string(line), *lo});
      continue;
    }
    const auto parsed_id = util::parse_int<int>(id);
    if (!parsed_id) throw ConlluError(line_no, "non-integer id '" + std::string(id) + "'");
    if (*parsed_id != static_cast<int>(current.tokens.size()) + 1)
      throw ConlluError(line_no, "ids not consecutive: expected " +
                                     std::to_string(current.tokens.size() + 1) + ", found " +
                                     std::string(id));
    const auto head = util::parse_int<int>(cols[6]);
    if (!head || *head < 0)
      throw ConlluError(line_no, "non-integer head '" + std::string(cols[6]) + "'");

    Token tok;
    tok.id = *parsed_id;
    tok.form = detail::field(cols[1], line_no, "FORM");
    tok.lemma = detail::field(cols[2], line_no, "LEMMA");
    tok.upos = detail::field(cols[3], line_no, "UPOS");
    tok.xpos = detail::field(cols[4], line_no, "XPOS");
    tok.feats = detail::field(cols[5], line_no, "FEATS");
    tok.head = *head;
    tok.deprel = detail::field(cols[7], line_no, "DEPREL");
    tok.deps = detail::field(cols[8], line_no, "DEPS");
    tok.misc = detail::field(cols[9], line_no, "MISC");
    current.tokens.push_back(std::move(tok));
  }
  close(lines.size() + 1);
  return tb;
}

inline void append_token_line(std::string& out, const Token& t) {
  out += std::to_string(t.id);
  for (const std::string* f : {&t.form, &t.lemma, &t.upos, &t.xpos, &t.feats}) {
    out += '\t';
    out += *f;
  }
  out += '\t';
  out += std::to_string(t.head);
  for (const std::string* f : {&t.deprel, &t.deps, &t.misc}) {
    out += '\t';
    out += *f;
  }
  out += '\n';
}

inline std::string serialize_conllu(const Sentence& s) {
  std::string out;
  for (const auto& c : s.comments) {
    out += c;
    out += '\n';
  }
  std::size_t next_mwt = 0;
  for (const auto& t : s.tokens) {
    while (next_mwt < s.mwt_lines.size() && s.mwt_lines[next_mwt].first == t.id) {
      out += s.mwt_lines[next_mwt].raw;
      out += '\n';
      ++next_mwt;
    }
    append_token_line(out, t);
  }
  out += '\n';
  return out;
}

inline std::string serialize_conllu(const Treebank& tb) {
  std::string out;
  for (const auto& s : tb.sentences) out += serialize_conllu(s);
  return out;
}

inline Treebank read_conllu_file(const std::string& path, std::string name = {}) {
  try {
    return parse_conllu(util::read_file(path), std::move(name));
  } catch (const ConlluError& e) {
    throw Error(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Tree validity

enum class Violation { MultipleRoots, SelfHead, HeadOutOfRange, ZeroRoots, Cycle };

inline constexpr std::string_view to_string(Violation v) {
  switch (v) {
    case Violation::MultipleRoots: return "MultipleRoots";
    case Violation::SelfHead: return "SelfHead";
    case Violation::HeadOutOfRange: return "HeadOutOfRange";
    case Violation::ZeroRoots: return "ZeroRoots";
    case Violation::Cycle: return "Cycle";
  }
  return "?";
}

struct ViolationRecord {
  Violation kind;
  std::vector<int> tokens;  // 1-based ids involved

  bool operator==(const ViolationRecord&) const = default;
};

// Violations are listed in the fixed order of the Violation enum, so the first
// entry is the primary rejection reason.
struct ValidityReport {
  std::vector<ViolationRecord> violations;

  bool ok() const { return violations.empty(); }

  bool has(Violation v) const {
    return std::any_of(violations.begin(), violations.end(),
                       [v](const ViolationRecord& r) { return r.kind == v; });
  }

  std::optional<Violation> primary() const {
    if (violations.empty()) return std::nullopt;
    return violations.front().kind;
  }
};

// heads[k] is the head of token k+1; 0 is the artificial root.
inline ValidityReport check_heads(std::span<const int> heads) {
  const int n = static_cast<int>(heads.size());
  std::vector<int> roots, self, out_of_range;
  for (int id = 1; id <= n; ++id) {
    const int h = heads[id - 1];
    if (h == 0) roots.push_back(id);
    else if (h == id) self.push_back(id);
    else if (h < 0 || h > n) out_of_range.push_back(id);
  }

  // Walk head chains; a chain that returns to a node on the current walk
  // closes a cycle. Self-heads are reported separately, not as cycles.
  std::vector<int> state(n + 1, 0);  // 0 unvisited, 1 on stack, 2 done
  std::vector<char> on_cycle(n + 1, 0);
  for (int start = 1; start <= n; ++start) {
    if (state[start]) continue;
    std::vector<int> path;
    int v = start;
    while (true) {
      if (state[v] == 2) break;
      if (state[v] == 1) {
        for (auto it = std::find(path.begin(), path.end(), v); it != path.end(); ++it)
          on_cycle[*it] = 1;
        break;
      }
      state[v] = 1;
      path.push_back(v);
      const int h = heads[v - 1];
      if (h <= 0 || h > n || h == v) break;
      v = h;
    }
    for (int p : path) state[p] = 2;
  }
  std::vector<int> cycle;
  for (int id = 1; id <= n; ++id)
    if (on_cycle[id]) cycle.push_back(id);

  ValidityReport report;
  if (roots.size() > 1) report.violations.push_back({Violation::MultipleRoots, roots});
  if (!self.empty()) report.violations.push_back({Violation::SelfHead, self});
  if (!out_of_range.empty())
    report.violations.push_back({Violation::HeadOutOfRange, out_of_range});
  if (roots.empty() && n > 0) report.violations.push_back({Violation::ZeroRoots, {}});
  if (!cycle.empty()) report.violations.push_back({Violation::Cycle, cycle});
  return report;
}

inline ValidityReport is_valid_tree(const Sentence& s) {
  const auto heads = s.heads();
  return check_heads(heads);
}

}  // namespace treecast

#endif  // TREECAST_CONLLU_HPP_
