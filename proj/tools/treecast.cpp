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

// treecast: command-line front-end for the projection pipeline.
//
//   treecast align     --bitext corpus.txt > corpus.align
//   treecast project   --source da=da.conllu:da.align --target fo.txt --out proj/
//   treecast vote      --source da=proj/da.conllu --source sv=proj/sv.conllu
//   treecast intersect --source ... --out inter/
//   treecast train     --source multi=voted.conllu --out model/
//   treecast predict   --model model/ --target test.txt
//   treecast jackknife --input train.conllu --folds 10
//   treecast eval      --gold gold.conllu --pred pred.conllu
//   treecast stats     --source da=proj/da.conllu:proj/da.rejections.tsv
//
// Data goes to stdout or --out; diagnostics go to stderr. Every failure
// exits nonzero with a single "error: ..." line.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "treecast/treecast.hpp"

namespace fs = std::filesystem;
using namespace treecast;

namespace {

struct SourceSpec {
  std::string name;
  std::string first;
  std::string second;  // empty when absent
};

// Parses NAME=PATH or NAME=PATH:PATH.
SourceSpec parse_source(const std::string& spec, bool want_second, bool second_required) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0)
    throw Error("--source '" + spec + "': expected NAME=PATH" + (want_second ? "[:PATH]" : ""));
  SourceSpec out;
  out.name = spec.substr(0, eq);
  std::string rest = spec.substr(eq + 1);
  if (want_second) {
    const auto colon = rest.find(':');
    if (colon != std::string::npos) {
      out.second = rest.substr(colon + 1);
      rest = rest.substr(0, colon);
    }
    if (second_required && out.second.empty())
      throw Error("--source '" + spec + "': expected NAME=CONLLU:ALIGN");
  }
  out.first = rest;
  if (out.first.empty()) throw Error("--source '" + spec + "': empty path");
  for (const auto* p : {&out.first, &out.second})
    if (!p->empty() && !fs::exists(*p)) throw Error("no such file: '" + *p + "'");
  return out;
}

std::vector<SourceSpec> parse_sources(const std::vector<std::string>& specs, bool want_second,
                                      bool second_required) {
  std::vector<SourceSpec> out;
  std::set<std::string> names;
  for (const auto& s : specs) {
    out.push_back(parse_source(s, want_second, second_required));
    if (!names.insert(out.back().name).second)
      throw Error("source name '" + out.back().name + "' given twice");
  }
  return out;
}

std::vector<NamedTreebank> load_treebanks(const std::vector<SourceSpec>& specs) {
  std::vector<NamedTreebank> out;
  for (const auto& s : specs) {
    out.emplace_back(s.name, read_conllu_file(s.first, s.name));
    spdlog::info("loaded {} ({} sentences) from {}", s.name, out.back().second.size(), s.first);
  }
  return out;
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
    std::cout.flush();
  } else {
    util::write_file(out_path, content);
  }
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory '" + dir + "': " + ec.message());
}

std::vector<std::vector<std::string>> read_target_text(const std::string& path, bool lowercase = false) {
  std::vector<std::vector<std::string>> out;
  for (const auto& line : util::read_lines(path))
    out.push_back(util::split_whitespace(lowercase ? util::ascii_lower(line) : line));
  return out;
}

void setup_logging() {
  auto logger = spdlog::stderr_logger_mt("treecast");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("TREECAST_LOG")) {
    const std::string level = env;
    if (level == "debug") spdlog::set_level(spdlog::level::debug);
    else if (level == "info") spdlog::set_level(spdlog::level::info);
  }
}

// --- subcommands -----------------------------------------------------------

struct AlignArgs {
  std::string bitext, out;
  int iterations = 5;
  double lambda = 4.0, p0 = 0.08;
  bool lowercase = false, swap = false;
};

void run_align(const AlignArgs& a) {
  const auto bitext = parse_bitext(util::read_lines(a.bitext), a.lowercase);
  const auto table = em_train(bitext, {a.iterations, a.lambda, a.p0});
  for (std::size_t k = 0; k < table.log_likelihoods.size(); ++k)
    spdlog::info("iteration {}: log-likelihood {:.6f}", k + 1, table.log_likelihoods[k]);
  std::string out;
  for (const auto& sp : bitext) {
    out += to_pharaoh(viterbi_align(table, sp.source, sp.target), a.swap);
    out += '\n';
  }
  emit(a.out, out);
}

struct ProjectArgs {
  std::vector<std::string> sources;
  std::string target, out;
  bool swap = false, no_cycle_filter = false;
};

void run_project(const ProjectArgs& a) {
  const auto specs = parse_sources(a.sources, true, true);
  const auto targets = read_target_text(a.target);
  ensure_dir(a.out);
  ProjectionOptions opts;
  opts.reject_cycles = !a.no_cycle_filter;
  for (const auto& s : specs) {
    const Treebank src = read_conllu_file(s.first, s.name);
    const auto lines = util::read_lines(s.second);
    if (lines.size() != src.size() || targets.size() != src.size())
      throw Error("source '" + s.name + "': " + std::to_string(src.size()) + " trees, " +
                  std::to_string(lines.size()) + " alignment lines, " +
                  std::to_string(targets.size()) + " target sentences");
    std::vector<AlignmentSet> aligns;
    aligns.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
      try {
        aligns.push_back(parse_pharaoh(lines[i], static_cast<int>(src.sentences[i].size()),
                                       static_cast<int>(targets[i].size()), a.swap));
      } catch (const Error& e) {
        throw Error(s.second + " line " + std::to_string(i + 1) + ": " + e.what());
      }
    }
    const auto projected = project_treebank(src, targets, aligns, opts);
    const fs::path dir(a.out);
    util::write_file((dir / (s.name + ".conllu")).string(), serialize_conllu(projected.treebank));
    util::write_file((dir / (s.name + ".rejections.tsv")).string(),
                     serialize_rejections(projected.rejections));
    spdlog::info("{}: {} accepted, {} rejected, {} fallback tokens", s.name,
                 projected.treebank.size(), projected.rejections.size(), projected.fallback_tokens);
  }
}

struct VoteArgs {
  std::vector<std::string> sources;
  int min_sources = 0;
  std::string out;
};

int resolve_min_sources(int requested, std::size_t k) {
  return requested > 0 ? requested : static_cast<int>(k);
}

void run_vote(const VoteArgs& a) {
  const auto tbs = load_treebanks(parse_sources(a.sources, false, false));
  const auto merged = multi_source_merge(tbs, resolve_min_sources(a.min_sources, tbs.size()));
  spdlog::info("voted {} sentences", merged.size());
  emit(a.out, serialize_conllu(merged));
}

void run_intersect(const VoteArgs& a) {
  const auto tbs = load_treebanks(parse_sources(a.sources, false, false));
  const int min_sources = resolve_min_sources(a.min_sources, tbs.size());
  const auto keep = shared_indices(tbs, min_sources);
  ensure_dir(a.out);
  const fs::path dir(a.out);
  for (const auto& [name, tb] : tbs) {
    const auto restricted = restrict_to(tb, keep);
    util::write_file((dir / (name + ".conllu")).string(), serialize_conllu(restricted));
  }
  util::write_file((dir / "multi.conllu").string(), serialize_conllu(multi_source_merge(tbs, min_sources)));
  spdlog::info("{} sentences in the multi-source set", keep.size());
}

struct TrainArgs {
  std::vector<std::string> sources;
  int epochs = 20;
  std::uint64_t seed = 1;
  bool multi = false;
  std::string out;
};

void run_train(const TrainArgs& a) {
  const auto tbs = load_treebanks(parse_sources(a.sources, false, false));
  TrainOptions opts;
  opts.epochs = a.epochs;
  opts.seed = a.seed;
  opts.force_multi = a.multi;
  ensure_dir(a.out);
  const fs::path dir(a.out);
  const auto tagger = train_tagger(tbs, opts);
  util::write_file((dir / "tagger.model").string(), tagger.serialize());
  const auto parser = train_parser(tbs, opts);
  util::write_file((dir / "arcs.model").string(), parser.arcs.serialize());
  util::write_file((dir / "labels.model").string(), parser.labels.serialize());
  spdlog::info("trained on {} treebank(s); models in {}", tbs.size(), a.out);
}

struct PredictArgs {
  std::string model, input, target, proxy, out;
  bool keep_pos = false;
};

void run_predict(const PredictArgs& a) {
  if (a.input.empty() == a.target.empty()) throw Error("predict: give exactly one of --input or --target");
  const fs::path dir(a.model);
  const ParserModel parser{read_model_file((dir / "arcs.model").string()),
                           read_model_file((dir / "labels.model").string())};
  std::optional<LinearModel> tagger;
  if (!a.keep_pos) tagger = read_model_file((dir / "tagger.model").string());
  const std::optional<std::string> proxy = a.proxy.empty() ? std::nullopt : std::optional(a.proxy);

  Treebank input;
  if (!a.input.empty()) {
    input = read_conllu_file(a.input);
  } else {
    if (a.keep_pos) throw Error("predict: --keep-pos needs CoNLL-U --input");
    for (const auto& forms : read_target_text(a.target)) {
      if (forms.empty()) throw Error("predict: empty line in target text");
      Sentence s;
      for (std::size_t i = 0; i < forms.size(); ++i) {
        Token t;
        t.id = static_cast<int>(i + 1);
        t.form = forms[i];
        s.tokens.push_back(std::move(t));
      }
      input.sentences.push_back(std::move(s));
    }
  }

  Treebank out;
  for (const auto& s : input.sentences) {
    const auto forms = s.forms();
    std::vector<std::string> upos;
    if (tagger) {
      upos = tag(*tagger, forms, proxy);
    } else {
      for (const auto& t : s.tokens) upos.push_back(t.upos);
    }
    Sentence parsed = parse(parser, forms, upos, proxy);
    parsed.comments = s.comments;
    parsed.mwt_lines = s.mwt_lines;
    out.sentences.push_back(std::move(parsed));
  }
  emit(a.out, serialize_conllu(out));
}

struct JackknifeArgs {
  std::string input, out;
  int folds = 10, epochs = 20;
  std::uint64_t seed = 1;
};

void run_jackknife(const JackknifeArgs& a) {
  const auto tb = read_conllu_file(a.input, fs::path(a.input).stem().string());
  TrainOptions opts;
  opts.epochs = a.epochs;
  opts.seed = a.seed;
  emit(a.out, serialize_conllu(jackknife_tags(tb, a.folds, opts)));
}

struct EvalArgs {
  std::string gold, pred;
};

void run_eval(const EvalArgs& a) {
  const auto report = evaluate(read_conllu_file(a.gold), read_conllu_file(a.pred));
  std::cout << format_report(report);
}

struct StatsArgs {
  std::vector<std::string> sources;
  bool agreement = false;
};

void run_stats(const StatsArgs& a) {
  const auto specs = parse_sources(a.sources, true, false);
  const std::vector<RejectReason> reasons = {
      RejectReason::MultipleRoots,  RejectReason::SelfHead, RejectReason::HeadOutOfRange,
      RejectReason::ZeroRoots,      RejectReason::Cycle,    RejectReason::LengthUnprojectable};
  std::string out = "source\tvalid\ttokens\tmean_length\trejected";
  for (auto r : reasons) out += "\t" + std::string(to_string(r));
  out += '\n';
  std::vector<NamedTreebank> tbs;
  char buf[32];
  for (const auto& s : specs) {
    Treebank tb = read_conllu_file(s.first, s.name);
    RejectionLog log;
    if (!s.second.empty()) log = parse_rejections(util::read_file(s.second));
    const auto st = treebank_stats(tb, log);
    std::snprintf(buf, sizeof buf, "%.2f", st.mean_length);
    out += s.name + "\t" + std::to_string(st.valid_sentences) + "\t" + std::to_string(st.tokens) +
           "\t" + buf + "\t" + std::to_string(st.rejected);
    for (auto r : reasons) {
      auto it = st.rejections.find(r);
      out += "\t" + std::to_string(it == st.rejections.end() ? 0 : it->second);
    }
    out += '\n';
    tbs.emplace_back(s.name, std::move(tb));
  }
  if (a.agreement) {
    const auto m = agreement_matrix(tbs);
    out += "\nagreement";
    for (const auto& [name, tb] : tbs) out += "\t" + name;
    out += '\n';
    for (std::size_t i = 0; i < tbs.size(); ++i) {
      out += tbs[i].first;
      for (std::size_t j = 0; j < tbs.size(); ++j) {
        if (m[i][j]) {
          std::snprintf(buf, sizeof buf, "%.2f", *m[i][j]);
          out += std::string("\t") + buf;
        } else {
          out += "\t-";
        }
      }
      out += '\n';
    }
  }
  std::cout << out;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"treecast: cross-lingual dependency annotation projection toolkit"};
  app.require_subcommand(1);

  const std::string source_help =
      "Source as NAME=PATH (repeatable). The order of --source flags is the priority order "
      "used to break label and POS voting ties.";

  AlignArgs align_args;
  auto* align = app.add_subcommand("align", "Train a lexical aligner and write Pharaoh alignments");
  align->add_option("--bitext", align_args.bitext, "Parallel text, one 'source ||| target' pair per line")
      ->required()
      ->check(CLI::ExistingFile);
  align->add_option("--iterations", align_args.iterations, "EM iterations")->capture_default_str();
  align->add_option("--lambda", align_args.lambda, "Diagonal tension; 0 gives IBM Model 1")
      ->capture_default_str();
  align->add_option("--p0", align_args.p0, "Null alignment probability")->capture_default_str();
  align->add_flag("--lowercase", align_args.lowercase, "Lowercase tokens before training");
  align->add_flag("--swap", align_args.swap, "Write pairs as target-source");
  align->add_option("--seed", "Accepted for uniformity; alignment is deterministic");
  align->add_option("--out", align_args.out, "Output file (default stdout)");

  ProjectArgs project_args;
  auto* project = app.add_subcommand("project", "Project source trees onto target sentences");
  project->add_option("--source", project_args.sources, "NAME=CONLLU:ALIGN (repeatable)")->required();
  project->add_option("--target", project_args.target, "Target text, one tokenized sentence per line")
      ->required()
      ->check(CLI::ExistingFile);
  project->add_flag("--swap", project_args.swap, "Alignment files list target index first");
  project->add_flag("--no-cycle-filter", project_args.no_cycle_filter, "Keep trees whose only fault is a cycle");
  project->add_option("--out", project_args.out, "Output directory")->required();

  VoteArgs vote_args;
  auto* vote = app.add_subcommand("vote", "Combine projected treebanks by arc voting");
  vote->add_option("--source", vote_args.sources, source_help)->required();
  vote->add_option("--min-sources", vote_args.min_sources,
                   "Sentences must be present in this many sources (default: all)");
  vote->add_option("--out", vote_args.out, "Output file (default stdout)");

  VoteArgs intersect_args;
  auto* intersect = app.add_subcommand(
      "intersect", "Restrict every source to the multi-source sentence set and vote");
  intersect->add_option("--source", intersect_args.sources, source_help)->required();
  intersect->add_option("--min-sources", intersect_args.min_sources, "Default: all sources");
  intersect->add_option("--out", intersect_args.out, "Output directory")->required();

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train tagger and parser on one or more treebanks");
  train->add_option("--source", train_args.sources,
                    "NAME=CONLLU (repeatable); NAME becomes the treebank id")
      ->required();
  train->add_option("--epochs", train_args.epochs, "Training epochs")->capture_default_str();
  train->add_option("--seed", train_args.seed, "Shuffling seed")->capture_default_str();
  train->add_flag("--multi", train_args.multi, "Treebank-id features even with a single treebank");
  train->add_option("--out", train_args.out, "Model directory")->required();

  PredictArgs predict_args;
  auto* predict = app.add_subcommand("predict", "Tag and parse with trained models");
  predict->add_option("--model", predict_args.model, "Model directory")->required()->check(CLI::ExistingDirectory);
  predict->add_option("--input", predict_args.input, "CoNLL-U input")->check(CLI::ExistingFile);
  predict->add_option("--target", predict_args.target, "Plain text input, one sentence per line")
      ->check(CLI::ExistingFile);
  predict->add_option("--proxy", predict_args.proxy, "Treebank id to use for multi-treebank models");
  predict->add_flag("--keep-pos", predict_args.keep_pos, "Use the UPOS column of --input instead of tagging");
  predict->add_option("--seed", "Accepted for uniformity; prediction is deterministic");
  predict->add_option("--out", predict_args.out, "Output file (default stdout)");

  JackknifeArgs jk_args;
  auto* jackknife = app.add_subcommand("jackknife", "Replace UPOS by k-fold jackknife predictions");
  jackknife->add_option("--input", jk_args.input, "CoNLL-U treebank")->required()->check(CLI::ExistingFile);
  jackknife->add_option("--folds", jk_args.folds, "Number of folds")->capture_default_str();
  jackknife->add_option("--epochs", jk_args.epochs, "Training epochs")->capture_default_str();
  jackknife->add_option("--seed", jk_args.seed, "Shuffling seed")->capture_default_str();
  jackknife->add_option("--out", jk_args.out, "Output file (default stdout)");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "LAS/UAS of a prediction against gold");
  eval->add_option("--gold", eval_args.gold, "Gold CoNLL-U")->required()->check(CLI::ExistingFile);
  eval->add_option("--pred", eval_args.pred, "Predicted CoNLL-U")->required()->check(CLI::ExistingFile);

  StatsArgs stats_args;
  auto* stats = app.add_subcommand("stats", "Sentence counts and rejection breakdown per source");
  stats->add_option("--source", stats_args.sources, "NAME=CONLLU[:REJECTIONS] (repeatable)")->required();
  stats->add_flag("--agreement", stats_args.agreement, "Also print pairwise head agreement");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*align) run_align(align_args);
    else if (*project) run_project(project_args);
    else if (*vote) run_vote(vote_args);
    else if (*intersect) run_intersect(intersect_args);
    else if (*train) run_train(train_args);
    else if (*predict) run_predict(predict_args);
    else if (*jackknife) run_jackknife(jk_args);
    else if (*eval) run_eval(eval_args);
    else if (*stats) run_stats(stats_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
