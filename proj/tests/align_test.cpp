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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "support.hpp"
#include "treecast/align.hpp"

namespace tc = treecast;
namespace ts = testing_support;

namespace {

tc::Bitext two_sentence_corpus() {
  return tc::parse_bitext({"a b ||| x y", "a ||| x"});
}

tc::Bitext random_corpus(std::mt19937_64& rng) {
  tc::Bitext b;
  const int pairs = 2 + static_cast<int>(rng() % 5);
  for (int p = 0; p < pairs; ++p) {
    tc::SentencePair sp;
    const int l = 1 + static_cast<int>(rng() % 5);
    const int m = 1 + static_cast<int>(rng() % 5);
    for (int i = 0; i < l; ++i) sp.source.push_back("s" + std::to_string(rng() % 6));
    for (int j = 0; j < m; ++j) sp.target.push_back("t" + std::to_string(rng() % 6));
    b.push_back(sp);
  }
  return b;
}

TEST(Pharaoh, Parses) {
  const auto a = tc::parse_pharaoh("0-0 1-1", 2, 2);
  EXPECT_EQ(a.pairs, (std::set<std::pair<int, int>>{{0, 0}, {1, 1}}));
  EXPECT_TRUE(tc::parse_pharaoh("", 2, 2).empty());
  EXPECT_TRUE(tc::parse_pharaoh("   ", 2, 2).empty());
}

TEST(Pharaoh, DuplicatesCollapse) {
  EXPECT_EQ(tc::parse_pharaoh("0-1 0-1 1-0", 2, 2).size(), 2u);
}

TEST(Pharaoh, ErrorsOnRangeAndSyntax) {
  EXPECT_THROW(tc::parse_pharaoh("0-5", 2, 3), tc::Error);
  EXPECT_THROW(tc::parse_pharaoh("2-0", 2, 3), tc::Error);
  EXPECT_THROW(tc::parse_pharaoh("0:1", 2, 3), tc::Error);
  EXPECT_THROW(tc::parse_pharaoh("0-", 2, 3), tc::Error);
  EXPECT_THROW(tc::parse_pharaoh("-1-0", 2, 3), tc::Error);
}

TEST(Pharaoh, SwapReversesInterpretation) {
  const auto a = tc::parse_pharaoh("1-0 2-1", 2, 3, /*swap=*/true);
  EXPECT_EQ(a.pairs, (std::set<std::pair<int, int>>{{0, 1}, {1, 2}}));
  EXPECT_EQ(tc::to_pharaoh(a), "0-1 1-2");
  EXPECT_EQ(tc::to_pharaoh(a, true), "1-0 2-1");
}

TEST(Bitext, ParsesAndLowercases) {
  const auto b = tc::parse_bitext({"The Cat ||| Kettan"}, true);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0].source, (std::vector<std::string>{"the", "cat"}));
  EXPECT_EQ(b[0].target, (std::vector<std::string>{"kettan"}));
  EXPECT_THROW(tc::parse_bitext({"no separator"}), tc::Error);
}

TEST(Em, RejectsBadInput) {
  EXPECT_THROW(tc::em_train({}, {}), tc::Error);
  EXPECT_THROW(tc::em_train(tc::parse_bitext({"a ||| "}), {}), tc::Error);
  EXPECT_THROW(tc::em_train(tc::parse_bitext({" ||| x"}), {}), tc::Error);
  EXPECT_THROW(tc::em_train(two_sentence_corpus(), {.iterations = 0}), tc::Error);
  EXPECT_THROW(tc::em_train(two_sentence_corpus(), {.iterations = 1, .lambda = -1}), tc::Error);
  EXPECT_THROW(tc::em_train(two_sentence_corpus(), {.iterations = 1, .lambda = 0, .p0 = 1.0}),
               tc::Error);
}

TEST(Em, TwoSentenceCorpusDisambiguates) {
  const auto table = tc::em_train(two_sentence_corpus(), {.iterations = 20, .lambda = 0.0});
  EXPECT_GT(table.prob("a", "x"), 0.9);
  EXPECT_GT(table.prob("b", "y"), 0.9);
}

TEST(Em, SinglePairOneIteration) {
  const auto table = tc::em_train(tc::parse_bitext({"a ||| x"}), {.iterations = 1});
  EXPECT_DOUBLE_EQ(table.prob("a", "x"), 1.0);
}

TEST(Em, RowsNormalizedAfterEveryIteration) {
  std::mt19937_64 rng(3);
  for (int c = 0; c < 10; ++c) {
    const auto corpus = random_corpus(rng);
    for (int it = 1; it <= 6; ++it) {
      const auto table = tc::em_train(corpus, {.iterations = it});
      for (int e = 0; e < static_cast<int>(table.source_vocab().size()); ++e) {
        double sum = 0;
        for (const auto& [f, p] : table.row(e)) {
          EXPECT_GE(p, 0.0);
          EXPECT_LE(p, 1.0);
          sum += p;
        }
        EXPECT_NEAR(sum, 1.0, 1e-6) << "row " << e << " after " << it << " iterations";
      }
    }
  }
}

TEST(Em, LogLikelihoodNonDecreasing) {
  std::mt19937_64 rng(5);
  for (int c = 0; c < 10; ++c) {
    const auto corpus = random_corpus(rng);
    for (double lambda : {0.0, 4.0}) {
      const auto table = tc::em_train(corpus, {.iterations = 15, .lambda = lambda});
      ASSERT_EQ(table.log_likelihoods.size(), 15u);
      for (std::size_t k = 1; k < table.log_likelihoods.size(); ++k)
        EXPECT_GE(table.log_likelihoods[k], table.log_likelihoods[k - 1] - 1e-9);
    }
  }
}

// The k-th recorded likelihood is that of the parameters after k iterations;
// recompute it by summing over the corpus with an independent prior.
TEST(Em, RecordedLikelihoodMatchesDirectSummation) {
  std::mt19937_64 rng(9);
  for (int c = 0; c < 5; ++c) {
    const auto corpus = random_corpus(rng);
    const auto full = tc::em_train(corpus, {.iterations = 8});
    for (int k = 1; k < 8; ++k) {
      const auto partial = tc::em_train(corpus, {.iterations = k});
      EXPECT_NEAR(ts::direct_log_likelihood(partial, corpus), full.log_likelihoods[k], 1e-9);
    }
  }
}

TEST(Em, LambdaZeroMatchesDenseReference) {
  std::mt19937_64 rng(13);
  std::vector<tc::Bitext> corpora{two_sentence_corpus()};
  for (int c = 0; c < 8; ++c) corpora.push_back(random_corpus(rng));
  for (const auto& corpus : corpora) {
    const auto table = tc::em_train(corpus, {.iterations = 10, .lambda = 0.0, .p0 = 0.08});
    const auto ref = ts::model1_reference(corpus, 10, 0.08);
    for (const auto& [e, row] : ref.t) {
      for (const auto& [f, p] : row) {
        const double got = e.empty() ? ts::null_prob(table, f) : table.prob(e, f);
        EXPECT_NEAR(got, p, 1e-9) << e << " -> " << f;
      }
    }
    for (std::size_t k = 0; k < ref.log_likelihoods.size(); ++k)
      EXPECT_NEAR(table.log_likelihoods[k], ref.log_likelihoods[k], 1e-9);
  }
}

TEST(Em, DiagonalPriorSumsToOneMinusP0) {
  for (int l = 1; l < 7; ++l) {
    for (int m = 1; m < 7; ++m) {
      for (int j = 0; j < m; ++j) {
        const auto p = tc::diagonal_prior(j, l, m, 4.0, 0.08);
        double sum = 0;
        for (int i = 0; i < l; ++i) {
          EXPECT_NEAR(p[i], ts::reference_prior(i, j, l, m, 4.0, 0.08), 1e-15);
          sum += p[i];
        }
        EXPECT_NEAR(sum, 0.92, 1e-12);
      }
    }
  }
}

TEST(Viterbi, IdenticalSingleTokens) {
  const auto table = tc::em_train(tc::parse_bitext({"a ||| a"}), {.iterations = 3});
  const auto a = tc::viterbi_align(table, {"a"}, {"a"});
  EXPECT_EQ(a.pairs, (std::set<std::pair<int, int>>{{0, 0}}));
}

TEST(Viterbi, TwoSentenceCorpusAlignsDiagonal) {
  for (double lambda : {0.0, 4.0}) {
    const auto table = tc::em_train(two_sentence_corpus(), {.iterations = 20, .lambda = lambda});
    const auto a = tc::viterbi_align(table, {"a", "b"}, {"x", "y"});
    EXPECT_EQ(a.pairs, (std::set<std::pair<int, int>>{{0, 0}, {1, 1}}));
    const auto [score, best] = ts::brute_force_viterbi(table, {"a", "b"}, {"x", "y"});
    EXPECT_EQ(best, (std::vector<int>{0, 1}));
  }
}

TEST(Viterbi, AllOovTargetIsUnaligned) {
  const auto table = tc::em_train(two_sentence_corpus(), {.iterations = 5});
  EXPECT_TRUE(tc::viterbi_align(table, {"a", "b"}, {"p", "q", "r"}).empty());
}

TEST(Viterbi, EmptySidesGiveEmptySets) {
  const auto table = tc::em_train(two_sentence_corpus(), {.iterations = 1});
  EXPECT_TRUE(tc::viterbi_align(table, {}, {"x"}).empty());
  EXPECT_TRUE(tc::viterbi_align(table, {"a"}, {}).empty());
}

// Decoded alignment equals the best of all (l+1)^m alignment functions.
TEST(Viterbi, MatchesExhaustiveEnumeration) {
  std::mt19937_64 rng(17);
  for (int c = 0; c < 30; ++c) {
    const auto corpus = random_corpus(rng);
    const auto table = tc::em_train(corpus, {.iterations = 4, .lambda = (c % 2) ? 4.0 : 0.0});
    for (auto sp : corpus) {
      if (c % 3 == 0) sp.target.push_back("unseen");
      const auto got = tc::viterbi_align(table, sp.source, sp.target);
      const auto [best, best_a] = ts::brute_force_viterbi(table, sp.source, sp.target);
      std::vector<int> got_a(sp.target.size(), -1);
      std::set<int> targets;
      for (const auto& [i, j] : got.pairs) {
        EXPECT_TRUE(targets.insert(j).second) << "target " << j << " aligned twice";
        got_a[j] = i;
      }
      double got_score = 1;
      for (std::size_t j = 0; j < got_a.size(); ++j)
        got_score *= ts::link_score(table, sp.source, sp.target, got_a[j], static_cast<int>(j));
      EXPECT_NEAR(got_score, best, 1e-12 * best);
      EXPECT_EQ(got_a, best_a);
    }
  }
}

}  // namespace
