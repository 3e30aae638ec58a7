#include "motiondex/eval.hpp"

#include <algorithm>

#include <gtest/gtest.h>

#include "motiondex/error.hpp"
#include "motiondex/random.hpp"
#include "motiondex/synth.hpp"

namespace motiondex {
namespace {

template <typename F>
Errc code_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no motiondex::Error thrown";
  return Errc::io_error;
}

TokenSequence seq(std::string id, std::string label, std::vector<Word> words) {
  return {std::move(id), std::move(label), std::move(words)};
}

void expect_consistent(const EvalReport& r) {
  EXPECT_EQ(r.mean_score, r.mean_score_from_histogram());
  const auto& h = r.rank_histogram;
  EXPECT_EQ(h[0] + h[1] + h[2] + h[3], r.n_queries);
  if (r.top_n == 3) {
    EXPECT_EQ(r.match_rate_pct, 100.0 * static_cast<double>(h[0] + h[1] + h[2]) / static_cast<double>(r.n_queries));
  }
}

TEST(RankScore, Weights) {
  EXPECT_EQ(rank_score(1), 1.0);
  EXPECT_EQ(rank_score(2), 0.5);
  EXPECT_EQ(rank_score(3), 0.25);
  EXPECT_EQ(rank_score(4), 0.0);
  EXPECT_EQ(rank_score(7), 0.0);
  EXPECT_EQ(rank_score(std::nullopt), 0.0);
  EXPECT_EQ(code_of([] { rank_score(0); }), Errc::invalid_input);
}

TEST(Evaluate, IdenticalPairsScorePerfectly) {
  const std::vector<TokenSequence> corpus = {seq("a1", "A", {1, 2, 3}), seq("a2", "A", {1, 2, 3}),
                                             seq("b1", "B", {7, 8, 9}), seq("b2", "B", {7, 8, 9})};
  for (Backend b : {Backend::two_stage, Backend::brute_force}) {
    const EvalReport r = evaluate(corpus, 16, {}, {.backend = b});
    EXPECT_EQ(r.n_queries, 4u);
    EXPECT_EQ(r.mean_score, 1.0);
    EXPECT_EQ(r.match_rate_pct, 100.0);
    EXPECT_EQ(r.rank_histogram[0], 4u);
    expect_consistent(r);
  }
}

TEST(Evaluate, FloorCase) {
  // Every query has three exact copies in other classes ahead of its own class.
  std::vector<TokenSequence> corpus;
  for (const char* cls : {"A", "B", "C", "D"}) {
    corpus.push_back(seq(std::string(1, static_cast<char>(cls[0] + 32)) + "1", cls, {0, 0, 0, 0}));
    corpus.push_back(seq(std::string(1, static_cast<char>(cls[0] + 32)) + "2", cls, {5, 5, 5, 5}));
  }
  const EvalReport r = evaluate(corpus, 8, {}, {});
  EXPECT_EQ(r.n_queries, 8u);
  EXPECT_EQ(r.mean_score, 0.0);
  EXPECT_EQ(r.match_rate_pct, 0.0);
  EXPECT_EQ(r.rank_histogram[3], 8u);
  expect_consistent(r);
}

TEST(Evaluate, SingleQueryAtRankTwo) {
  const std::vector<TokenSequence> corpus = {
      seq("a1", "A", {1, 2, 3, 9}), seq("a2", "A", {20, 21, 22, 23}), seq("a3", "A", {1, 2, 3, 4}),
      seq("b1", "B", {1, 2, 3, 4}), seq("b2", "B", {30, 31, 32, 33})};
  const EvalReport r = evaluate(corpus, 64, {}, {.leave_k_out = 2});
  ASSERT_EQ(r.n_queries, 1u);
  EXPECT_EQ(r.queries[0].query_id, "a3");
  EXPECT_EQ(r.queries[0].top_id, "b1");
  EXPECT_EQ(r.queries[0].best_rank, 2u);
  EXPECT_EQ(r.mean_score, 0.5);
  EXPECT_EQ(r.match_rate_pct, 100.0);
  EXPECT_FALSE(r.warnings.empty());  // class B has no queries left
  expect_consistent(r);
}

TEST(Evaluate, SmallClassesSkippedWithWarning) {
  const std::vector<TokenSequence> corpus = {seq("a1", "A", {1, 2}), seq("a2", "A", {1, 2}), seq("lonely", "Z", {3})};
  const EvalReport r = evaluate(corpus, 8, {}, {});
  EXPECT_EQ(r.n_queries, 2u);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("Z"), std::string::npos);
  EXPECT_EQ(r.per_class.count("Z"), 0u);
}

TEST(Evaluate, Errors) {
  const std::vector<TokenSequence> singles = {seq("a", "A", {1}), seq("b", "B", {2})};
  EXPECT_EQ(code_of([&] { evaluate(singles, 8, {}, {}); }), Errc::empty_protocol);
  const std::vector<TokenSequence> unlabeled = {{"a", std::nullopt, {1}}};
  EXPECT_EQ(code_of([&] { evaluate(unlabeled, 8, {}, {}); }), Errc::invalid_input);
  const std::vector<TokenSequence> ok = {seq("a1", "A", {1}), seq("a2", "A", {1})};
  EXPECT_EQ(code_of([&] { evaluate(ok, 8, {}, {.top_n = 0}); }), Errc::invalid_input);
  EXPECT_EQ(code_of([&] { evaluate(ok, 8, {}, {.leave_k_out = 5}); }), Errc::empty_protocol);
}

TEST(Evaluate, SelfConsistentOnSyntheticCorpora) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto corpus = gen_synth_corpus({.n_classes = 5, .per_class = 6, .template_len = 20, .vocab = 60,
                                          .substitution_rate = 0.4, .overlap = 1.0, .seed = seed});
    for (Backend b : {Backend::two_stage, Backend::brute_force}) {
      const EvalReport r = evaluate(corpus, 60, {}, {.backend = b});
      expect_consistent(r);
      for (const auto& [label, stats] : r.per_class) EXPECT_EQ(stats.n_queries, 6u) << label;
    }
  }
}

TEST(Evaluate, BackendsAgreeWhenShortlistCoversAll) {
  const auto corpus = gen_synth_corpus({.n_classes = 4, .per_class = 5, .template_len = 15, .vocab = 40,
                                        .substitution_rate = 0.5, .overlap = 1.0, .seed = 9});
  const EvalReport a = evaluate(corpus, 40, {}, {.backend = Backend::two_stage});
  const EvalReport b = evaluate(corpus, 40, {}, {.backend = Backend::brute_force});
  EXPECT_EQ(a.mean_score, b.mean_score);
  EXPECT_EQ(a.match_rate_pct, b.match_rate_pct);
  EXPECT_EQ(a.rank_histogram, b.rank_histogram);
}

TEST(Evaluate, BruteForceDominatesCappedShortlist) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto corpus = gen_synth_corpus({.n_classes = 6, .per_class = 8, .template_len = 20, .vocab = 60,
                                          .substitution_rate = 0.3, .overlap = 1.0, .seed = seed});
    EngineConfig cfg;
    cfg.shortlist_cap = 4;
    const EvalReport two = evaluate(corpus, 60, cfg, {.backend = Backend::two_stage});
    const EvalReport brute = evaluate(corpus, 60, cfg, {.backend = Backend::brute_force});
    EXPECT_GE(brute.match_rate_pct, two.match_rate_pct) << "seed " << seed;
    EXPECT_GE(brute.mean_score + 1e-12, two.mean_score) << "seed " << seed;
  }
}

TEST(Evaluate, InputOrderDoesNotMatter) {
  auto corpus = gen_synth_corpus({.n_classes = 4, .per_class = 5, .template_len = 15, .vocab = 40, .seed = 2});
  const EvalReport a = evaluate(corpus, 40, {}, {});
  Rng rng(1);
  for (std::size_t i = corpus.size(); i > 1; --i) std::swap(corpus[i - 1], corpus[rng.uniform_index(i)]);
  const EvalReport b = evaluate(corpus, 40, {}, {});
  EXPECT_EQ(a.mean_score, b.mean_score);
  ASSERT_EQ(a.queries.size(), b.queries.size());
  for (std::size_t i = 0; i < a.queries.size(); ++i) {
    EXPECT_EQ(a.queries[i].query_id, b.queries[i].query_id);
    EXPECT_EQ(a.queries[i].best_rank, b.queries[i].best_rank);
    EXPECT_EQ(a.queries[i].top_id, b.queries[i].top_id);
  }
}

TEST(Evaluate, DeterministicAcrossThreadCounts) {
  const auto corpus = gen_synth_corpus({.n_classes = 5, .per_class = 6, .template_len = 20, .vocab = 50, .seed = 3});
  EngineConfig one, many;
  one.threads = 1;
  many.threads = 3;
  const EvalReport a = evaluate(corpus, 50, one, {});
  const EvalReport b = evaluate(corpus, 50, many, {});
  EXPECT_EQ(a.mean_score, b.mean_score);
  for (std::size_t i = 0; i < a.queries.size(); ++i) EXPECT_EQ(a.queries[i].top_id, b.queries[i].top_id);
}

TEST(SynthCorpus, NoNoiseMembersEqualTemplate) {
  const auto corpus = gen_synth_corpus({.n_classes = 3, .per_class = 4, .template_len = 12, .vocab = 30,
                                        .substitution_rate = 0, .insertion_rate = 0, .deletion_rate = 0});
  ASSERT_EQ(corpus.size(), 12u);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    EXPECT_EQ(corpus[i].words.size(), 12u);
    EXPECT_EQ(corpus[i].words, corpus[i - i % 4].words);
  }
  EXPECT_EQ(corpus[0].id, "c0_m0");
  EXPECT_EQ(corpus[0].label, "class_0");
  const EvalReport r = evaluate(corpus, 30, {}, {});
  EXPECT_EQ(r.mean_score, 1.0);
}

TEST(SynthCorpus, DeterministicForSeed) {
  const SynthCorpusConfig cfg{.seed = 17};
  EXPECT_EQ(gen_synth_corpus(cfg), gen_synth_corpus(cfg));
  SynthCorpusConfig other = cfg;
  other.seed = 18;
  EXPECT_NE(gen_synth_corpus(cfg), gen_synth_corpus(other));
}

TEST(SynthCorpus, WordsStayInClassAlphabet) {
  const SynthCorpusConfig cfg{.n_classes = 10, .per_class = 5, .seed = 4};
  const auto corpus = gen_synth_corpus(cfg);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const ClassAlphabet a = class_alphabet(cfg, i / 5);
    for (Word w : corpus[i].words) {
      EXPECT_LT(w, cfg.vocab);
      EXPECT_LT((w + cfg.vocab - a.first) % cfg.vocab, a.size);
    }
  }
}

TEST(SynthCorpus, WithinClassMoreSimilarThanAcross) {
  const auto corpus = gen_synth_corpus({.n_classes = 10, .per_class = 10, .seed = 5});
  double within = 0, across = 0;
  std::size_t nw = 0, na = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    for (std::size_t j = i + 1; j < corpus.size(); ++j) {
      const double s = lcss(corpus[i].words, corpus[j].words).similarity;
      if (corpus[i].label == corpus[j].label) within += s, ++nw;
      else across += s, ++na;
    }
  }
  EXPECT_GT(within / static_cast<double>(nw), across / static_cast<double>(na));
}

TEST(SynthPoses, ShapeAndDeterminism) {
  const SynthPoseConfig cfg{.n_classes = 2, .per_class = 3, .num_frames = 40, .num_joints = 5, .seed = 3};
  const auto poses = gen_synth_poses(cfg);
  ASSERT_EQ(poses.size(), 6u);
  for (const auto& p : poses) {
    EXPECT_EQ(p.num_frames(), 40u);
    EXPECT_EQ(p.num_joints(), 5u);
    EXPECT_TRUE(p.label().has_value());
  }
  EXPECT_EQ(gen_synth_poses(cfg), gen_synth_poses(cfg));
}

TEST(GaussianPatches, ShapeAndDeterminism) {
  const GaussianPatchConfig cfg{.n_clusters = 8, .per_cluster = 3, .dim = 5, .seed = 1};
  const auto a = gen_gaussian_patches(cfg);
  ASSERT_EQ(a.size(), 24u);
  for (const auto& p : a) EXPECT_EQ(p.values.size(), 5u);
  const auto b = gen_gaussian_patches(cfg);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].values, b[i].values);
}

}  // namespace
}  // namespace motiondex
