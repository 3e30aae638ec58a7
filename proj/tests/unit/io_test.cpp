#include "motiondex/io.hpp"

#include <sstream>

#include <gtest/gtest.h>

#include "motiondex/error.hpp"
#include "motiondex/random.hpp"
#include "motiondex/synth.hpp"
#include "temp_dir.hpp"

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

Codebook trained_codebook(std::uint64_t seed) {
  const auto poses = gen_synth_poses({.n_classes = 2, .per_class = 2, .num_frames = 48, .num_joints = 4, .seed = seed});
  const FeaturizerConfig cfg{8, 4, true};
  std::vector<PatchFeature> patches;
  for (const auto& p : poses) {
    auto f = featurize_sequence(p, cfg);
    patches.insert(patches.end(), f.begin(), f.end());
  }
  Codebook cb = init_codebook(patches, 8, 0.5, seed, FeatureMeta::for_joints(cfg, 4));
  const std::vector<PatchBatch> batches = {patches};
  train_epoch(batches, cb, {.seed = seed});
  return cb;
}

TEST(Tokens, RoundTrip) {
  const auto corpus = gen_synth_corpus({.n_classes = 3, .per_class = 4, .seed = 1});
  std::vector<TokenSequence> tokens = corpus;
  tokens.push_back({"no-label", std::nullopt, {0, 511}});
  std::stringstream first;
  io::write_tokens(first, tokens);
  std::stringstream in(first.str());
  const auto loaded = io::read_tokens(in);
  EXPECT_EQ(loaded, tokens);
  std::stringstream second;
  io::write_tokens(second, loaded);
  EXPECT_EQ(first.str(), second.str());
}

TEST(Tokens, ParseErrorsCarryLineNumber) {
  std::stringstream in("{\"id\":\"a\",\"label\":null,\"words\":[1,2]}\n\n{\"id\":\"b\",\"words\":[1,-2]}\n");
  try {
    io::read_tokens(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::parse_error);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  std::stringstream garbage("{\"id\":\"a\",\"words\":[1]}\nnot json\n");
  EXPECT_EQ(code_of([&] { io::read_tokens(garbage); }), Errc::parse_error);
}

TEST(Poses, RoundTrip) {
  const auto poses = gen_synth_poses({.n_classes = 2, .per_class = 2, .num_frames = 12, .num_joints = 3, .seed = 4});
  std::stringstream out;
  io::write_poses(out, poses);
  std::stringstream in(out.str());
  EXPECT_EQ(io::read_poses(in), poses);
}

TEST(Poses, RaggedFramesRejected) {
  std::stringstream in(
      "{\"id\":\"a\",\"label\":null,\"fps\":30,\"frames\":[[[0,0,0],[1,0,0]],[[0,0,0]]]}\n");
  try {
    io::read_poses(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::parse_error);
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
  }
}

TEST(CodebookFile, RoundTrip) {
  const Codebook cb = trained_codebook(3);
  const std::string text = io::codebook_to_json(cb);
  const Codebook loaded = io::codebook_from_json(text);
  EXPECT_TRUE(loaded.same_state(cb));
  EXPECT_EQ(io::codebook_to_json(loaded), text);
}

TEST(CodebookFile, RejectsInconsistentContent) {
  EXPECT_EQ(code_of([] { io::codebook_from_json("{"); }), Errc::parse_error);
  EXPECT_EQ(code_of([] { io::codebook_from_json("{\"version\":1}"); }), Errc::parse_error);
  std::string text = io::codebook_to_json(trained_codebook(5));
  const auto pos = text.find("\"version\":1");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 11, "\"version\":9");
  EXPECT_EQ(code_of([&] { io::codebook_from_json(text); }), Errc::parse_error);
}

TEST(IndexFile, RoundTrip) {
  auto corpus = gen_synth_corpus({.n_classes = 4, .per_class = 5, .template_len = 30, .vocab = 64, .seed = 2});
  corpus.push_back({"periodic", std::nullopt, {0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1}});
  const MotionIndex idx = build_index(corpus, 64);
  const std::string text = io::index_to_json(idx);
  const MotionIndex loaded = io::index_from_json(text);
  EXPECT_EQ(loaded, idx);
  EXPECT_EQ(io::index_to_json(loaded), text);
  EXPECT_TRUE(loaded.entry(loaded.size() - 1).periodic);
  EXPECT_EQ(loaded.find("periodic"), idx.size() - 1);
}

TEST(IndexFile, RejectsTamperedHistogram) {
  const std::vector<TokenSequence> seqs = {{"a", std::nullopt, {0, 0, 1}}};
  std::string text = io::index_to_json(build_index(seqs, 2));
  EXPECT_EQ(code_of([&] { io::index_from_json(text.substr(0, text.size() / 2)); }), Errc::parse_error);
  const auto pos = text.find("\"words\":[0,0,1]");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 15, "\"words\":[0,1,1]");
  EXPECT_EQ(code_of([&] { io::index_from_json(text); }), Errc::parse_error);
}

TEST(EngineConfigFile, DefaultsAndOverrides) {
  EXPECT_EQ(io::engine_config_from_json("{}").weights, ScoreWeights{});
  const EngineConfig cfg = io::engine_config_from_json(
      R"({"align":{"twed_nu":0.5,"lcss_delta":3},"shortlist_cap":50,"periodicity":{"theta":0.7}})");
  EXPECT_EQ(cfg.align.twed_nu, 0.5);
  EXPECT_EQ(cfg.align.lcss_delta, 3u);
  EXPECT_EQ(cfg.align.erp_beta, 0.5);
  EXPECT_EQ(cfg.shortlist_cap, 50u);
  EXPECT_EQ(cfg.periodicity.theta, 0.7);

  const std::string text = io::engine_config_to_json(cfg);
  const EngineConfig again = io::engine_config_from_json(text);
  EXPECT_EQ(again.align, cfg.align);
  EXPECT_EQ(again.weights, cfg.weights);
  EXPECT_EQ(again.shortlist_cap, cfg.shortlist_cap);
  EXPECT_EQ(io::engine_config_from_json(io::engine_config_to_json({})).align, AlignParams{});
}

TEST(EngineConfigFile, Weights) {
  const std::string skewed = R"({"weights":{"hist":2,"twed":1,"lcss":1,"edr":1,"erp":0,"ngram":0}})";
  EXPECT_EQ(code_of([&] { io::engine_config_from_json(skewed); }), Errc::invalid_input);
  const EngineConfig cfg = io::engine_config_from_json(skewed, true);
  EXPECT_DOUBLE_EQ(cfg.weights.hist, 0.4);
  EXPECT_EQ(code_of([] { io::engine_config_from_json(R"({"weights":{"hist":1}})"); }), Errc::parse_error);
  EXPECT_EQ(code_of([] { io::engine_config_from_json("[1,2]"); }), Errc::parse_error);
}

TEST(Files, MissingPathIsIoError) {
  EXPECT_EQ(code_of([] { io::read_file("/nonexistent/motiondex/file.json"); }), Errc::io_error);
  EXPECT_EQ(code_of([] { io::write_file("/nonexistent/motiondex/file.json", "x"); }), Errc::io_error);
  TempDir dir;
  io::write_file(dir.file("a.txt"), "hello\n");
  EXPECT_EQ(io::read_file(dir.file("a.txt")), "hello\n");
}

TEST(Reports, EvalOutputsAgree) {
  const auto corpus = gen_synth_corpus({.n_classes = 3, .per_class = 4, .template_len = 20, .vocab = 30, .seed = 8});
  const EvalReport r = evaluate(corpus, 30, {}, {});
  const std::string json = io::eval_report_to_json(r);
  EXPECT_NE(json.find("\"mean_score\""), std::string::npos);
  EXPECT_NE(json.find("\"rank_histogram\""), std::string::npos);
  const std::string csv = io::eval_queries_to_csv(r);
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), r.n_queries + 1);
  EXPECT_FALSE(io::eval_report_to_table(r).empty());
}

}  // namespace
}  // namespace motiondex
