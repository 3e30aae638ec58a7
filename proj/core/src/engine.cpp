#include "motiondex/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "motiondex/error.hpp"
#include "motiondex/parallel.hpp"

namespace motiondex {

ScoreWeights ScoreWeights::from_array(const std::array<double, 6>& w) {
  return {w[0], w[1], w[2], w[3], w[4], w[5]};
}

void ScoreWeights::validate() const {
  double sum = 0.0;
  for (double w : as_array()) {
    if (!std::isfinite(w) || w < 0.0) raise(Errc::invalid_input, "score weights must be finite and non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    raise(Errc::invalid_input, "score weights sum to " + std::to_string(sum) + ", expected 1");
  }
}

ScoreWeights ScoreWeights::normalized() const {
  auto w = as_array();
  double sum = 0.0;
  for (double x : w) {
    if (!std::isfinite(x) || x < 0.0) raise(Errc::invalid_input, "score weights must be finite and non-negative");
    sum += x;
  }
  if (!(sum > 0.0)) raise(Errc::invalid_input, "score weights sum to zero");
  for (double& x : w) x /= sum;
  return from_array(w);
}

void EngineConfig::validate() const {
  weights.validate();
  align.validate();
  periodicity.validate();
}

std::string_view to_string(Backend b) noexcept {
  return b == Backend::two_stage ? "two_stage" : "brute_force";
}

Backend backend_from_string(std::string_view name) {
  if (name == "two_stage" || name == "two-stage") return Backend::two_stage;
  if (name == "brute_force" || name == "brute-force") return Backend::brute_force;
  raise(Errc::invalid_input, "unknown backend '" + std::string(name) + "'");
}

ScoreBreakdown combine(const std::array<double, 6>& phi, const ScoreWeights& weights) {
  const auto w = weights.as_array();
  ScoreBreakdown out;
  out.similarity = phi;
  double total = 0.0;
  for (std::size_t m = 0; m < phi.size(); ++m) {
    out.weighted[m] = w[m] * phi[m];
    total += out.weighted[m];
  }
  out.combined = std::clamp(total, 0.0, 1.0);
  return out;
}

ScoreBreakdown score_candidate(WordSpan q, WordSpan s, double cosine, const ScoreWeights& weights,
                               const AlignParams& params) {
  const std::array<double, 6> phi = {
      cosine,
      twed(q, s, params).similarity,
      lcss(q, s, params).similarity,
      edr(q, s, params).similarity,
      erp(q, s, params).similarity,
      ngram_sim(q, s, params.ngram_n).similarity,
  };
  return combine(phi, weights);
}

ScoreBreakdown score_pair(WordSpan q, WordSpan s, const Histogram& q_hist, const Histogram& s_hist,
                          const ScoreWeights& weights, const AlignParams& params) {
  return score_candidate(q, s, cosine_sim(q_hist, s_hist), weights, params);
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

struct Candidate {
  std::size_t entry;
  double cosine;
  std::size_t shortlist_rank;
};

Histogram prepare(const TokenSequence& q, const MotionIndex& idx, const EngineConfig& cfg,
                  std::size_t k) {
  cfg.validate();
  if (k == 0) raise(Errc::invalid_input, "k must be at least 1");
  if (q.words.empty()) raise(Errc::empty_sequence, "query '" + q.id + "' has no words");
  for (Word w : q.words) {
    if (w >= idx.vocab()) {
      raise(Errc::config_mismatch, "query '" + q.id + "' contains word " + std::to_string(w) +
                                       " outside the index vocabulary of size " +
                                       std::to_string(idx.vocab()));
    }
  }
  return build_histogram(q.words, idx.vocab());
}

std::vector<std::size_t> excluded_entries(const TokenSequence& q, const MotionIndex& idx,
                                          const EngineConfig& cfg) {
  std::vector<std::size_t> out;
  if (cfg.exclude_self) {
    if (auto pos = idx.find(q.id)) out.push_back(*pos);
  }
  return out;
}

void rerank(const TokenSequence& q, const MotionIndex& idx, const EngineConfig& cfg,
            std::span<const Candidate> candidates, std::size_t k, RetrievalResult& result) {
  std::vector<RankedCandidate> scored(candidates.size());
  parallel_for(candidates.size(), cfg.threads, [&](std::size_t i) {
    const Candidate& c = candidates[i];
    const IndexEntry& e = idx.entry(c.entry);
    RankedCandidate& out = scored[i];
    out.candidate_id = e.id;
    out.entry = c.entry;
    out.shortlist_rank = c.shortlist_rank;
    out.breakdown = score_candidate(q.words, e.tokens.words, c.cosine, cfg.weights, cfg.align);
    out.score = out.breakdown.combined;
  });

  const auto better = [](const RankedCandidate& a, const RankedCandidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.candidate_id < b.candidate_id;
  };
  const std::size_t keep = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(), better);
  scored.resize(keep);
  if (cfg.dtw_diagnostics) {
    for (auto& c : scored) c.dtw_distance = dtw(q.words, idx.entry(c.entry).tokens.words);
  }
  result.candidates_scored = candidates.size();
  result.ranked = std::move(scored);
}

}  // namespace

RetrievalResult query(const TokenSequence& q, const MotionIndex& idx, const EngineConfig& cfg,
                      std::size_t k) {
  const Histogram q_hist = prepare(q, idx, cfg, k);
  RetrievalResult result;
  result.query_id = q.id;
  result.backend = Backend::two_stage;

  const auto stage1_start = Clock::now();
  const auto excluded = excluded_entries(q, idx, cfg);
  const auto shortlisted = shortlist(q_hist, idx, cfg.shortlist_cap, excluded);
  std::vector<Candidate> candidates;
  candidates.reserve(shortlisted.size());
  for (std::size_t r = 0; r < shortlisted.size(); ++r) {
    candidates.push_back({shortlisted[r].entry, shortlisted[r].score, r + 1});
  }
  result.timing.stage1_ms = elapsed_ms(stage1_start);

  const auto stage2_start = Clock::now();
  rerank(q, idx, cfg, candidates, k, result);
  result.timing.stage2_ms = elapsed_ms(stage2_start);
  return result;
}

RetrievalResult query_brute_force(const TokenSequence& q, const MotionIndex& idx,
                                  const EngineConfig& cfg, std::size_t k) {
  const Histogram q_hist = prepare(q, idx, cfg, k);
  RetrievalResult result;
  result.query_id = q.id;
  result.backend = Backend::brute_force;

  const auto excluded = excluded_entries(q, idx, cfg);
  std::vector<Candidate> candidates;
  candidates.reserve(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (std::find(excluded.begin(), excluded.end(), i) != excluded.end()) continue;
    candidates.push_back({i, cosine_sim(q_hist, idx.entry(i).hist), 0});
  }

  const auto start = Clock::now();
  rerank(q, idx, cfg, candidates, k, result);
  result.timing.stage2_ms = elapsed_ms(start);
  return result;
}

RetrievalResult run_query(const TokenSequence& q, const MotionIndex& idx, const EngineConfig& cfg,
                          std::size_t k, Backend backend) {
  return backend == Backend::two_stage ? query(q, idx, cfg, k) : query_brute_force(q, idx, cfg, k);
}

}  // namespace motiondex
