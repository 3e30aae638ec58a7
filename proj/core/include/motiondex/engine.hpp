#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "motiondex/align.hpp"
#include "motiondex/index.hpp"

namespace motiondex {

// Metrics entering the combined score, in reporting order.
inline constexpr std::array<Metric, 6> kScoredMetrics = {
    Metric::hist, Metric::twed, Metric::lcss, Metric::edr, Metric::erp, Metric::ngram};

// Convex weights over kScoredMetrics.
struct ScoreWeights {
  double hist = 0.30;
  double twed = 0.15;
  double lcss = 0.15;
  double edr = 0.15;
  double erp = 0.10;
  double ngram = 0.15;

  std::array<double, 6> as_array() const { return {hist, twed, lcss, edr, erp, ngram}; }
  static ScoreWeights from_array(const std::array<double, 6>& w);

  // Throws invalid_input unless every weight is >= 0 and they sum to 1
  // within 1e-9.
  void validate() const;
  // Rescales to unit sum; throws if the sum is not positive.
  ScoreWeights normalized() const;

  bool operator==(const ScoreWeights&) const = default;
};

struct EngineConfig {
  ScoreWeights weights;
  AlignParams align;
  PeriodicityConfig periodicity;
  std::optional<std::size_t> shortlist_cap;
  bool exclude_self = false;
  // Attach the raw DTW distance to each returned candidate. DTW never enters
  // the combined score.
  bool dtw_diagnostics = false;
  std::size_t threads = 0;  // 0 = default_thread_count()

  void validate() const;
};

enum class Backend { two_stage, brute_force };

std::string_view to_string(Backend b) noexcept;
Backend backend_from_string(std::string_view name);

struct ScoreBreakdown {
  std::array<double, 6> similarity{};  // phi_m
  std::array<double, 6> weighted{};    // w_m * phi_m
  double combined = 0.0;
};

// S = sum_m w_m * phi_m, clamped to [0, 1].
ScoreBreakdown combine(const std::array<double, 6>& phi, const ScoreWeights& weights);

ScoreBreakdown score_pair(WordSpan q, WordSpan s, const Histogram& q_hist, const Histogram& s_hist,
                          const ScoreWeights& weights, const AlignParams& params);

// Same as score_pair with the cosine term already known (Stage 1 cache).
ScoreBreakdown score_candidate(WordSpan q, WordSpan s, double cosine, const ScoreWeights& weights,
                               const AlignParams& params);

struct RankedCandidate {
  std::string candidate_id;
  std::size_t entry = 0;
  double score = 0.0;
  ScoreBreakdown breakdown;
  std::size_t shortlist_rank = 0;  // 1-based Stage-1 position; 0 for brute force
  std::optional<double> dtw_distance;
};

struct StageTiming {
  double stage1_ms = 0.0;
  double stage2_ms = 0.0;
};

struct RetrievalResult {
  std::string query_id;
  Backend backend = Backend::two_stage;
  std::size_t candidates_scored = 0;
  std::vector<RankedCandidate> ranked;  // S descending, then id ascending
  StageTiming timing;
};

// Stage 1 shortlists L = shortlist_size(N) entries by cosine; Stage 2 scores
// them with the combined similarity and keeps the top k.
RetrievalResult query(const TokenSequence& q, const MotionIndex& idx, const EngineConfig& cfg,
                      std::size_t k);

// Scores every entry; the accuracy ceiling for query().
RetrievalResult query_brute_force(const TokenSequence& q, const MotionIndex& idx,
                                  const EngineConfig& cfg, std::size_t k);

RetrievalResult run_query(const TokenSequence& q, const MotionIndex& idx, const EngineConfig& cfg,
                          std::size_t k, Backend backend);

}  // namespace motiondex
