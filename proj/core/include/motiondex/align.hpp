#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string_view>

#include "motiondex/codebook.hpp"

namespace motiondex {

// Alignment-metric parameters. Timestamps are 1-based patch indices, so the
// TWED stiffness term only acts on off-diagonal alignments.
struct AlignParams {
  double twed_nu = 0.1;
  double twed_lambda = 1.0;
  double lcss_epsilon = 0.0;
  std::size_t lcss_delta = std::numeric_limits<std::size_t>::max();  // max() means unbounded
  double edr_epsilon = 0.0;
  double erp_gap = 0.0;
  double erp_beta = 0.5;
  std::size_t ngram_n = 2;

  void validate() const;

  bool operator==(const AlignParams&) const = default;
};

enum class Metric { hist, twed, lcss, edr, erp, ngram, dtw };

std::string_view to_string(Metric m) noexcept;

struct MetricScore {
  Metric metric = Metric::hist;
  // Distance for twed/edr/erp/dtw, common-subsequence length for lcss, and
  // 1 - similarity for ngram.
  double raw_distance = 0.0;
  double similarity = 0.0;
  // ngram only: a sequence was shorter than n.
  bool degenerate = false;
};

using WordSpan = std::span<const Word>;

// Time warp edit distance with sentinel value 0 at timestamp 0 prepended to
// both sequences. Similarity exp(-D / (2 * mean_len)).
MetricScore twed(WordSpan q, WordSpan s, const AlignParams& params = {});

// Longest common subsequence under |a - b| <= epsilon and |i - j| <= delta.
// Similarity length / mean_len, clamped to [0, 1].
MetricScore lcss(WordSpan q, WordSpan s, const AlignParams& params = {});

// Edit distance on real sequences. Similarity 1 - EDR / max_len.
MetricScore edr(WordSpan q, WordSpan s, const AlignParams& params = {});

// Edit distance with real penalty on numeric word values. Similarity
// exp(-ERP / mean_len).
MetricScore erp(WordSpan q, WordSpan s, const AlignParams& params = {});

// Dynamic time warping with 0/1 mismatch cost. Diagnostic only; never part of
// the combined score.
double dtw(WordSpan q, WordSpan s);

// Cosine similarity of n-gram count vectors. Sequences shorter than n give
// similarity 0 with the degenerate flag set.
MetricScore ngram_sim(WordSpan q, WordSpan s, std::size_t n = 2);

}  // namespace motiondex
