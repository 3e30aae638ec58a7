#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "motiondex/engine.hpp"

namespace motiondex {

// 1.0, 0.5 and 0.25 for ranks 1-3; 0 beyond or when nothing matched.
// Rank 0 is invalid.
double rank_score(std::optional<std::size_t> best_rank);

struct EvalProtocol {
  // 1: leave-one-out, every sequence queries all others.
  // K > 1: the first K members of each class (by id) form the reference
  // database and the remaining members are the queries.
  std::size_t leave_k_out = 1;
  std::size_t top_n = 3;
  Backend backend = Backend::two_stage;
};

struct QueryOutcome {
  std::string query_id;
  std::string label;
  std::optional<std::size_t> best_rank;  // of any same-label candidate within top_n
  double score = 0.0;
  std::string top_id;  // rank-1 candidate, empty if none
};

struct ClassStats {
  std::size_t n_queries = 0;
  double mean_score = 0.0;
  double match_rate_pct = 0.0;
};

struct EvalReport {
  Backend backend = Backend::two_stage;
  std::size_t n_queries = 0;
  std::size_t top_n = 3;
  double mean_score = 0.0;
  double match_rate_pct = 0.0;
  // Best same-label rank bucket: 1, 2, 3, then ">3 or none".
  std::array<std::size_t, 4> rank_histogram{};
  std::map<std::string, ClassStats> per_class;
  std::vector<QueryOutcome> queries;  // sorted by query id
  std::vector<std::string> warnings;

  double rank1_pct() const;
  double mean_score_from_histogram() const;
};

// Runs the protocol over a labelled corpus. Classes with fewer than two
// members are dropped with a warning. Self matches are always excluded.
EvalReport evaluate(std::span<const TokenSequence> corpus, std::size_t vocab,
                    const EngineConfig& cfg, const EvalProtocol& protocol);

}  // namespace motiondex
