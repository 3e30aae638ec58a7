#include "motiondex/eval.hpp"

#include <algorithm>

#include "motiondex/error.hpp"
#include "motiondex/parallel.hpp"

namespace motiondex {

double rank_score(std::optional<std::size_t> best_rank) {
  if (!best_rank) return 0.0;
  switch (*best_rank) {
    case 0: raise(Errc::invalid_input, "ranks are 1-based");
    case 1: return 1.0;
    case 2: return 0.5;
    case 3: return 0.25;
    default: return 0.0;
  }
}

double EvalReport::rank1_pct() const {
  return n_queries ? 100.0 * static_cast<double>(rank_histogram[0]) / static_cast<double>(n_queries) : 0.0;
}

double EvalReport::mean_score_from_histogram() const {
  if (n_queries == 0) return 0.0;
  const double weighted = 1.0 * static_cast<double>(rank_histogram[0]) +
                          0.5 * static_cast<double>(rank_histogram[1]) +
                          0.25 * static_cast<double>(rank_histogram[2]);
  return weighted / static_cast<double>(n_queries);
}

EvalReport evaluate(std::span<const TokenSequence> corpus, std::size_t vocab,
                    const EngineConfig& cfg, const EvalProtocol& protocol) {
  if (protocol.top_n == 0) raise(Errc::invalid_input, "top_n must be at least 1");
  if (protocol.leave_k_out == 0) raise(Errc::invalid_input, "leave_k_out must be at least 1");
  cfg.validate();

  EvalReport report;
  report.backend = protocol.backend;
  report.top_n = protocol.top_n;

  std::map<std::string, std::vector<const TokenSequence*>> classes;
  for (const auto& seq : corpus) {
    if (!seq.label) raise(Errc::invalid_input, "sequence '" + seq.id + "' has no label");
    classes[*seq.label].push_back(&seq);
  }

  std::vector<TokenSequence> database;
  std::vector<const TokenSequence*> queries;
  for (auto& [label, members] : classes) {
    if (members.size() < 2) {
      report.warnings.push_back("class '" + label + "' has fewer than 2 members; skipped");
      continue;
    }
    std::sort(members.begin(), members.end(),
              [](const TokenSequence* a, const TokenSequence* b) { return a->id < b->id; });
    if (protocol.leave_k_out == 1) {
      for (const auto* m : members) {
        database.push_back(*m);
        queries.push_back(m);
      }
      continue;
    }
    const std::size_t refs = std::min(protocol.leave_k_out, members.size());
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (i < refs) {
        database.push_back(*members[i]);
      } else {
        queries.push_back(members[i]);
      }
    }
    if (refs == members.size()) {
      report.warnings.push_back("class '" + label + "' has no members left to query");
    }
  }
  if (queries.empty()) raise(Errc::empty_protocol, "evaluation protocol leaves no usable queries");

  std::sort(queries.begin(), queries.end(),
            [](const TokenSequence* a, const TokenSequence* b) { return a->id < b->id; });
  const MotionIndex idx = build_index(database, vocab, cfg.periodicity);

  EngineConfig query_cfg = cfg;
  query_cfg.exclude_self = true;
  query_cfg.threads = 1;

  report.queries.resize(queries.size());
  parallel_for(queries.size(), cfg.threads, [&](std::size_t i) {
    const TokenSequence& q = *queries[i];
    const RetrievalResult result = run_query(q, idx, query_cfg, protocol.top_n, protocol.backend);
    QueryOutcome& out = report.queries[i];
    out.query_id = q.id;
    out.label = *q.label;
    if (!result.ranked.empty()) out.top_id = result.ranked.front().candidate_id;
    for (std::size_t r = 0; r < result.ranked.size(); ++r) {
      if (idx.entry(result.ranked[r].entry).label == q.label) {
        out.best_rank = r + 1;
        break;
      }
    }
    out.score = rank_score(out.best_rank);
  });

  report.n_queries = report.queries.size();
  double score_sum = 0.0;
  std::size_t matched = 0;
  std::map<std::string, std::pair<double, std::size_t>> class_sums;
  for (const auto& q : report.queries) {
    const std::size_t bucket = q.best_rank && *q.best_rank <= 3 ? *q.best_rank - 1 : 3;
    ++report.rank_histogram[bucket];
    score_sum += q.score;
    const bool hit = q.best_rank.has_value();
    matched += hit ? 1 : 0;
    auto& stats = report.per_class[q.label];
    ++stats.n_queries;
    auto& sums = class_sums[q.label];
    sums.first += q.score;
    sums.second += hit ? 1 : 0;
  }
  const double n = static_cast<double>(report.n_queries);
  report.mean_score = score_sum / n;
  report.match_rate_pct = 100.0 * static_cast<double>(matched) / n;
  for (auto& [label, stats] : report.per_class) {
    const auto& sums = class_sums[label];
    const double nc = static_cast<double>(stats.n_queries);
    stats.mean_score = sums.first / nc;
    stats.match_rate_pct = 100.0 * static_cast<double>(sums.second) / nc;
  }
  return report;
}

}  // namespace motiondex
