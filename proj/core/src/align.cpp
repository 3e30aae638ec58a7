#include "motiondex/align.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "motiondex/error.hpp"

namespace motiondex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_non_empty(WordSpan q, WordSpan s, std::string_view metric) {
  if (q.empty() || s.empty()) {
    raise(Errc::empty_sequence, std::string(metric) + " needs two non-empty sequences");
  }
}

double mean_len(WordSpan q, WordSpan s) {
  return 0.5 * static_cast<double>(q.size() + s.size());
}

double value(Word w) { return static_cast<double>(w); }

double mismatch(Word a, Word b) { return a == b ? 0.0 : 1.0; }

// All metrics here are symmetric, so the longer sequence drives the outer
// loop and the rolling rows are sized by the shorter one.
void orient(WordSpan& q, WordSpan& s) {
  if (q.size() < s.size()) std::swap(q, s);
}

}  // namespace

void AlignParams::validate() const {
  if (!(twed_nu >= 0.0) || !(twed_lambda >= 0.0)) {
    raise(Errc::invalid_input, "TWED nu and lambda must be non-negative");
  }
  if (!(lcss_epsilon >= 0.0) || !(edr_epsilon >= 0.0)) {
    raise(Errc::invalid_input, "LCSS/EDR epsilon must be non-negative");
  }
  if (!(erp_beta > 0.0)) raise(Errc::invalid_input, "ERP beta must be positive");
  if (!std::isfinite(erp_gap)) raise(Errc::invalid_input, "ERP gap must be finite");
  if (ngram_n < 2) raise(Errc::invalid_input, "n-gram order must be at least 2");
}

std::string_view to_string(Metric m) noexcept {
  switch (m) {
    case Metric::hist: return "hist";
    case Metric::twed: return "twed";
    case Metric::lcss: return "lcss";
    case Metric::edr: return "edr";
    case Metric::erp: return "erp";
    case Metric::ngram: return "ngram";
    case Metric::dtw: return "dtw";
  }
  return "unknown";
}

MetricScore twed(WordSpan q, WordSpan s, const AlignParams& params) {
  require_non_empty(q, s, "twed");
  const double L = mean_len(q, s);
  orient(q, s);
  const std::size_t m = s.size();
  const double nu = params.twed_nu;
  const double lambda = params.twed_lambda;

  std::vector<double> prev(m + 1, kInf), cur(m + 1, kInf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= q.size(); ++i) {
    cur[0] = kInf;
    const Word a = q[i - 1];
    const Word a_prev = i > 1 ? q[i - 2] : 0;
    for (std::size_t j = 1; j <= m; ++j) {
      const Word b = s[j - 1];
      const Word b_prev = j > 1 ? s[j - 2] : 0;
      const double here = mismatch(a, b);
      const double stiff = nu * std::abs(static_cast<double>(i) - static_cast<double>(j));
      const double match = prev[j - 1] + here + mismatch(a_prev, b_prev) + stiff;
      const double del_q = prev[j] + here + stiff + lambda;
      const double del_s = cur[j - 1] + here + stiff + lambda;
      cur[j] = std::min({match, del_q, del_s});
    }
    std::swap(prev, cur);
  }
  const double d = prev[m];
  return {Metric::twed, d, std::exp(-d / (2.0 * L)), false};
}

MetricScore lcss(WordSpan q, WordSpan s, const AlignParams& params) {
  require_non_empty(q, s, "lcss");
  const double L = mean_len(q, s);
  orient(q, s);
  const std::size_t m = s.size();

  std::vector<std::size_t> prev(m + 1, 0), cur(m + 1, 0);
  for (std::size_t i = 1; i <= q.size(); ++i) {
    cur[0] = 0;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t lag = i > j ? i - j : j - i;
      const bool match =
          std::abs(value(q[i - 1]) - value(s[j - 1])) <= params.lcss_epsilon && lag <= params.lcss_delta;
      cur[j] = match ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  const double len = static_cast<double>(prev[m]);
  return {Metric::lcss, len, std::clamp(len / L, 0.0, 1.0), false};
}

MetricScore edr(WordSpan q, WordSpan s, const AlignParams& params) {
  require_non_empty(q, s, "edr");
  const double longest = static_cast<double>(std::max(q.size(), s.size()));
  orient(q, s);
  const std::size_t m = s.size();

  std::vector<double> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<double>(j);
  for (std::size_t i = 1; i <= q.size(); ++i) {
    cur[0] = static_cast<double>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const double cost = std::abs(value(q[i - 1]) - value(s[j - 1])) <= params.edr_epsilon ? 0.0 : 1.0;
      cur[j] = std::min({prev[j - 1] + cost, prev[j] + 1.0, cur[j - 1] + 1.0});
    }
    std::swap(prev, cur);
  }
  const double d = prev[m];
  return {Metric::edr, d, std::clamp(1.0 - d / longest, 0.0, 1.0), false};
}

MetricScore erp(WordSpan q, WordSpan s, const AlignParams& params) {
  require_non_empty(q, s, "erp");
  const double L = mean_len(q, s);
  orient(q, s);
  const std::size_t m = s.size();
  const double g = params.erp_gap;
  const double beta = params.erp_beta;

  std::vector<double> prev(m + 1), cur(m + 1);
  prev[0] = 0.0;
  for (std::size_t j = 1; j <= m; ++j) prev[j] = prev[j - 1] + beta * std::abs(value(s[j - 1]) - g);
  for (std::size_t i = 1; i <= q.size(); ++i) {
    const double gap_q = beta * std::abs(value(q[i - 1]) - g);
    cur[0] = prev[0] + gap_q;
    for (std::size_t j = 1; j <= m; ++j) {
      const double gap_s = beta * std::abs(value(s[j - 1]) - g);
      cur[j] = std::min({prev[j - 1] + std::abs(value(q[i - 1]) - value(s[j - 1])),
                         prev[j] + gap_q, cur[j - 1] + gap_s});
    }
    std::swap(prev, cur);
  }
  const double d = prev[m];
  return {Metric::erp, d, std::exp(-d / L), false};
}

double dtw(WordSpan q, WordSpan s) {
  require_non_empty(q, s, "dtw");
  orient(q, s);
  const std::size_t m = s.size();

  std::vector<double> prev(m + 1, kInf), cur(m + 1, kInf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= q.size(); ++i) {
    cur[0] = kInf;
    for (std::size_t j = 1; j <= m; ++j) {
      cur[j] = mismatch(q[i - 1], s[j - 1]) + std::min({prev[j - 1], prev[j], cur[j - 1]});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

namespace {

struct GramCount {
  WordSpan gram;
  double count;
};

std::vector<GramCount> count_grams(WordSpan seq, std::size_t n) {
  std::vector<WordSpan> grams;
  grams.reserve(seq.size() - n + 1);
  for (std::size_t i = 0; i + n <= seq.size(); ++i) grams.push_back(seq.subspan(i, n));
  const auto less = [](WordSpan a, WordSpan b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  };
  std::sort(grams.begin(), grams.end(), less);

  std::vector<GramCount> counts;
  for (const auto& g : grams) {
    if (!counts.empty() && std::equal(g.begin(), g.end(), counts.back().gram.begin())) {
      counts.back().count += 1.0;
    } else {
      counts.push_back({g, 1.0});
    }
  }
  return counts;
}

}  // namespace

MetricScore ngram_sim(WordSpan q, WordSpan s, std::size_t n) {
  if (n < 2) raise(Errc::invalid_input, "n-gram order must be at least 2");
  if (q.size() < n || s.size() < n) return {Metric::ngram, 1.0, 0.0, true};

  const auto a = count_grams(q, n);
  const auto b = count_grams(s, n);
  double dot = 0.0, norm_a = 0.0, norm_b = 0.0;
  for (const auto& g : a) norm_a += g.count * g.count;
  for (const auto& g : b) norm_b += g.count * g.count;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const auto& ga = a[i].gram;
    const auto& gb = b[j].gram;
    if (std::lexicographical_compare(ga.begin(), ga.end(), gb.begin(), gb.end())) {
      ++i;
    } else if (std::lexicographical_compare(gb.begin(), gb.end(), ga.begin(), ga.end())) {
      ++j;
    } else {
      dot += a[i].count * b[j].count;
      ++i;
      ++j;
    }
  }
  const double sim = std::clamp(dot / std::sqrt(norm_a * norm_b), 0.0, 1.0);
  return {Metric::ngram, 1.0 - sim, sim, false};
}

}  // namespace motiondex
