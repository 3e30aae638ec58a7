#pragma once

// Test-only reference implementations. Nothing here shares code with the
// library's dynamic programs: alignment costs are obtained by walking every
// monotone path through the alignment grid (with branch-and-bound on the
// running cost), LCSS by enumerating subsequences.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace oracle {

using Seq = std::vector<std::uint32_t>;

enum class Move { diag, down, right };

// Minimum over all monotone paths (0,0) -> (n,m) of the summed step costs.
// `cost(move, i, j)` is the cost of entering cell (i, j). With interior_only,
// the path may not touch row 0 or column 0 after the origin.
template <typename Cost>
double min_path(std::size_t n, std::size_t m, bool interior_only, Cost&& cost) {
  double best = std::numeric_limits<double>::infinity();
  auto walk = [&](auto&& self, std::size_t i, std::size_t j, double acc) -> void {
    if (acc >= best) return;
    if (i == n && j == m) {
      best = acc;
      return;
    }
    if (i < n && j < m) self(self, i + 1, j + 1, acc + cost(Move::diag, i + 1, j + 1));
    if (i < n && !(interior_only && j == 0)) self(self, i + 1, j, acc + cost(Move::down, i + 1, j));
    if (j < m && !(interior_only && i == 0)) self(self, i, j + 1, acc + cost(Move::right, i, j + 1));
  };
  walk(walk, 0, 0, 0.0);
  return best;
}

inline double val(const Seq& s, std::size_t i) { return i == 0 ? 0.0 : static_cast<double>(s[i - 1]); }

inline double neq(double a, double b) { return a == b ? 0.0 : 1.0; }

inline double twed(const Seq& q, const Seq& s, double nu, double lambda) {
  return min_path(q.size(), s.size(), true, [&](Move mv, std::size_t i, std::size_t j) {
    const double stiff = nu * std::abs(static_cast<double>(i) - static_cast<double>(j));
    const double here = neq(val(q, i), val(s, j));
    if (mv == Move::diag) return here + neq(val(q, i - 1), val(s, j - 1)) + stiff;
    return here + stiff + lambda;
  });
}

inline double dtw(const Seq& q, const Seq& s) {
  return min_path(q.size(), s.size(), true,
                  [&](Move, std::size_t i, std::size_t j) { return neq(val(q, i), val(s, j)); });
}

inline double edr(const Seq& q, const Seq& s, double eps = 0.0) {
  return min_path(q.size(), s.size(), false, [&](Move mv, std::size_t i, std::size_t j) {
    if (mv != Move::diag) return 1.0;
    return std::abs(val(q, i) - val(s, j)) <= eps ? 0.0 : 1.0;
  });
}

inline double erp(const Seq& q, const Seq& s, double gap, double beta) {
  return min_path(q.size(), s.size(), false, [&](Move mv, std::size_t i, std::size_t j) {
    switch (mv) {
      case Move::diag: return std::abs(val(q, i) - val(s, j));
      case Move::down: return beta * std::abs(val(q, i) - gap);
      case Move::right: return beta * std::abs(val(s, j) - gap);
    }
    return 0.0;
  });
}

// Longest subsequence of q (exact symbol match, no lag bound) that is also a
// subsequence of s, by trying every subset of q's positions.
inline std::size_t lcss(const Seq& q, const Seq& s) {
  std::size_t best = 0;
  const std::uint32_t subsets = 1u << q.size();
  for (std::uint32_t mask = 0; mask < subsets; ++mask) {
    const auto len = static_cast<std::size_t>(__builtin_popcount(mask));
    if (len <= best) continue;
    std::size_t pos = 0;
    bool ok = true;
    for (std::size_t i = 0; i < q.size() && ok; ++i) {
      if (!(mask & (1u << i))) continue;
      while (pos < s.size() && s[pos] != q[i]) ++pos;
      if (pos == s.size()) ok = false;
      else ++pos;
    }
    if (ok) best = len;
  }
  return best;
}

// Every sequence of length 1..max_len over {0, .., alphabet-1}.
inline std::vector<Seq> all_sequences(std::size_t max_len, std::uint32_t alphabet) {
  std::vector<Seq> out;
  for (std::size_t len = 1; len <= max_len; ++len) {
    Seq s(len, 0);
    while (true) {
      out.push_back(s);
      std::size_t k = 0;
      while (k < len && ++s[k] == alphabet) s[k++] = 0;
      if (k == len) break;
    }
  }
  return out;
}

}  // namespace oracle
