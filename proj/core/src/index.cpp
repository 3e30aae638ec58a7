#include "motiondex/index.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>

#include "motiondex/error.hpp"

namespace motiondex {

Histogram::Histogram(std::span<const double> dense, std::size_t source_len)
    : vocab_(dense.size()), source_len_(source_len) {
  double norm_sq = 0.0;
  for (std::size_t k = 0; k < dense.size(); ++k) {
    const double v = dense[k];
    if (!std::isfinite(v) || v < 0.0) raise(Errc::invalid_input, "histogram bins must be finite and non-negative");
    if (v == 0.0) continue;
    bins_.push_back(static_cast<Word>(k));
    weights_.push_back(v);
    norm_sq += v * v;
  }
  if (bins_.empty()) raise(Errc::invalid_input, "histogram must not be all-zero");
  if (std::abs(std::sqrt(norm_sq) - 1.0) > 1e-9) raise(Errc::invalid_input, "histogram is not L2-normalised");
  if (source_len_ == 0) raise(Errc::invalid_input, "histogram source length must be positive");
}

double Histogram::operator[](std::size_t k) const {
  const auto it = std::lower_bound(bins_.begin(), bins_.end(), static_cast<Word>(k));
  if (it == bins_.end() || *it != k) return 0.0;
  return weights_[static_cast<std::size_t>(it - bins_.begin())];
}

std::vector<double> Histogram::dense() const {
  std::vector<double> out(vocab_, 0.0);
  for (std::size_t i = 0; i < bins_.size(); ++i) out[bins_[i]] = weights_[i];
  return out;
}

Histogram build_histogram(std::span<const Word> words, std::size_t vocab) {
  if (words.empty()) raise(Errc::empty_sequence, "cannot build a histogram of an empty sequence");
  std::vector<std::size_t> counts(vocab, 0);
  for (Word w : words) {
    if (w >= vocab) {
      raise(Errc::vocabulary_overflow, "word " + std::to_string(w) + " outside vocabulary of size " +
                                           std::to_string(vocab));
    }
    ++counts[w];
  }
  double norm_sq = 0.0;
  for (std::size_t c : counts) norm_sq += static_cast<double>(c) * static_cast<double>(c);
  const double norm = std::sqrt(norm_sq);

  Histogram h;
  h.vocab_ = vocab;
  h.source_len_ = words.size();
  for (std::size_t k = 0; k < vocab; ++k) {
    if (counts[k] == 0) continue;
    h.bins_.push_back(static_cast<Word>(k));
    h.weights_.push_back(static_cast<double>(counts[k]) / norm);
  }
  return h;
}

double cosine_sim(const Histogram& a, const Histogram& b) {
  if (a.vocab() != b.vocab()) {
    raise(Errc::config_mismatch, "histograms over vocabularies of size " + std::to_string(a.vocab()) +
                                     " and " + std::to_string(b.vocab()));
  }
  const auto ab = a.bins(), bb = b.bins();
  const auto aw = a.weights(), bw = b.weights();
  double dot = 0.0;
  std::size_t i = 0, j = 0;
  while (i < ab.size() && j < bb.size()) {
    if (ab[i] < bb[j]) {
      ++i;
    } else if (bb[j] < ab[i]) {
      ++j;
    } else {
      dot += aw[i] * bw[j];
      ++i;
      ++j;
    }
  }
  return dot > 0.0 ? std::min(dot, 1.0) : 0.0;
}

std::size_t shortlist_size(std::size_t n, std::optional<std::size_t> cap) {
  std::size_t l = std::max(n / 2, std::min<std::size_t>(200, n));
  l = std::min(l, n);
  if (cap) l = std::min(l, *cap);
  return l;
}

void PeriodicityConfig::validate() const {
  if (!(theta > 0.0 && theta < 1.0)) raise(Errc::invalid_input, "periodicity theta must lie in (0, 1)");
  if (min_peaks < 1) raise(Errc::invalid_input, "periodicity min_peaks must be at least 1");
}

namespace {

struct Centered {
  std::vector<double> dev;
  double energy = 0.0;
};

Centered center(std::span<const Word> words) {
  Centered c;
  double mean = 0.0;
  for (Word w : words) mean += static_cast<double>(w);
  mean /= static_cast<double>(words.size());
  c.dev.reserve(words.size());
  for (Word w : words) {
    c.dev.push_back(static_cast<double>(w) - mean);
    c.energy += c.dev.back() * c.dev.back();
  }
  return c;
}

double lagged(const Centered& c, std::size_t tau) {
  double num = 0.0;
  for (std::size_t t = 0; t + tau < c.dev.size(); ++t) num += c.dev[t] * c.dev[t + tau];
  return num / c.energy;
}

}  // namespace

double autocorrelation(std::span<const Word> words, std::size_t tau) {
  if (tau < 1 || tau >= words.size()) {
    raise(Errc::invalid_input, "lag " + std::to_string(tau) + " outside [1, " +
                                   std::to_string(words.size()) + ")");
  }
  const Centered c = center(words);
  if (c.energy == 0.0) raise(Errc::undefined_variance, "autocorrelation of a constant sequence");
  return lagged(c, tau);
}

bool is_periodic(std::span<const Word> words, const PeriodicityConfig& cfg) {
  cfg.validate();
  const std::size_t T = words.size();
  if (T < 3) return false;
  const Centered c = center(words);
  if (c.energy == 0.0) return false;

  std::size_t max_lag = cfg.max_lag ? cfg.max_lag : T / 2;
  max_lag = std::min(max_lag, T - 1);
  if (max_lag < 3) return false;

  std::vector<double> ac(max_lag + 1, 0.0);
  for (std::size_t tau = 1; tau <= max_lag; ++tau) ac[tau] = lagged(c, tau);

  std::size_t peaks = 0;
  for (std::size_t tau = 2; tau < max_lag; ++tau) {
    if (ac[tau] > cfg.theta && ac[tau] > ac[tau - 1] && ac[tau] > ac[tau + 1]) ++peaks;
  }
  return peaks >= cfg.min_peaks;
}

std::optional<std::size_t> MotionIndex::find(const std::string& id) const {
  const auto it = positions_.find(id);
  if (it == positions_.end()) return std::nullopt;
  return it->second;
}

void MotionIndex::append(const TokenSequence& seq, const PeriodicityConfig& pcfg) {
  if (seq.words.empty()) raise(Errc::empty_sequence, "sequence '" + seq.id + "' has no words");
  IndexEntry entry;
  entry.id = seq.id;
  entry.label = seq.label;
  entry.hist = build_histogram(seq.words, vocab_);
  entry.tokens = seq;
  entry.periodic = is_periodic(seq.words, pcfg);
  append_entry(std::move(entry));
}

void MotionIndex::append_entry(IndexEntry entry) {
  if (entry.hist.vocab() != vocab_) {
    raise(Errc::config_mismatch, "entry '" + entry.id + "' histogram has vocabulary " +
                                     std::to_string(entry.hist.vocab()) + ", index has " +
                                     std::to_string(vocab_));
  }
  if (entry.tokens.words.empty()) raise(Errc::empty_sequence, "entry '" + entry.id + "' has no words");
  if (positions_.contains(entry.id)) raise(Errc::duplicate_id, "duplicate sequence id '" + entry.id + "'");
  const std::size_t pos = entries_.size();
  positions_.emplace(entry.id, pos);

  const auto at = std::lower_bound(by_id_.begin(), by_id_.end(), entry.id,
                                   [this](std::size_t e, const std::string& id) { return entries_[e].id < id; });
  const auto rank = static_cast<std::size_t>(at - by_id_.begin());
  by_id_.insert(at, pos);
  for (auto& r : id_rank_) r += r >= rank ? 1 : 0;
  id_rank_.push_back(rank);

  flat_bins_.insert(flat_bins_.end(), entry.hist.bins().begin(), entry.hist.bins().end());
  flat_weights_.insert(flat_weights_.end(), entry.hist.weights().begin(), entry.hist.weights().end());
  offsets_.push_back(flat_bins_.size());
  entries_.push_back(std::move(entry));
  ++revision_;
}

MotionIndex build_index(std::span<const TokenSequence> tokens, std::size_t vocab,
                        const PeriodicityConfig& pcfg) {
  pcfg.validate();
  if (vocab == 0) raise(Errc::invalid_input, "vocabulary size must be positive");
  MotionIndex idx(vocab);
  for (const auto& seq : tokens) idx.append(seq, pcfg);
  return idx;
}

namespace {

struct Scored {
  double score;
  std::size_t rank;
  std::size_t entry;
};

// Stable LSD radix pass over one byte of key(item); skipped when every item
// shares that byte.
template <typename Key>
void radix_pass(std::vector<Scored>& items, std::vector<Scored>& tmp, int shift, Key key) {
  std::array<std::size_t, 257> count{};
  for (const auto& it : items) ++count[((key(it) >> shift) & 0xFF) + 1];
  if (std::find(count.begin() + 1, count.end(), items.size()) != count.end()) return;
  for (std::size_t b = 1; b < count.size(); ++b) count[b] += count[b - 1];
  for (const auto& it : items) tmp[count[(key(it) >> shift) & 0xFF]++] = it;
  items.swap(tmp);
}

// Score descending, then id rank ascending, in time linear in the item count.
// Scores are non-negative, so their bit patterns order like the values.
void order_shortlist(std::vector<Scored>& items, std::size_t rank_bound) {
  std::vector<Scored> tmp(items.size());
  for (int shift = 0; shift < 64 && (rank_bound >> shift) != 0; shift += 8) {
    radix_pass(items, tmp, shift, [](const Scored& s) { return static_cast<std::uint64_t>(s.rank); });
  }
  for (int shift = 0; shift < 64; shift += 8) {
    radix_pass(items, tmp, shift, [](const Scored& s) { return ~std::bit_cast<std::uint64_t>(s.score); });
  }
}

}  // namespace

std::vector<ShortlistItem> shortlist(const Histogram& query, const MotionIndex& idx,
                                     std::optional<std::size_t> cap,
                                     std::span<const std::size_t> exclude) {
  if (query.vocab() != idx.vocab()) {
    raise(Errc::config_mismatch, "query vocabulary " + std::to_string(query.vocab()) +
                                     " differs from index vocabulary " + std::to_string(idx.vocab()));
  }
  const std::vector<double> q = query.dense();
  std::vector<Scored> scored;
  scored.reserve(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (std::find(exclude.begin(), exclude.end(), i) != exclude.end()) continue;
    const auto bins = idx.row_bins(i);
    const auto w = idx.row_weights(i);
    double dot = 0.0;
    for (std::size_t b = 0; b < bins.size(); ++b) dot += q[bins[b]] * w[b];
    scored.push_back({dot > 0.0 ? std::min(dot, 1.0) : 0.0, idx.id_rank(i), i});
  }

  const std::size_t L = shortlist_size(scored.size(), cap);
  if (L < scored.size()) {
    const auto better = [](const Scored& a, const Scored& b) {
      return a.score != b.score ? a.score > b.score : a.rank < b.rank;
    };
    std::nth_element(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(L), scored.end(), better);
    scored.resize(L);
  }
  order_shortlist(scored, idx.size());

  std::vector<ShortlistItem> out;
  out.reserve(scored.size());
  for (const auto& s : scored) out.push_back({s.entry, s.score});
  return out;
}

}  // namespace motiondex
