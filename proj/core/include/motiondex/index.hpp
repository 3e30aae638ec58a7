#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "motiondex/codebook.hpp"

namespace motiondex {

// L2-normalised bag-of-words over a K-word vocabulary. Only non-zero bins are
// stored, in ascending bin order.
class Histogram {
 public:
  Histogram() = default;
  // Takes a dense K-bin vector; zero bins are dropped.
  Histogram(std::span<const double> dense, std::size_t source_len);

  std::size_t vocab() const { return vocab_; }
  std::size_t source_len() const { return source_len_; }
  std::span<const Word> bins() const { return bins_; }
  std::span<const double> weights() const { return weights_; }

  double operator[](std::size_t k) const;
  std::vector<double> dense() const;

  bool operator==(const Histogram&) const = default;

 private:
  friend Histogram build_histogram(std::span<const Word> words, std::size_t vocab);

  std::size_t vocab_ = 0;
  std::size_t source_len_ = 0;
  std::vector<Word> bins_;
  std::vector<double> weights_;
};

Histogram build_histogram(std::span<const Word> words, std::size_t vocab);

// Dot product of two unit histograms, clamped to [0, 1].
double cosine_sim(const Histogram& a, const Histogram& b);

// L = min(max(floor(N/2), min(200, N)), N), further limited by cap if given.
std::size_t shortlist_size(std::size_t n, std::optional<std::size_t> cap = std::nullopt);

struct PeriodicityConfig {
  double theta = 0.6;
  std::size_t min_peaks = 2;
  std::size_t max_lag = 0;  // 0 selects floor(T/2)

  void validate() const;
};

// Normalised autocorrelation of the word values at lag tau. Throws
// undefined_variance for constant sequences.
double autocorrelation(std::span<const Word> words, std::size_t tau);

// True iff at least min_peaks interior lags in [1, max_lag] are strict local
// maxima of the autocorrelation with value above theta.
bool is_periodic(std::span<const Word> words, const PeriodicityConfig& cfg = {});

struct IndexEntry {
  std::string id;
  std::optional<std::string> label;
  Histogram hist;
  TokenSequence tokens;
  bool periodic = false;

  bool operator==(const IndexEntry&) const = default;
};

struct ShortlistItem {
  std::size_t entry = 0;  // position in MotionIndex::entries()
  double score = 0.0;
};

class MotionIndex {
 public:
  static constexpr int kVersion = 1;

  MotionIndex() = default;
  explicit MotionIndex(std::size_t vocab) : vocab_(vocab) {}

  std::size_t vocab() const { return vocab_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<IndexEntry>& entries() const { return entries_; }
  const IndexEntry& entry(std::size_t i) const { return entries_[i]; }
  std::uint64_t revision() const { return revision_; }

  std::optional<std::size_t> find(const std::string& id) const;

  // Histogram rows packed contiguously for the Stage-1 scan.
  std::span<const Word> row_bins(std::size_t i) const {
    return {flat_bins_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::span<const double> row_weights(std::size_t i) const {
    return {flat_weights_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  // Position of entry i's id in lexicographic id order.
  std::size_t id_rank(std::size_t i) const { return id_rank_[i]; }

  // Builds the histogram and periodicity flag for a new sequence.
  void append(const TokenSequence& seq, const PeriodicityConfig& pcfg = {});
  // Adds a fully-formed entry (used when loading a persisted index).
  void append_entry(IndexEntry entry);

  bool operator==(const MotionIndex& other) const {
    return vocab_ == other.vocab_ && entries_ == other.entries_;
  }

 private:
  std::size_t vocab_ = 0;
  std::vector<IndexEntry> entries_;
  std::unordered_map<std::string, std::size_t> positions_;
  std::vector<std::size_t> offsets_ = {0};
  std::vector<Word> flat_bins_;
  std::vector<double> flat_weights_;
  std::vector<std::size_t> by_id_;
  std::vector<std::size_t> id_rank_;
  std::uint64_t revision_ = 0;
};

MotionIndex build_index(std::span<const TokenSequence> tokens, std::size_t vocab,
                        const PeriodicityConfig& pcfg = {});

// Top-L entries by cosine similarity, descending, ties broken by id. Entries
// whose position is listed in `exclude` are skipped and do not count towards N.
std::vector<ShortlistItem> shortlist(const Histogram& query, const MotionIndex& idx,
                                     std::optional<std::size_t> cap = std::nullopt,
                                     std::span<const std::size_t> exclude = {});

}  // namespace motiondex
