#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "motiondex/featurize.hpp"

namespace motiondex {

using Word = std::uint32_t;

inline constexpr double kDefaultAlpha = 0.5;
inline constexpr double kDefaultEpsilon = 1e-5;
inline constexpr std::size_t kDefaultVocabulary = 512;

// Featurizer settings a codebook was trained under. Quantising patches made
// under different settings is a config mismatch.
struct FeatureMeta {
  FeaturizerConfig featurizer;
  std::size_t num_joints = 0;
  std::vector<JointPair> joint_pairs;

  std::size_t feature_dim() const { return featurizer.patch_len * joint_pairs.size(); }

  static FeatureMeta for_joints(const FeaturizerConfig& cfg, std::size_t num_joints);

  bool operator==(const FeatureMeta&) const = default;
};

// K code vectors with their EMA statistics. Rows are stored contiguously.
class Codebook {
 public:
  Codebook() = default;
  Codebook(std::size_t num_codes, std::size_t dim, double alpha, double epsilon, FeatureMeta meta);

  std::size_t size() const { return num_codes_; }
  std::size_t dim() const { return dim_; }
  double alpha() const { return alpha_; }
  double epsilon() const { return epsilon_; }
  const FeatureMeta& meta() const { return meta_; }

  std::span<const double> code(std::size_t k) const { return {codes_.data() + k * dim_, dim_}; }
  std::span<double> code(std::size_t k) { return {codes_.data() + k * dim_, dim_}; }
  std::span<const double> ema_sum(std::size_t k) const { return {sums_.data() + k * dim_, dim_}; }
  std::span<double> ema_sum(std::size_t k) { return {sums_.data() + k * dim_, dim_}; }

  const std::vector<double>& codes() const { return codes_; }
  const std::vector<double>& ema_counts() const { return counts_; }
  std::vector<double>& ema_counts() { return counts_; }
  const std::vector<double>& ema_sums() const { return sums_; }
  const std::vector<std::uint64_t>& epoch_use() const { return epoch_use_; }
  std::vector<std::uint64_t>& epoch_use() { return epoch_use_; }

  // c_k <- m_k / max(n_k, epsilon)
  void refresh_code(std::size_t k);

  void reset_epoch_use();

  // Compares persisted state (codes, EMA statistics, hyper-parameters and
  // metadata); epoch_use is transient.
  bool same_state(const Codebook& other) const;

 private:
  std::size_t num_codes_ = 0;
  std::size_t dim_ = 0;
  double alpha_ = kDefaultAlpha;
  double epsilon_ = kDefaultEpsilon;
  FeatureMeta meta_;
  std::vector<double> codes_;
  std::vector<double> counts_;
  std::vector<double> sums_;
  std::vector<std::uint64_t> epoch_use_;
};

struct TokenSequence {
  std::string id;
  std::optional<std::string> label;
  std::vector<Word> words;

  bool operator==(const TokenSequence&) const = default;
};

struct CodebookHealth {
  double usage_pct = 0.0;           // codes assigned at least once this epoch
  double assignment_entropy = 0.0;  // nats
  double quantisation_mse = 0.0;    // mean squared error per feature element
  std::size_t revived = 0;          // codes replaced at the end of the epoch
};

struct Assignment {
  Word word = 0;
  double distance = 0.0;
};

// Nearest code by Euclidean distance; ties go to the lowest index.
Assignment quantize(std::span<const double> patch, const Codebook& cb);

enum class ReservoirPolicy { last_batch, whole_epoch };

struct TrainOptions {
  bool warmup = false;
  bool revive = true;
  ReservoirPolicy reservoir = ReservoirPolicy::last_batch;
  std::uint64_t seed = 0;
};

using PatchBatch = std::vector<PatchFeature>;

// One pass over the batches. Each batch is assigned against the current
// codes, then n_k, m_k and c_k are updated by EMA unless warmup is set. After
// the last batch, codes unused in the epoch are revived from the reservoir
// (never during warm-up). Health reflects assignments made in the epoch,
// before revival.
CodebookHealth train_epoch(std::span<const PatchBatch> batches, Codebook& cb,
                           const TrainOptions& opts = {});

// Overwrites every code with epoch_use == 0 by a seeded uniform draw from the
// reservoir and resets its EMA state (n_k = 1, m_k = patch). Revived codes are
// counted as used for the rest of the epoch.
std::size_t revive_dead_codes(Codebook& cb, std::span<const PatchFeature> reservoir,
                              std::uint64_t seed);

double usage_ratio(const Codebook& cb);

// K distinct sample patches (seeded, without replacement) become the initial
// codes with n_k = 1 and m_k = c_k.
Codebook init_codebook(std::span<const PatchFeature> sample, std::size_t num_codes, double alpha,
                       std::uint64_t seed, FeatureMeta meta, double epsilon = kDefaultEpsilon);

TokenSequence tokenize_sequence(const PoseSequence& seq, const FeaturizerConfig& cfg,
                                const Codebook& cb);

}  // namespace motiondex
