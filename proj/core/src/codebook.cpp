#include "motiondex/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "motiondex/error.hpp"
#include "motiondex/random.hpp"

namespace motiondex {

FeatureMeta FeatureMeta::for_joints(const FeaturizerConfig& cfg, std::size_t num_joints) {
  cfg.validate();
  return FeatureMeta{cfg, num_joints, joint_pair_order(num_joints)};
}

Codebook::Codebook(std::size_t num_codes, std::size_t dim, double alpha, double epsilon,
                   FeatureMeta meta)
    : num_codes_(num_codes),
      dim_(dim),
      alpha_(alpha),
      epsilon_(epsilon),
      meta_(std::move(meta)),
      codes_(num_codes * dim, 0.0),
      counts_(num_codes, 0.0),
      sums_(num_codes * dim, 0.0),
      epoch_use_(num_codes, 0) {
  if (num_codes_ == 0) raise(Errc::invalid_input, "codebook needs at least one code");
  if (dim_ == 0) raise(Errc::invalid_input, "codebook dimension must be positive");
  if (!(alpha_ > 0.0 && alpha_ < 1.0)) raise(Errc::invalid_input, "alpha must lie in (0, 1)");
  if (!(epsilon_ > 0.0)) raise(Errc::invalid_input, "epsilon must be positive");
  if (meta_.num_joints != 0 && meta_.feature_dim() != dim_) {
    raise(Errc::config_mismatch, "feature metadata implies dimension " +
                                     std::to_string(meta_.feature_dim()) + ", codebook has " +
                                     std::to_string(dim_));
  }
}

void Codebook::refresh_code(std::size_t k) {
  const double denom = std::max(counts_[k], epsilon_);
  auto c = code(k);
  auto m = ema_sum(k);
  for (std::size_t d = 0; d < dim_; ++d) c[d] = m[d] / denom;
}

void Codebook::reset_epoch_use() { std::fill(epoch_use_.begin(), epoch_use_.end(), 0); }

bool Codebook::same_state(const Codebook& other) const {
  return num_codes_ == other.num_codes_ && dim_ == other.dim_ && alpha_ == other.alpha_ &&
         epsilon_ == other.epsilon_ && meta_ == other.meta_ && codes_ == other.codes_ &&
         counts_ == other.counts_ && sums_ == other.sums_;
}

Assignment quantize(std::span<const double> patch, const Codebook& cb) {
  if (patch.size() != cb.dim()) {
    raise(Errc::invalid_input, "patch dimension " + std::to_string(patch.size()) +
                                   " does not match codebook dimension " +
                                   std::to_string(cb.dim()));
  }
  Word best = 0;
  double best_sq = 0.0;
  for (std::size_t k = 0; k < cb.size(); ++k) {
    const auto c = cb.code(k);
    double sq = 0.0;
    for (std::size_t d = 0; d < patch.size(); ++d) {
      const double diff = patch[d] - c[d];
      sq += diff * diff;
    }
    if (k == 0 || sq < best_sq) {
      best = static_cast<Word>(k);
      best_sq = sq;
    }
  }
  return {best, std::sqrt(best_sq)};
}

CodebookHealth train_epoch(std::span<const PatchBatch> batches, Codebook& cb,
                           const TrainOptions& opts) {
  const std::size_t total = std::accumulate(
      batches.begin(), batches.end(), std::size_t{0},
      [](std::size_t acc, const PatchBatch& b) { return acc + b.size(); });
  if (total == 0) raise(Errc::invalid_input, "train_epoch needs at least one non-empty batch");

  const std::size_t K = cb.size();
  const std::size_t D = cb.dim();
  const double alpha = cb.alpha();

  cb.reset_epoch_use();
  std::vector<std::uint64_t> epoch_counts(K, 0);
  std::vector<double> batch_counts(K);
  std::vector<double> batch_sums(K * D);
  double sq_error = 0.0;

  for (const auto& batch : batches) {
    if (batch.empty()) continue;
    std::fill(batch_counts.begin(), batch_counts.end(), 0.0);
    std::fill(batch_sums.begin(), batch_sums.end(), 0.0);

    // Assign the whole batch against the codes as they stood at batch start.
    for (const auto& patch : batch) {
      const Assignment a = quantize(patch.values, cb);
      sq_error += a.distance * a.distance;
      batch_counts[a.word] += 1.0;
      ++epoch_counts[a.word];
      double* sum = batch_sums.data() + static_cast<std::size_t>(a.word) * D;
      for (std::size_t d = 0; d < D; ++d) sum[d] += patch.values[d];
    }
    for (std::size_t k = 0; k < K; ++k) cb.epoch_use()[k] += static_cast<std::uint64_t>(batch_counts[k]);

    if (opts.warmup) continue;
    for (std::size_t k = 0; k < K; ++k) {
      cb.ema_counts()[k] = alpha * cb.ema_counts()[k] + (1.0 - alpha) * batch_counts[k];
      auto m = cb.ema_sum(k);
      const double* s = batch_sums.data() + k * D;
      for (std::size_t d = 0; d < D; ++d) m[d] = alpha * m[d] + (1.0 - alpha) * s[d];
      cb.refresh_code(k);
    }
  }

  CodebookHealth health;
  health.usage_pct = usage_ratio(cb);
  for (std::size_t k = 0; k < K; ++k) {
    if (epoch_counts[k] == 0) continue;
    const double p = static_cast<double>(epoch_counts[k]) / static_cast<double>(total);
    health.assignment_entropy -= p * std::log(p);
  }
  health.quantisation_mse = sq_error / (static_cast<double>(total) * static_cast<double>(D));

  if (!opts.warmup && opts.revive) {
    if (opts.reservoir == ReservoirPolicy::whole_epoch) {
      std::vector<PatchFeature> reservoir;
      reservoir.reserve(total);
      for (const auto& batch : batches) reservoir.insert(reservoir.end(), batch.begin(), batch.end());
      health.revived = revive_dead_codes(cb, reservoir, opts.seed);
    } else {
      auto last = std::find_if(batches.rbegin(), batches.rend(),
                               [](const PatchBatch& b) { return !b.empty(); });
      health.revived = revive_dead_codes(cb, *last, opts.seed);
    }
  }
  return health;
}

std::size_t revive_dead_codes(Codebook& cb, std::span<const PatchFeature> reservoir,
                              std::uint64_t seed) {
  std::vector<std::size_t> dead;
  for (std::size_t k = 0; k < cb.size(); ++k) {
    if (cb.epoch_use()[k] == 0) dead.push_back(k);
  }
  if (dead.empty()) return 0;
  if (reservoir.empty()) {
    raise(Errc::revival_starved,
          std::to_string(dead.size()) + " dead codes but the revival reservoir is empty");
  }

  Rng rng(seed);
  for (std::size_t k : dead) {
    const auto& patch = reservoir[rng.uniform_index(reservoir.size())];
    if (patch.values.size() != cb.dim()) {
      raise(Errc::invalid_input, "reservoir patch dimension does not match codebook");
    }
    std::copy(patch.values.begin(), patch.values.end(), cb.ema_sum(k).begin());
    cb.ema_counts()[k] = 1.0;
    cb.refresh_code(k);
    cb.epoch_use()[k] = 1;
  }
  return dead.size();
}

double usage_ratio(const Codebook& cb) {
  if (cb.size() == 0) return 0.0;
  const auto used = std::count_if(cb.epoch_use().begin(), cb.epoch_use().end(),
                                  [](std::uint64_t u) { return u > 0; });
  return 100.0 * static_cast<double>(used) / static_cast<double>(cb.size());
}

Codebook init_codebook(std::span<const PatchFeature> sample, std::size_t num_codes, double alpha,
                       std::uint64_t seed, FeatureMeta meta, double epsilon) {
  if (sample.size() < num_codes) {
    raise(Errc::insufficient_data, "need at least " + std::to_string(num_codes) +
                                       " patches to initialise the codebook, got " +
                                       std::to_string(sample.size()));
  }
  const std::size_t dim = sample.front().values.size();
  for (const auto& p : sample) {
    if (p.values.size() != dim) raise(Errc::invalid_input, "sample patches differ in dimension");
  }

  Codebook cb(num_codes, dim, alpha, epsilon, std::move(meta));
  std::vector<std::size_t> order(sample.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t k = 0; k < num_codes; ++k) {
    const std::size_t pick = k + rng.uniform_index(order.size() - k);
    std::swap(order[k], order[pick]);
    const auto& values = sample[order[k]].values;
    std::copy(values.begin(), values.end(), cb.ema_sum(k).begin());
    cb.ema_counts()[k] = 1.0;
    cb.refresh_code(k);
  }
  return cb;
}

TokenSequence tokenize_sequence(const PoseSequence& seq, const FeaturizerConfig& cfg,
                                const Codebook& cb) {
  if (cb.meta().featurizer != cfg) {
    raise(Errc::config_mismatch, "featurizer settings differ from those the codebook was trained with");
  }
  if (cb.meta().num_joints != seq.num_joints()) {
    raise(Errc::config_mismatch, "sequence '" + seq.id() + "' has " +
                                     std::to_string(seq.num_joints()) + " joints, codebook expects " +
                                     std::to_string(cb.meta().num_joints));
  }
  TokenSequence tokens{seq.id(), seq.label(), {}};
  const auto patches = featurize_sequence(seq, cfg);
  tokens.words.reserve(patches.size());
  for (const auto& p : patches) tokens.words.push_back(quantize(p.values, cb).word);
  return tokens;
}

}  // namespace motiondex
