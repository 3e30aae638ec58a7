#include "motiondex/featurize.hpp"

#include <cmath>

#include "motiondex/error.hpp"

namespace motiondex {

namespace {

void check_finite(std::span<const Joint> joints, const std::string& where) {
  for (const auto& j : joints) {
    for (double c : j) {
      if (!std::isfinite(c)) raise(Errc::invalid_input, where + ": non-finite joint coordinate");
    }
  }
}

}  // namespace

PoseSequence::PoseSequence(std::string id, std::optional<std::string> label, double fps,
                           std::size_t num_joints, std::vector<Joint> joints)
    : id_(std::move(id)),
      label_(std::move(label)),
      fps_(fps),
      num_joints_(num_joints),
      joints_(std::move(joints)) {
  if (num_joints_ < 2) raise(Errc::invalid_input, "pose sequence '" + id_ + "' needs at least 2 joints");
  if (joints_.empty() || joints_.size() % num_joints_ != 0) {
    raise(Errc::invalid_input, "pose sequence '" + id_ + "' has a ragged or empty frame array");
  }
  if (!(fps_ > 0.0) || !std::isfinite(fps_)) {
    raise(Errc::invalid_input, "pose sequence '" + id_ + "' has a non-positive fps");
  }
  check_finite(joints_, "pose sequence '" + id_ + "'");
}

void FeaturizerConfig::validate() const {
  if (patch_len == 0) raise(Errc::invalid_input, "patch_len must be positive");
  if (stride == 0) raise(Errc::invalid_input, "stride must be positive");
  if (stride > patch_len) raise(Errc::invalid_input, "stride must not exceed patch_len");
}

std::size_t num_joint_pairs(std::size_t num_joints) {
  return num_joints < 2 ? 0 : num_joints * (num_joints - 1) / 2;
}

std::vector<JointPair> joint_pair_order(std::size_t num_joints) {
  std::vector<JointPair> pairs;
  pairs.reserve(num_joint_pairs(num_joints));
  for (std::size_t i = 0; i < num_joints; ++i) {
    for (std::size_t j = i + 1; j < num_joints; ++j) pairs.emplace_back(i, j);
  }
  return pairs;
}

std::vector<double> pairwise_distances(std::span<const Joint> frame) {
  if (frame.size() < 2) raise(Errc::invalid_input, "a frame needs at least 2 joints");
  check_finite(frame, "frame");
  std::vector<double> out;
  out.reserve(num_joint_pairs(frame.size()));
  for (std::size_t i = 0; i < frame.size(); ++i) {
    for (std::size_t j = i + 1; j < frame.size(); ++j) {
      const double dx = frame[i][0] - frame[j][0];
      const double dy = frame[i][1] - frame[j][1];
      const double dz = frame[i][2] - frame[j][2];
      out.push_back(std::sqrt(dx * dx + dy * dy + dz * dz));
    }
  }
  return out;
}

std::size_t patch_count(std::size_t num_frames, const FeaturizerConfig& cfg) {
  if (num_frames < cfg.patch_len) return 0;
  return (num_frames - cfg.patch_len) / cfg.stride + 1;
}

std::vector<PatchFeature> featurize_sequence(const PoseSequence& seq,
                                             const FeaturizerConfig& cfg) {
  cfg.validate();
  const std::size_t frames = seq.num_frames();
  if (frames < cfg.patch_len) {
    raise(Errc::sequence_too_short, "sequence '" + seq.id() + "' has " + std::to_string(frames) +
                                        " frames, patch_len is " + std::to_string(cfg.patch_len));
  }

  // Distances are computed once per frame and shared by overlapping patches.
  std::vector<std::vector<double>> per_frame;
  per_frame.reserve(frames);
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 0; t < frames; ++t) {
    per_frame.push_back(pairwise_distances(seq.frame(t)));
    for (double d : per_frame.back()) total += d;
    count += per_frame.back().size();
  }

  double scale = 1.0;
  if (cfg.scale_norm) {
    const double mean = total / static_cast<double>(count);
    if (!(mean > 0.0)) {
      raise(Errc::degenerate_pose, "sequence '" + seq.id() + "' has zero mean joint distance");
    }
    scale = mean;
  }

  const std::size_t n_patches = patch_count(frames, cfg);
  const std::size_t pairs = num_joint_pairs(seq.num_joints());
  std::vector<PatchFeature> patches;
  patches.reserve(n_patches);
  for (std::size_t p = 0; p < n_patches; ++p) {
    PatchFeature patch;
    patch.patch_index = p;
    patch.patch_len = cfg.patch_len;
    patch.values.reserve(cfg.patch_len * pairs);
    const std::size_t start = p * cfg.stride;
    for (std::size_t t = start; t < start + cfg.patch_len; ++t) {
      for (double d : per_frame[t]) patch.values.push_back(cfg.scale_norm ? d / scale : d);
    }
    patches.push_back(std::move(patch));
  }
  return patches;
}

}  // namespace motiondex
