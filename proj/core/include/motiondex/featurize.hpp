#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace motiondex {

using Joint = std::array<double, 3>;

// A single performer's skeleton track: T frames of V joints, stored
// frame-major. Coordinates are in metres.
class PoseSequence {
 public:
  PoseSequence() = default;
  PoseSequence(std::string id, std::optional<std::string> label, double fps,
               std::size_t num_joints, std::vector<Joint> joints);

  const std::string& id() const { return id_; }
  const std::optional<std::string>& label() const { return label_; }
  double fps() const { return fps_; }
  std::size_t num_frames() const { return num_joints_ ? joints_.size() / num_joints_ : 0; }
  std::size_t num_joints() const { return num_joints_; }

  std::span<const Joint> frame(std::size_t t) const {
    return {joints_.data() + t * num_joints_, num_joints_};
  }
  std::span<const Joint> joints() const { return joints_; }

  bool operator==(const PoseSequence&) const = default;

 private:
  std::string id_;
  std::optional<std::string> label_;
  double fps_ = 30.0;
  std::size_t num_joints_ = 0;
  std::vector<Joint> joints_;
};

struct FeaturizerConfig {
  std::size_t patch_len = 8;
  std::size_t stride = 8;
  bool scale_norm = true;

  // Throws invalid_input unless 0 < stride <= patch_len.
  void validate() const;

  bool operator==(const FeaturizerConfig&) const = default;
};

struct PatchFeature {
  std::vector<double> values;
  std::size_t patch_index = 0;
  std::size_t patch_len = 0;
};

using JointPair = std::pair<std::size_t, std::size_t>;

// Lexicographic (i, j), i < j. Feature vectors and codebook files rely on
// this order.
std::vector<JointPair> joint_pair_order(std::size_t num_joints);

std::size_t num_joint_pairs(std::size_t num_joints);

// Euclidean distance for every joint pair of one frame.
std::vector<double> pairwise_distances(std::span<const Joint> frame);

// Splits the sequence into floor((T - P) / stride) + 1 patches, each the
// concatenation of P per-frame distance vectors. With scale_norm, all values
// are divided by the mean pairwise distance over the whole sequence.
std::vector<PatchFeature> featurize_sequence(const PoseSequence& seq,
                                             const FeaturizerConfig& cfg);

std::size_t patch_count(std::size_t num_frames, const FeaturizerConfig& cfg);

}  // namespace motiondex
