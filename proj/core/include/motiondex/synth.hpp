#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "motiondex/codebook.hpp"
#include "motiondex/featurize.hpp"

namespace motiondex {

// Labelled token corpora with known class structure, for desk-scale
// experiments without real motion data.
struct SynthCorpusConfig {
  std::size_t n_classes = 10;
  std::size_t per_class = 20;
  std::size_t template_len = 40;
  std::size_t vocab = kDefaultVocabulary;
  double substitution_rate = 0.10;
  double insertion_rate = 0.05;
  double deletion_rate = 0.05;
  // Probability per token of a tempo event; half repeat the token, half drop it.
  double tempo_jitter = 0.0;
  // Each class alphabet is its own block of vocab / n_classes words widened
  // by this fraction into the next block.
  double overlap = 0.2;
  std::uint64_t seed = 0;

  void validate() const;
};

// Ids are "c<class>_m<member>" with zero padding; labels "class_<class>".
std::vector<TokenSequence> gen_synth_corpus(const SynthCorpusConfig& cfg);

// Word range [first, first + size) (mod vocab) a class draws from.
struct ClassAlphabet {
  std::size_t first = 0;
  std::size_t size = 0;
};
ClassAlphabet class_alphabet(const SynthCorpusConfig& cfg, std::size_t cls);

// Skeletons driven by class-specific joint oscillations. Every member gets a
// random rigid transform, performer scale, tempo factor and sensor noise.
struct SynthPoseConfig {
  std::size_t n_classes = 4;
  std::size_t per_class = 5;
  std::size_t num_frames = 64;
  std::size_t num_joints = 6;
  double fps = 30.0;
  double noise = 0.005;  // metres, per coordinate
  std::uint64_t seed = 0;

  void validate() const;
};

std::vector<PoseSequence> gen_synth_poses(const SynthPoseConfig& cfg);

// Isotropic Gaussian clusters in `dim` dimensions with centres drawn
// uniformly from [0, 1)^dim; patches are interleaved across clusters.
struct GaussianPatchConfig {
  std::size_t n_clusters = 128;
  std::size_t per_cluster = 10;
  std::size_t dim = 16;
  double spread = 0.02;
  std::uint64_t seed = 0;
};

std::vector<PatchFeature> gen_gaussian_patches(const GaussianPatchConfig& cfg);

}  // namespace motiondex
