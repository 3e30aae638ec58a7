#include "motiondex/synth.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "motiondex/error.hpp"
#include "motiondex/random.hpp"

namespace motiondex {

namespace {

std::string padded(std::size_t value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*zu", width, value);
  return buf;
}

int digits(std::size_t n) {
  int d = 1;
  while (n >= 10) {
    n /= 10;
    ++d;
  }
  return d;
}

}  // namespace

void SynthCorpusConfig::validate() const {
  if (n_classes == 0 || per_class == 0) raise(Errc::invalid_input, "corpus needs classes and members");
  if (n_classes * per_class < 2) raise(Errc::invalid_input, "corpus needs at least two sequences");
  if (template_len == 0) raise(Errc::invalid_input, "template_len must be positive");
  if (vocab < n_classes) raise(Errc::invalid_input, "vocabulary smaller than the number of classes");
  for (double r : {substitution_rate, insertion_rate, deletion_rate, tempo_jitter}) {
    if (!(r >= 0.0 && r < 1.0)) raise(Errc::invalid_input, "noise rates must lie in [0, 1)");
  }
  if (!(substitution_rate + insertion_rate + deletion_rate < 1.0)) {
    raise(Errc::invalid_input, "substitution, insertion and deletion rates must sum below 1");
  }
  if (!(overlap >= 0.0 && overlap <= 1.0)) raise(Errc::invalid_input, "overlap must lie in [0, 1]");
}

ClassAlphabet class_alphabet(const SynthCorpusConfig& cfg, std::size_t cls) {
  const std::size_t block = cfg.vocab / cfg.n_classes;
  const auto widen = static_cast<std::size_t>(std::floor(cfg.overlap * static_cast<double>(block)));
  return {cls * block, std::min(block + widen, cfg.vocab)};
}

std::vector<TokenSequence> gen_synth_corpus(const SynthCorpusConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  std::vector<TokenSequence> corpus;
  corpus.reserve(cfg.n_classes * cfg.per_class);
  const int class_w = digits(cfg.n_classes - 1);
  const int member_w = digits(cfg.per_class - 1);

  for (std::size_t c = 0; c < cfg.n_classes; ++c) {
    const ClassAlphabet alpha = class_alphabet(cfg, c);
    const auto draw = [&] { return static_cast<Word>((alpha.first + rng.uniform_index(alpha.size)) % cfg.vocab); };

    std::vector<Word> tmpl(cfg.template_len);
    for (auto& w : tmpl) w = draw();

    for (std::size_t m = 0; m < cfg.per_class; ++m) {
      std::vector<Word> edited;
      edited.reserve(tmpl.size() * 2);
      for (Word w : tmpl) {
        const double u = rng.uniform01();
        if (u < cfg.deletion_rate) {
          // dropped
        } else if (u < cfg.deletion_rate + cfg.substitution_rate) {
          edited.push_back(draw());
        } else {
          edited.push_back(w);
        }
        if (rng.bernoulli(cfg.insertion_rate)) edited.push_back(draw());
      }

      std::vector<Word> words;
      words.reserve(edited.size() * 2);
      for (Word w : edited) {
        const double v = rng.uniform01();
        if (v < 0.5 * cfg.tempo_jitter) {
          words.push_back(w);
          words.push_back(w);
        } else if (v >= cfg.tempo_jitter) {
          words.push_back(w);
        }
      }
      if (words.empty()) words.push_back(tmpl.front());

      corpus.push_back({"c" + padded(c, class_w) + "_m" + padded(m, member_w),
                        "class_" + padded(c, class_w), std::move(words)});
    }
  }
  return corpus;
}

void SynthPoseConfig::validate() const {
  if (n_classes == 0 || per_class == 0) raise(Errc::invalid_input, "pose corpus needs classes and members");
  if (num_frames == 0) raise(Errc::invalid_input, "num_frames must be positive");
  if (num_joints < 2) raise(Errc::invalid_input, "num_joints must be at least 2");
  if (!(fps > 0.0)) raise(Errc::invalid_input, "fps must be positive");
  if (!(noise >= 0.0)) raise(Errc::invalid_input, "noise must be non-negative");
}

std::vector<PoseSequence> gen_synth_poses(const SynthPoseConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const std::size_t V = cfg.num_joints;
  const int class_w = digits(cfg.n_classes - 1);
  const int member_w = digits(cfg.per_class - 1);

  struct Oscillator {
    double amplitude, frequency, phase;
  };
  std::vector<PoseSequence> out;
  out.reserve(cfg.n_classes * cfg.per_class);

  for (std::size_t c = 0; c < cfg.n_classes; ++c) {
    std::vector<Joint> rest(V);
    for (auto& j : rest) {
      for (double& x : j) x = rng.uniform(-0.5, 0.5);
    }
    std::vector<Oscillator> osc(V * 3);
    for (auto& o : osc) o = {rng.uniform(0.05, 0.3), rng.uniform(0.5, 2.5), rng.uniform(0.0, two_pi)};

    for (std::size_t m = 0; m < cfg.per_class; ++m) {
      const double yaw = rng.uniform(0.0, two_pi);
      const double cy = std::cos(yaw), sy = std::sin(yaw);
      const Joint shift = {rng.uniform(-2.0, 2.0), rng.uniform(-0.2, 0.2), rng.uniform(-2.0, 2.0)};
      const double scale = rng.uniform(0.8, 1.2);
      const double tempo = rng.uniform(0.9, 1.1);

      std::vector<Joint> joints;
      joints.reserve(cfg.num_frames * V);
      for (std::size_t t = 0; t < cfg.num_frames; ++t) {
        const double time = static_cast<double>(t) / cfg.fps * tempo;
        for (std::size_t v = 0; v < V; ++v) {
          Joint local;
          for (std::size_t a = 0; a < 3; ++a) {
            const Oscillator& o = osc[v * 3 + a];
            local[a] = scale * (rest[v][a] + o.amplitude * std::sin(two_pi * o.frequency * time + o.phase));
          }
          Joint world = {cy * local[0] + sy * local[2], local[1], -sy * local[0] + cy * local[2]};
          for (std::size_t a = 0; a < 3; ++a) world[a] += shift[a] + cfg.noise * rng.normal();
          joints.push_back(world);
        }
      }
      out.emplace_back("p" + padded(c, class_w) + "_m" + padded(m, member_w),
                       "class_" + padded(c, class_w), cfg.fps, V, std::move(joints));
    }
  }
  return out;
}

std::vector<PatchFeature> gen_gaussian_patches(const GaussianPatchConfig& cfg) {
  if (cfg.n_clusters == 0 || cfg.per_cluster == 0 || cfg.dim == 0) {
    raise(Errc::invalid_input, "gaussian patch config needs clusters, members and a dimension");
  }
  Rng rng(cfg.seed);
  std::vector<std::vector<double>> centres(cfg.n_clusters, std::vector<double>(cfg.dim));
  for (auto& c : centres) {
    for (double& x : c) x = rng.uniform01();
  }
  std::vector<PatchFeature> patches;
  patches.reserve(cfg.n_clusters * cfg.per_cluster);
  for (std::size_t i = 0; i < cfg.per_cluster; ++i) {
    for (const auto& c : centres) {
      PatchFeature p;
      p.patch_index = patches.size();
      p.patch_len = 1;
      p.values.reserve(cfg.dim);
      for (double x : c) p.values.push_back(x + cfg.spread * rng.normal());
      patches.push_back(std::move(p));
    }
  }
  return patches;
}

}  // namespace motiondex
