#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>

#include "xview/manifest.hpp"

namespace xview {

/// Configuration of the synthetic multi-view benchmark. Defaults are the
/// desk-scale benchmark settings used throughout the test suite.
struct SynthConfig {
  int classes = 5;
  int views = 4;
  int samples_per_cell = 8;  // per (class, view)
  int depth_dim = 32;
  int frames = 16;
  int trajectories_per_video = 40;
  int traj_dim = 6;
  double separation = 3.0;   // class prototype scale
  double noise_sigma = 1.6;  // per-entry Gaussian noise
  std::uint64_t seed = 7;
  int pretrain_per_cell = 8;  // auxiliary corpus size per (class, view)
};

/// Deterministic orthogonal dim x dim matrix for one viewpoint: modified
/// Gram-Schmidt on a seeded Gaussian matrix with the diagonal sign fixed.
/// View 0 is the identity (the canonical, frontal view).
Eigen::MatrixXd make_view_transform(int view, int dim, std::uint64_t seed);

/// Generates the benchmark under `out_dir`: per-sample depth sequences and
/// trajectory sets, an auxiliary pretraining trajectory corpus, and
/// manifest.json tying them together. Byte-identical output for a fixed
/// (config, seed); per-sample streams are derived independently so that
/// growing the dataset never changes previously generated files.
DatasetManifest generate_dataset(const SynthConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace xview
