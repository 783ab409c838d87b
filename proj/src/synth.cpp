#include "xview/synth.hpp"

#include <cmath>
#include <stdexcept>

#include "xview/matrix_io.hpp"
#include "xview/rng.hpp"

namespace xview {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// stream tags; every random draw descends from (seed, tag, indices)
constexpr std::uint64_t kDepthProtoTag = 0xd0;
constexpr std::uint64_t kModulationTag = 0x30d;
constexpr std::uint64_t kTrajCenterTag = 0x7c;
constexpr std::uint64_t kDepthViewTag = 0xd7;
constexpr std::uint64_t kTrajViewTag = 0x77;
constexpr std::uint64_t kSampleTag = 0x5a;
constexpr std::uint64_t kPretrainTag = 0x9e;
constexpr std::uint64_t kViewGaussTag = 0x96;

constexpr int kTrajClustersPerClass = 3;

void check_config(const SynthConfig& cfg) {
  if (cfg.classes < 1 || cfg.views < 1 || cfg.samples_per_cell < 1 || cfg.depth_dim < 1 ||
      cfg.frames < 1 || cfg.trajectories_per_video < 1 || cfg.traj_dim < 1 ||
      cfg.pretrain_per_cell < 1)
    throw std::invalid_argument("synth: all counts and dimensions must be positive");
  if (!(cfg.separation > 0.0)) throw std::invalid_argument("synth: separation must be > 0");
  if (cfg.noise_sigma < 0.0) throw std::invalid_argument("synth: noise sigma must be >= 0");
}

Eigen::VectorXd gaussian_vector(Rng& rng, int dim, double scale) {
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = scale * rng.gaussian();
  return v;
}

// Smooth per-class temporal envelope: one zero-mean sinusoid whose
// frequency is keyed to the class. The spatial view rotation mixes the
// feature rows but scales every row's spectrum by the same class
// signature, so the signature survives the view change.
struct Modulation {
  int freq;
  double phase;

  double at(int t, int frames) const {
    return std::sin(kTwoPi * freq * (t + 0.5) / frames + phase);
  }
};

Modulation class_modulation(int class_index, std::uint64_t seed) {
  Rng rng(mix_seed(seed, {kModulationTag, static_cast<std::uint64_t>(class_index)}));
  return Modulation{1 + class_index, rng.uniform(0.0, kTwoPi)};
}

Eigen::MatrixXd depth_sequence(const SynthConfig& cfg, const Eigen::VectorXd& prototype,
                               const Modulation& mod, const Eigen::MatrixXd& view_transform,
                               Rng& noise) {
  Eigen::MatrixXd seq(cfg.depth_dim, cfg.frames);
  for (int t = 0; t < cfg.frames; ++t) {
    Eigen::VectorXd col = prototype * mod.at(t, cfg.frames);
    for (int i = 0; i < cfg.depth_dim; ++i) col(i) += cfg.noise_sigma * noise.gaussian();
    seq.col(t) = view_transform * col;
  }
  return seq;
}

Eigen::MatrixXd trajectory_set(const SynthConfig& cfg, const Eigen::MatrixXd& centers,
                               const Eigen::MatrixXd& view_transform, Rng& noise) {
  Eigen::MatrixXd rows(cfg.trajectories_per_video, cfg.traj_dim);
  for (int i = 0; i < cfg.trajectories_per_video; ++i) {
    // deterministic round-robin over mixture centers: with zero noise every
    // sample of a (class, view) cell is identical
    Eigen::VectorXd x = view_transform * centers.col(i % kTrajClustersPerClass);
    for (int d = 0; d < cfg.traj_dim; ++d) x(d) += cfg.noise_sigma * noise.gaussian();
    rows.row(i) = x.transpose();
  }
  return rows;
}

}  // namespace

Eigen::MatrixXd make_view_transform(int view, int dim, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("make_view_transform: dim must be >= 1");
  if (view < 0) throw std::invalid_argument("make_view_transform: negative view");
  if (view == 0) return Eigen::MatrixXd::Identity(dim, dim);

  Rng rng(mix_seed(seed, {kViewGaussTag, static_cast<std::uint64_t>(view),
                          static_cast<std::uint64_t>(dim)}));
  Eigen::MatrixXd a(dim, dim);
  for (int c = 0; c < dim; ++c)
    for (int r = 0; r < dim; ++r) a(r, c) = rng.gaussian();

  // modified Gram-Schmidt, diagonal sign fixed so the factorization (and
  // thus the output) is unique
  Eigen::MatrixXd q(dim, dim);
  for (int c = 0; c < dim; ++c) {
    Eigen::VectorXd v = a.col(c);
    for (int p = 0; p < c; ++p) v -= q.col(p).dot(v) * q.col(p);
    double norm = v.norm();
    while (norm < 1e-12) {  // astronomically unlikely; redraw keeps the contract
      for (int r = 0; r < dim; ++r) v(r) = rng.gaussian();
      for (int p = 0; p < c; ++p) v -= q.col(p).dot(v) * q.col(p);
      norm = v.norm();
    }
    const double sign = a.col(c).dot(v) >= 0.0 ? 1.0 : -1.0;
    q.col(c) = sign * v / norm;
  }
  return q;
}

DatasetManifest generate_dataset(const SynthConfig& cfg, const std::filesystem::path& out_dir) {
  check_config(cfg);
  std::filesystem::create_directories(out_dir / "samples");
  std::filesystem::create_directories(out_dir / "pretrain");

  // class-level draws
  std::vector<Eigen::VectorXd> prototypes;
  std::vector<Modulation> modulations;
  std::vector<Eigen::MatrixXd> traj_centers;
  for (int c = 0; c < cfg.classes; ++c) {
    Rng proto_rng(mix_seed(cfg.seed, {kDepthProtoTag, static_cast<std::uint64_t>(c)}));
    prototypes.push_back(gaussian_vector(proto_rng, cfg.depth_dim, cfg.separation));
    modulations.push_back(class_modulation(c, cfg.seed));
    Rng center_rng(mix_seed(cfg.seed, {kTrajCenterTag, static_cast<std::uint64_t>(c)}));
    Eigen::MatrixXd centers(cfg.traj_dim, kTrajClustersPerClass);
    for (int j = 0; j < kTrajClustersPerClass; ++j)
      centers.col(j) = gaussian_vector(center_rng, cfg.traj_dim, cfg.separation);
    traj_centers.push_back(std::move(centers));
  }

  std::vector<Eigen::MatrixXd> depth_views, traj_views;
  for (int v = 0; v < cfg.views; ++v) {
    depth_views.push_back(make_view_transform(v, cfg.depth_dim, mix_seed(cfg.seed, kDepthViewTag)));
    traj_views.push_back(make_view_transform(v, cfg.traj_dim, mix_seed(cfg.seed, kTrajViewTag)));
  }

  DatasetManifest manifest;
  manifest.base_dir = out_dir;
  manifest.class_count = cfg.classes;
  for (int v = 0; v < cfg.views; ++v) manifest.views.push_back(v);

  for (int c = 0; c < cfg.classes; ++c) {
    for (int v = 0; v < cfg.views; ++v) {
      for (int s = 0; s < cfg.samples_per_cell; ++s) {
        Rng noise(mix_seed(cfg.seed, {kSampleTag, static_cast<std::uint64_t>(c),
                                      static_cast<std::uint64_t>(v),
                                      static_cast<std::uint64_t>(s)}));
        const std::string stem =
            "c" + std::to_string(c) + "_v" + std::to_string(v) + "_s" + std::to_string(s);
        SampleRecord rec;
        rec.id = stem;
        rec.class_index = c;
        rec.view_index = v;
        rec.depth_path = "samples/" + stem + "_depth.mat";
        rec.traj_path = "samples/" + stem + "_traj.mat";
        write_matrix(depth_sequence(cfg, prototypes[c], modulations[c], depth_views[v], noise),
                     out_dir / rec.depth_path);
        write_matrix(trajectory_set(cfg, traj_centers[c], traj_views[v], noise),
                     out_dir / rec.traj_path);
        manifest.samples.push_back(std::move(rec));
      }
    }
  }

  // auxiliary corpus for codebook fitting and view-transfer training;
  // (c, v, j) pairs with (c, 0, j)
  for (int c = 0; c < cfg.classes; ++c) {
    for (int v = 0; v < cfg.views; ++v) {
      for (int j = 0; j < cfg.pretrain_per_cell; ++j) {
        Rng noise(mix_seed(cfg.seed, {kPretrainTag, static_cast<std::uint64_t>(c),
                                      static_cast<std::uint64_t>(v),
                                      static_cast<std::uint64_t>(j)}));
        const std::string stem =
            "pre_c" + std::to_string(c) + "_v" + std::to_string(v) + "_p" + std::to_string(j);
        PretrainRecord rec;
        rec.id = stem;
        rec.class_index = c;
        rec.view_index = v;
        rec.traj_path = "pretrain/" + stem + "_traj.mat";
        write_matrix(trajectory_set(cfg, traj_centers[c], traj_views[v], noise),
                     out_dir / rec.traj_path);
        manifest.pretrain.push_back(std::move(rec));
      }
    }
  }

  save_manifest(manifest, out_dir / "manifest.json");
  return manifest;
}

}  // namespace xview
