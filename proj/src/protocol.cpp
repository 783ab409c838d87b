#include "xview/protocol.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "xview/cr_classifier.hpp"
#include "xview/fusion.hpp"
#include "xview/matrix_io.hpp"
#include "xview/rng.hpp"
#include "xview/temporal_pyramid.hpp"

namespace xview {

namespace {

constexpr std::uint64_t kCodebookSeedTag = 0xcb;
constexpr std::uint64_t kNetSeedTag = 0x4e7;

void validate_params(const PipelineParams& p) {
  if (!(p.lambda > 0.0)) throw std::invalid_argument("params: lambda must be > 0");
  if (p.lambda1 < 0.0 || p.lambda1 > 1.0)
    throw std::invalid_argument("params: lambda1 must lie in [0, 1]");
  if (p.sparsity < 1) throw std::invalid_argument("params: sparsity must be >= 1");
  if (p.codebook_size < 1) throw std::invalid_argument("params: codebook size must be >= 1");
  if (p.ftp_levels < 1) throw std::invalid_argument("params: pyramid levels must be >= 1");
  if (p.ftp_coeffs < 1) throw std::invalid_argument("params: coefficient count must be >= 1");
  if (p.kmeans_max_iters < 1) throw std::invalid_argument("params: kmeans max iters must be >= 1");
  if (!(p.kmeans_tol >= 0.0)) throw std::invalid_argument("params: kmeans tol must be >= 0");
}

bool needs_depth(Modality m) { return m != Modality::kRgb; }
bool needs_rgb(Modality m) { return m != Modality::kDepth; }

/// Raw per-sample stream features, indexed by position in manifest.samples.
/// Only requested streams and samples are filled, so single-modality runs
/// never open the other stream's files.
struct FeatureCache {
  std::vector<Eigen::VectorXd> depth;
  std::vector<Eigen::VectorXd> rgb;
};

Eigen::VectorXd depth_stream_feature(const DatasetManifest& manifest, const SampleRecord& rec,
                                     const PipelineParams& params) {
  return depth_feature(read_matrix(manifest.resolve(rec.depth_path)), params.ftp_levels,
                       params.ftp_coeffs);
}

Eigen::VectorXd rgb_stream_feature(const DatasetManifest& manifest, const SampleRecord& rec,
                                   const Extractors& ex) {
  return extract_feature(ex.net,
                         bow_encode(read_matrix(manifest.resolve(rec.traj_path)), ex.codebook));
}

FeatureCache build_features(const DatasetManifest& manifest, const PipelineParams& params,
                            const Extractors* ex, bool want_depth, bool want_rgb,
                            const std::vector<std::size_t>& indices) {
  FeatureCache cache;
  if (want_depth) cache.depth.resize(manifest.samples.size());
  if (want_rgb) cache.rgb.resize(manifest.samples.size());
  Eigen::Index depth_len = -1;
  for (std::size_t i : indices) {
    const SampleRecord& rec = manifest.samples[i];
    if (want_depth) {
      cache.depth[i] = depth_stream_feature(manifest, rec, params);
      if (depth_len < 0) depth_len = cache.depth[i].size();
      if (cache.depth[i].size() != depth_len)
        throw std::invalid_argument("sample " + rec.id + ": depth feature length " +
                                    std::to_string(cache.depth[i].size()) +
                                    " does not match earlier samples (" +
                                    std::to_string(depth_len) + ")");
    }
    if (want_rgb) cache.rgb[i] = rgb_stream_feature(manifest, rec, *ex);
  }
  return cache;
}

std::vector<int> validate_split_request(const DatasetManifest& manifest,
                                        const std::vector<int>& train_views_in, int test_view) {
  if (train_views_in.empty()) throw std::invalid_argument("run_split: no training views given");
  std::vector<int> train_views = train_views_in;
  std::sort(train_views.begin(), train_views.end());
  if (std::adjacent_find(train_views.begin(), train_views.end()) != train_views.end())
    throw std::invalid_argument("run_split: duplicate training view");
  const auto known = [&](int v) {
    return std::find(manifest.views.begin(), manifest.views.end(), v) != manifest.views.end();
  };
  for (int v : train_views)
    if (!known(v))
      throw std::invalid_argument("run_split: training view " + std::to_string(v) +
                                  " is not in the manifest");
  if (!known(test_view))
    throw std::invalid_argument("run_split: test view " + std::to_string(test_view) +
                                " is not in the manifest");
  if (std::binary_search(train_views.begin(), train_views.end(), test_view))
    throw std::invalid_argument("run_split: test view " + std::to_string(test_view) +
                                " also appears among the training views");
  return train_views;
}

SplitRecord evaluate_split(const DatasetManifest& manifest, const FeatureCache& cache,
                           const std::vector<int>& train_views_in, int test_view,
                           const PipelineParams& params, Modality modality) {
  const std::vector<int> train_views = validate_split_request(manifest, train_views_in, test_view);

  std::vector<int> train_idx, test_idx;
  for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
    const int v = manifest.samples[i].view_index;
    if (v == test_view)
      test_idx.push_back(static_cast<int>(i));
    else if (std::binary_search(train_views.begin(), train_views.end(), v))
      train_idx.push_back(static_cast<int>(i));
  }
  if (train_idx.empty()) throw std::invalid_argument("run_split: empty training partition");
  if (test_idx.empty()) throw std::invalid_argument("run_split: empty test partition");

  std::vector<int> labels;
  labels.reserve(train_idx.size());
  for (int i : train_idx) labels.push_back(manifest.samples[i].class_index);

  std::vector<Eigen::MatrixXd> blocks;
  const auto gather = [&](const std::vector<Eigen::VectorXd>& stream) {
    Eigen::MatrixXd block(stream[train_idx[0]].size(), static_cast<Eigen::Index>(train_idx.size()));
    for (std::size_t j = 0; j < train_idx.size(); ++j) block.col(j) = stream[train_idx[j]];
    blocks.push_back(std::move(block));
  };
  if (needs_depth(modality)) gather(cache.depth);
  if (needs_rgb(modality)) gather(cache.rgb);

  FusedDictionary dict = fuse_blocks(blocks, labels, manifest.class_count);
  const int k = std::min(params.sparsity, static_cast<int>(dict.size()));
  const CrClassifier classifier(std::move(dict), params.lambda, params.lambda1, k);

  std::vector<int> predictions, truths;
  predictions.reserve(test_idx.size());
  truths.reserve(test_idx.size());
  std::vector<std::vector<int>> confusion(manifest.class_count,
                                          std::vector<int>(manifest.class_count, 0));
  for (int i : test_idx) {
    std::vector<Eigen::VectorXd> parts;
    if (needs_depth(modality)) parts.push_back(cache.depth[i]);
    if (needs_rgb(modality)) parts.push_back(cache.rgb[i]);
    const int predicted = classifier.classify(fuse_single_blocks(parts)).label;
    predictions.push_back(predicted);
    truths.push_back(manifest.samples[i].class_index);
    ++confusion[manifest.samples[i].class_index][predicted];
  }

  SplitRecord rec;
  rec.train_views = train_views;
  rec.test_view = test_view;
  rec.modality = modality_name(modality);
  rec.accuracy = compute_accuracy(predictions, truths);
  rec.confusion = std::move(confusion);
  return rec;
}

}  // namespace

std::string modality_name(Modality m) {
  switch (m) {
    case Modality::kDepth:
      return "depth";
    case Modality::kRgb:
      return "rgb";
    case Modality::kFused:
      return "fused";
  }
  throw std::invalid_argument("modality_name: unknown modality");
}

Modality modality_from_string(const std::string& name) {
  if (name == "depth") return Modality::kDepth;
  if (name == "rgb") return Modality::kRgb;
  if (name == "fused") return Modality::kFused;
  throw std::invalid_argument("unknown modality '" + name + "' (expected depth, rgb, or fused)");
}

PipelineParams benchmark_params() {
  PipelineParams p;
  p.codebook_size = 32;
  p.sparsity = 20;
  p.train.widths = {16, 16, 32, 32};
  // the 100x smaller network needs a hotter, longer, unregularized
  // schedule than the full-scale defaults: with width-16 layers, dropout
  // and weight decay pin the net at the mean predictor
  p.train.initial_lr = 0.1;
  p.train.lr_drop_every = 12000;
  p.train.total_iters = 12000;
  p.train.weight_decay = 0.0;
  p.train.dropout_rate = 0.0;
  return p;
}

std::vector<SplitSpec> protocol_combinations(const std::vector<int>& views) {
  if (views.size() < 3)
    throw std::invalid_argument("protocol_combinations: need at least 3 views");
  std::vector<int> sorted = views;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("protocol_combinations: duplicate view");

  std::vector<SplitSpec> combos;
  for (std::size_t i = 0; i < views.size(); ++i)
    for (std::size_t j = i + 1; j < views.size(); ++j)
      for (std::size_t t = 0; t < views.size(); ++t) {
        if (t == i || t == j) continue;
        combos.push_back({{views[i], views[j]}, views[t]});
      }
  return combos;
}

Codebook fit_codebook(const DatasetManifest& manifest, const PipelineParams& params) {
  validate_params(params);
  if (manifest.pretrain.empty())
    throw std::invalid_argument("fit_codebook: manifest has no pretrain corpus");

  std::vector<Eigen::MatrixXd> sets;
  sets.reserve(manifest.pretrain.size());
  Eigen::Index rows = 0;
  Eigen::Index dim = -1;
  for (const PretrainRecord& rec : manifest.pretrain) {
    Eigen::MatrixXd m = read_matrix(manifest.resolve(rec.traj_path));
    if (dim < 0) dim = m.cols();
    if (m.cols() != dim)
      throw std::invalid_argument("pretrain sample " + rec.id + ": trajectory dimension " +
                                  std::to_string(m.cols()) + " does not match earlier samples (" +
                                  std::to_string(dim) + ")");
    rows += m.rows();
    sets.push_back(std::move(m));
  }

  Eigen::MatrixXd points(rows, dim);
  Eigen::Index at = 0;
  for (const Eigen::MatrixXd& m : sets) {
    points.middleRows(at, m.rows()) = m;
    at += m.rows();
  }
  return kmeans_fit(points, params.codebook_size, mix_seed(params.seed, kCodebookSeedTag),
                    params.kmeans_max_iters, params.kmeans_tol);
}

NetworkParams train_network(const DatasetManifest& manifest, const PipelineParams& params,
                            const Codebook& codebook) {
  validate_params(params);
  if (manifest.pretrain.empty())
    throw std::invalid_argument("train_network: manifest has no pretrain corpus");

  std::vector<Eigen::VectorXd> histograms(manifest.pretrain.size());
  for (std::size_t i = 0; i < manifest.pretrain.size(); ++i)
    histograms[i] =
        bow_encode(read_matrix(manifest.resolve(manifest.pretrain[i].traj_path)), codebook);

  // canonical-view (view 0) records per class, in manifest order
  std::map<int, std::vector<int>> canonical;
  for (std::size_t i = 0; i < manifest.pretrain.size(); ++i)
    if (manifest.pretrain[i].view_index == 0)
      canonical[manifest.pretrain[i].class_index].push_back(static_cast<int>(i));

  // the j-th record of every (class, view) cell maps to the j-th
  // canonical-view record of its class
  std::vector<TrainingPair> pairs;
  pairs.reserve(manifest.pretrain.size());
  std::map<std::pair<int, int>, int> position;
  for (std::size_t i = 0; i < manifest.pretrain.size(); ++i) {
    const PretrainRecord& rec = manifest.pretrain[i];
    const auto it = canonical.find(rec.class_index);
    if (it == canonical.end())
      throw std::invalid_argument("train_network: class " + std::to_string(rec.class_index) +
                                  " has no canonical-view (view 0) pretrain records");
    const int j = position[{rec.class_index, rec.view_index}]++;
    const int target = it->second[static_cast<std::size_t>(j) % it->second.size()];
    pairs.push_back({histograms[i], histograms[target]});
  }

  return sgd_train(pairs, params.train, mix_seed(params.seed, kNetSeedTag)).params;
}

Extractors train_extractors(const DatasetManifest& manifest, const PipelineParams& params) {
  Extractors ex;
  ex.codebook = fit_codebook(manifest, params);
  ex.net = train_network(manifest, params, ex.codebook);
  return ex;
}

Eigen::VectorXd encode_sample(const DatasetManifest& manifest, const SampleRecord& sample,
                              const PipelineParams& params, const Extractors* extractors,
                              Modality modality) {
  validate_params(params);
  if (needs_rgb(modality) && extractors == nullptr)
    throw std::invalid_argument("encode_sample: rgb stream requires trained extractors");
  std::vector<Eigen::VectorXd> parts;
  if (needs_depth(modality)) parts.push_back(depth_stream_feature(manifest, sample, params));
  if (needs_rgb(modality)) parts.push_back(rgb_stream_feature(manifest, sample, *extractors));
  return fuse_single_blocks(parts);
}

SplitRecord run_split(const DatasetManifest& manifest, const std::vector<int>& train_views,
                      int test_view, const PipelineParams& params, const Extractors& extractors,
                      Modality modality) {
  validate_params(params);
  const std::vector<int> sorted = validate_split_request(manifest, train_views, test_view);
  std::vector<std::size_t> indices;
  for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
    const int v = manifest.samples[i].view_index;
    if (v == test_view || std::binary_search(sorted.begin(), sorted.end(), v))
      indices.push_back(i);
  }
  const FeatureCache cache = build_features(manifest, params, &extractors, needs_depth(modality),
                                            needs_rgb(modality), indices);
  return evaluate_split(manifest, cache, sorted, test_view, params, modality);
}

SplitRecord run_split(const DatasetManifest& manifest, const std::vector<int>& train_views,
                      int test_view, const PipelineParams& params, Modality modality) {
  validate_params(params);
  Extractors ex;
  if (needs_rgb(modality)) ex = train_extractors(manifest, params);
  return run_split(manifest, train_views, test_view, params, ex, modality);
}

EvaluationReport run_protocol(const DatasetManifest& manifest, const PipelineParams& params) {
  validate_params(params);
  const std::vector<SplitSpec> combos = protocol_combinations(manifest.views);
  const Extractors ex = train_extractors(manifest, params);

  std::vector<std::size_t> all(manifest.samples.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const FeatureCache cache = build_features(manifest, params, &ex, true, true, all);

  EvaluationReport report;
  report.protocol = "cross-view";
  report.params.lambda = params.lambda;
  report.params.lambda1 = params.lambda1;
  report.params.sparsity = params.sparsity;
  report.params.codebook_size = params.codebook_size;
  report.params.widths = params.train.widths;
  report.params.seed = params.seed;
  report.params.ftp_levels = params.ftp_levels;
  report.params.ftp_coeffs = params.ftp_coeffs;

  constexpr std::array<Modality, 3> kModalities{Modality::kDepth, Modality::kRgb, Modality::kFused};
  std::array<double, 3> sums{0.0, 0.0, 0.0};
  for (const SplitSpec& combo : combos)
    for (std::size_t m = 0; m < kModalities.size(); ++m) {
      report.combinations.push_back(
          evaluate_split(manifest, cache, combo.train_views, combo.test_view, params,
                         kModalities[m]));
      sums[m] += report.combinations.back().accuracy;
    }

  std::array<double, 3> means{};
  for (std::size_t m = 0; m < kModalities.size(); ++m) {
    means[m] = sums[m] / static_cast<double>(combos.size());
    report.modality_means.emplace_back(modality_name(kModalities[m]), means[m]);
  }
  report.fused_minus_best_single = means[2] - std::max(means[0], means[1]);
  return report;
}

double compute_accuracy(const std::vector<int>& predictions, const std::vector<int>& truths) {
  if (predictions.empty() || predictions.size() != truths.size())
    throw std::invalid_argument(
        "compute_accuracy: prediction and truth lists must have equal nonzero length");
  int correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i)
    if (predictions[i] == truths[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

}  // namespace xview
