#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xview/codebook.hpp"
#include "xview/manifest.hpp"
#include "xview/report.hpp"
#include "xview/view_transfer_net.hpp"

namespace xview {

/// Which feature stream feeds the classifier. Depth is the Fourier
/// temporal pyramid of the depth sequence; rgb is the view-transfer
/// network feature of the trajectory histogram; fused stacks both.
enum class Modality { kDepth, kRgb, kFused };

std::string modality_name(Modality m);
Modality modality_from_string(const std::string& name);

/// Every knob of the pipeline in one place. All randomness (codebook
/// seeding, network initialization, batch shuffling) derives from `seed`.
struct PipelineParams {
  double lambda = 0.01;    // ridge regularizer
  double lambda1 = 0.35;   // sparse/dense mixing weight
  int sparsity = 50;       // OMP support bound, clamped to the dictionary size per split
  int codebook_size = 2000;
  int ftp_levels = 3;
  int ftp_coeffs = 4;
  int kmeans_max_iters = 100;
  double kmeans_tol = 1e-6;
  TrainConfig train;
  std::uint64_t seed = 7;
};

/// Desk-scale parameters (small codebook and network) so the full
/// cross-view protocol finishes in seconds on the synthetic benchmark.
PipelineParams benchmark_params();

struct SplitSpec {
  std::vector<int> train_views;
  int test_view = 0;
};

/// Every unordered pair of training views, in lexicographic order, crossed
/// with every remaining view as the test view in ascending order:
/// C(V,2) x (V-2) combinations. Requires at least 3 distinct views.
std::vector<SplitSpec> protocol_combinations(const std::vector<int>& views);

/// Split-independent trained feature extractors for the rgb stream, both
/// fitted on the manifest's pretrain corpus: the trajectory codebook and
/// the view-transfer network mapping each pretrain histogram to its
/// canonical-view (view 0) partner of the same class and position.
struct Extractors {
  Codebook codebook;
  NetworkParams net;
};

Codebook fit_codebook(const DatasetManifest& manifest, const PipelineParams& params);
NetworkParams train_network(const DatasetManifest& manifest, const PipelineParams& params,
                            const Codebook& codebook);
Extractors train_extractors(const DatasetManifest& manifest, const PipelineParams& params);

/// Per-sample feature column exactly as the classifier sees it: the
/// modality's block(s) standardized and rescaled within the vector,
/// stacked, and l2-normalized. Extractors may be null for depth.
Eigen::VectorXd encode_sample(const DatasetManifest& manifest, const SampleRecord& sample,
                              const PipelineParams& params, const Extractors* extractors,
                              Modality modality);

/// Evaluates one (train views, test view) split in one modality with
/// already-trained extractors: builds the fused dictionary from the
/// training views, classifies every test-view sample, and reports the
/// accuracy and confusion matrix (row = true class, column = predicted).
SplitRecord run_split(const DatasetManifest& manifest, const std::vector<int>& train_views,
                      int test_view, const PipelineParams& params, const Extractors& extractors,
                      Modality modality);

/// Standalone variant that trains exactly the extractors the modality
/// needs; a depth-only run opens no trajectory file and an rgb-only run
/// opens no depth file.
SplitRecord run_split(const DatasetManifest& manifest, const std::vector<int>& train_views,
                      int test_view, const PipelineParams& params, Modality modality);

/// Full protocol: all view combinations, each evaluated in all three
/// modalities, plus per-modality mean accuracies and the fused-vs-best-
/// single-modality delta. Deterministic per (manifest, params).
EvaluationReport run_protocol(const DatasetManifest& manifest, const PipelineParams& params);

/// Fraction of positions where prediction equals truth.
double compute_accuracy(const std::vector<int>& predictions, const std::vector<int>& truths);

}  // namespace xview
