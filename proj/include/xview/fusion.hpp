#pragma once

#include <Eigen/Core>
#include <vector>

namespace xview {

/// Per-column standardization: (x - mean) / population_std within each
/// column, i.e. within each sample's feature vector. Constant columns map
/// to all zeros. Requires at least 2 rows.
Eigen::MatrixXd zscore_columns(const Eigen::MatrixXd& m);

/// Per-column min-max rescaling to [0, 1]; constant columns map to 0.5.
Eigen::MatrixXd rescale_columns(const Eigen::MatrixXd& m);

/// Column-stacked heterogeneous training dictionary. Every column of X is
/// unit l2-norm; B is the C x n indicator matrix with B(i, j) = 1 iff
/// labels[j] == i.
struct FusedDictionary {
  Eigen::MatrixXd X;
  std::vector<int> labels;
  Eigen::MatrixXd B;
  int class_count = 0;

  Eigen::Index rows() const { return X.rows(); }
  Eigen::Index size() const { return X.cols(); }
};

/// C x n indicator matrix from labels in [0, C).
Eigen::MatrixXd class_indicator(const std::vector<int>& labels, int class_count);

/// Z-score then [0,1]-rescale each modality block independently, stack the
/// blocks row-wise, and normalize every fused column to unit l2 norm.
/// Single-block calls give the ablation path the same normalization.
FusedDictionary fuse_blocks(const std::vector<Eigen::MatrixXd>& blocks,
                            const std::vector<int>& labels, int class_count);

FusedDictionary fuse(const Eigen::MatrixXd& depth, const Eigen::MatrixXd& rgb,
                     const std::vector<int>& labels, int class_count);

/// Test-sample counterpart of fuse_blocks: each part is normalized within
/// itself (no reference to training statistics), concatenated, and the
/// result l2-normalized.
Eigen::VectorXd fuse_single_blocks(const std::vector<Eigen::VectorXd>& parts);

Eigen::VectorXd fuse_single(const Eigen::VectorXd& depth_vec, const Eigen::VectorXd& rgb_vec);

}  // namespace xview
