#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

namespace xview {

/// Fourier Temporal Pyramid over a per-frame feature matrix (rows = feature
/// dimensions, columns = frames). Level l splits the frame axis into
/// 2^(l-1) contiguous groups by recursive halving; each group contributes
/// the magnitudes of its first `coeffs` DFT coefficients (DC first,
/// zero-padded when the group is shorter than `coeffs`).

/// Number of groups across all levels: 1 + 2 + ... + 2^(levels-1).
int pyramid_group_count(int levels);

/// Columns of the encoded descriptor: group count times `coeffs`.
int pyramid_output_cols(int levels, int coeffs);

/// (start, length) of every group in level-major, left-to-right order.
/// Odd lengths split ceil-first: a 5-frame span halves into 3 + 2.
std::vector<std::pair<int, int>> pyramid_groups(int frames, int levels);

/// Encodes a d x f sequence into a d x pyramid_output_cols(levels, coeffs)
/// descriptor. Rows are processed independently; entries are DFT magnitudes
/// and therefore non-negative.
Eigen::MatrixXd ftp_encode(const Eigen::MatrixXd& seq, int levels = 3, int coeffs = 4);

/// Column-major stacking of a descriptor into a single vector.
Eigen::VectorXd vectorize_descriptor(const Eigen::MatrixXd& desc);

/// vectorize_descriptor(ftp_encode(seq)) — the depth-stream feature of one
/// video.
Eigen::VectorXd depth_feature(const Eigen::MatrixXd& seq, int levels = 3, int coeffs = 4);

}  // namespace xview
