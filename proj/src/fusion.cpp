#include "xview/fusion.hpp"

#include <cmath>
#include <stdexcept>

namespace xview {

Eigen::MatrixXd zscore_columns(const Eigen::MatrixXd& m) {
  if (m.rows() < 2) throw std::invalid_argument("zscore_columns: need at least 2 rows");
  if (!m.allFinite()) throw std::invalid_argument("zscore_columns: non-finite entries");

  Eigen::MatrixXd out(m.rows(), m.cols());
  const double n = static_cast<double>(m.rows());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const double mean = m.col(c).mean();
    const double var = (m.col(c).array() - mean).square().sum() / n;
    if (var > 0.0)
      out.col(c) = (m.col(c).array() - mean) / std::sqrt(var);
    else
      out.col(c).setZero();  // constant column
  }
  return out;
}

Eigen::MatrixXd rescale_columns(const Eigen::MatrixXd& m) {
  if (m.rows() < 1 || m.cols() < 1) throw std::invalid_argument("rescale_columns: empty matrix");
  if (!m.allFinite()) throw std::invalid_argument("rescale_columns: non-finite entries");

  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const double lo = m.col(c).minCoeff();
    const double hi = m.col(c).maxCoeff();
    if (hi > lo)
      out.col(c) = (m.col(c).array() - lo) / (hi - lo);
    else
      out.col(c).setConstant(0.5);  // constant column: midpoint
  }
  return out;
}

Eigen::MatrixXd class_indicator(const std::vector<int>& labels, int class_count) {
  if (class_count < 1) throw std::invalid_argument("class_indicator: class_count must be >= 1");
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(class_count, static_cast<Eigen::Index>(labels.size()));
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (labels[j] < 0 || labels[j] >= class_count)
      throw std::invalid_argument("class_indicator: label " + std::to_string(labels[j]) +
                                  " out of range [0, " + std::to_string(class_count) + ")");
    b(labels[j], static_cast<Eigen::Index>(j)) = 1.0;
  }
  return b;
}

FusedDictionary fuse_blocks(const std::vector<Eigen::MatrixXd>& blocks,
                            const std::vector<int>& labels, int class_count) {
  if (blocks.empty()) throw std::invalid_argument("fuse: no feature blocks");
  const Eigen::Index n = blocks[0].cols();
  if (n < 1) throw std::invalid_argument("fuse: no samples");
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw std::invalid_argument("fuse: label count does not match sample count");

  Eigen::Index total_rows = 0;
  for (const auto& b : blocks) {
    if (b.cols() != n) throw std::invalid_argument("fuse: modality column counts differ");
    total_rows += b.rows();
  }

  FusedDictionary dict;
  dict.X.resize(total_rows, n);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    dict.X.middleRows(at, b.rows()) = rescale_columns(zscore_columns(b));
    at += b.rows();
  }
  for (Eigen::Index c = 0; c < n; ++c) {
    const double norm = dict.X.col(c).norm();
    if (norm > 0.0) dict.X.col(c) /= norm;
  }
  dict.labels = labels;
  dict.class_count = class_count;
  dict.B = class_indicator(labels, class_count);
  return dict;
}

FusedDictionary fuse(const Eigen::MatrixXd& depth, const Eigen::MatrixXd& rgb,
                     const std::vector<int>& labels, int class_count) {
  return fuse_blocks({depth, rgb}, labels, class_count);
}

Eigen::VectorXd fuse_single_blocks(const std::vector<Eigen::VectorXd>& parts) {
  if (parts.empty()) throw std::invalid_argument("fuse_single: no parts");
  Eigen::Index total = 0;
  for (const auto& p : parts) total += p.size();
  if (total < 1) throw std::invalid_argument("fuse_single: empty parts");

  Eigen::VectorXd y(total);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    y.segment(at, p.size()) = rescale_columns(zscore_columns(p)).col(0);
    at += p.size();
  }
  const double norm = y.norm();
  if (norm > 0.0) y /= norm;
  return y;
}

Eigen::VectorXd fuse_single(const Eigen::VectorXd& depth_vec, const Eigen::VectorXd& rgb_vec) {
  return fuse_single_blocks({depth_vec, rgb_vec});
}

}  // namespace xview
