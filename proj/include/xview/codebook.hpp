#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace xview {

/// K-means centroids over trajectory descriptors, one centroid per column.
struct Codebook {
  Eigen::MatrixXd centroids;  // descriptor_dim x size

  int size() const { return static_cast<int>(centroids.cols()); }
  int dim() const { return static_cast<int>(centroids.rows()); }
};

/// Per-iteration within-cluster sum of squared distances, recorded after
/// each assignment step. Non-increasing by construction of Lloyd's loop.
struct KmeansTrace {
  std::vector<double> objective;
  int iterations = 0;
  bool converged = false;
};

/// Seeded k-means++ choice of k initial centroids from the m x p point set
/// (rows are points). Deterministic for a fixed (points, k, seed).
Eigen::MatrixXd kmeans_pp_init(const Eigen::MatrixXd& points, int k, std::uint64_t seed);

/// Lloyd's algorithm from a k-means++ start. Ties in assignment go to the
/// lowest centroid index; empty clusters are reseeded with the point
/// farthest from its assigned centroid. Terminates when the largest
/// centroid displacement drops below `tol` or after `max_iters` rounds.
Codebook kmeans_fit(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                    int max_iters = 100, double tol = 1e-6,
                    KmeansTrace* trace = nullptr);

/// Index of the centroid nearest to v in Euclidean distance, lowest index
/// on ties.
int nearest_centroid(const Eigen::VectorXd& v, const Codebook& codebook);

/// L1-normalized histogram of nearest-centroid hits over the rows of an
/// m x p trajectory set. Entries are non-negative and sum to 1.
Eigen::VectorXd bow_encode(const Eigen::MatrixXd& trajectories, const Codebook& codebook);

}  // namespace xview
