#include "xview/codebook.hpp"

#include <limits>
#include <stdexcept>

#include "xview/rng.hpp"

namespace xview {

namespace {

void check_points(const Eigen::MatrixXd& points, int k) {
  if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
  if (points.rows() < k)
    throw std::invalid_argument("kmeans: need at least k points, have " +
                                std::to_string(points.rows()));
  if (!points.allFinite()) throw std::invalid_argument("kmeans: non-finite points");
}

int nearest_column(const Eigen::VectorXd& v, const Eigen::MatrixXd& centroids) {
  int best = 0;
  double best_d2 = (centroids.col(0) - v).squaredNorm();
  for (int j = 1; j < centroids.cols(); ++j) {
    const double d2 = (centroids.col(j) - v).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = j;
    }
  }
  return best;
}

}  // namespace

Eigen::MatrixXd kmeans_pp_init(const Eigen::MatrixXd& points, int k, std::uint64_t seed) {
  check_points(points, k);
  const auto m = points.rows();
  Rng rng(seed);
  Eigen::MatrixXd centroids(points.cols(), k);

  centroids.col(0) = points.row(static_cast<Eigen::Index>(rng.below(m))).transpose();

  Eigen::VectorXd d2(m);
  for (Eigen::Index i = 0; i < m; ++i)
    d2(i) = (points.row(i).transpose() - centroids.col(0)).squaredNorm();

  for (int j = 1; j < k; ++j) {
    const double total = d2.sum();
    Eigen::Index chosen = -1;
    if (total > 0.0) {
      // sample proportionally to squared distance, walking in index order
      const double r = rng.uniform() * total;
      double cum = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        cum += d2(i);
        if (cum > r) {
          chosen = i;
          break;
        }
      }
      if (chosen < 0) {  // fp slack at the tail: last point with mass
        for (Eigen::Index i = m - 1; i >= 0; --i)
          if (d2(i) > 0.0) {
            chosen = i;
            break;
          }
      }
    }
    if (chosen < 0) {
      // all remaining mass is zero (duplicate-heavy input); take the first
      // point that is not already a centroid, else point j
      chosen = j < m ? j : 0;
    }
    centroids.col(j) = points.row(chosen).transpose();
    for (Eigen::Index i = 0; i < m; ++i) {
      const double d = (points.row(i).transpose() - centroids.col(j)).squaredNorm();
      if (d < d2(i)) d2(i) = d;
    }
  }
  return centroids;
}

Codebook kmeans_fit(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                    int max_iters, double tol, KmeansTrace* trace) {
  check_points(points, k);
  if (max_iters < 1) throw std::invalid_argument("kmeans: max_iters must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("kmeans: tol must be > 0");

  const auto m = points.rows();
  Eigen::MatrixXd centroids = kmeans_pp_init(points, k, seed);
  std::vector<int> assignment(m, 0);
  if (trace) *trace = {};

  for (int iter = 0; iter < max_iters; ++iter) {
    double objective = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      assignment[i] = nearest_column(points.row(i).transpose(), centroids);
      objective += (points.row(i).transpose() - centroids.col(assignment[i])).squaredNorm();
    }
    if (trace) {
      trace->objective.push_back(objective);
      trace->iterations = iter + 1;
    }

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(centroids.rows(), k);
    std::vector<int> counts(k, 0);
    for (Eigen::Index i = 0; i < m; ++i) {
      sums.col(assignment[i]) += points.row(i).transpose();
      ++counts[assignment[i]];
    }

    Eigen::MatrixXd next = centroids;
    for (int j = 0; j < k; ++j)
      if (counts[j] > 0) next.col(j) = sums.col(j) / counts[j];

    // reseed empty clusters, each with the currently farthest point
    std::vector<char> taken(m, 0);
    for (int j = 0; j < k; ++j) {
      if (counts[j] > 0) continue;
      Eigen::Index far = -1;
      double far_d2 = -1.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (taken[i]) continue;
        const double d = (points.row(i).transpose() - centroids.col(assignment[i])).squaredNorm();
        if (d > far_d2) {
          far_d2 = d;
          far = i;
        }
      }
      if (far >= 0) {
        next.col(j) = points.row(far).transpose();
        taken[far] = 1;
      }
    }

    double max_shift = 0.0;
    for (int j = 0; j < k; ++j)
      max_shift = std::max(max_shift, (next.col(j) - centroids.col(j)).norm());
    centroids = next;
    if (max_shift < tol) {
      if (trace) trace->converged = true;
      break;
    }
  }
  return Codebook{std::move(centroids)};
}

int nearest_centroid(const Eigen::VectorXd& v, const Codebook& codebook) {
  if (codebook.size() < 1) throw std::invalid_argument("nearest_centroid: empty codebook");
  if (v.size() != codebook.centroids.rows())
    throw std::invalid_argument("nearest_centroid: dimension mismatch");
  return nearest_column(v, codebook.centroids);
}

Eigen::VectorXd bow_encode(const Eigen::MatrixXd& trajectories, const Codebook& codebook) {
  if (trajectories.rows() < 1)
    throw std::invalid_argument("bow_encode: no trajectories to encode");
  if (trajectories.cols() != codebook.centroids.rows())
    throw std::invalid_argument("bow_encode: dimension mismatch");

  Eigen::VectorXd hist = Eigen::VectorXd::Zero(codebook.size());
  for (Eigen::Index i = 0; i < trajectories.rows(); ++i)
    hist(nearest_column(trajectories.row(i).transpose(), codebook.centroids)) += 1.0;
  return hist / static_cast<double>(trajectories.rows());
}

}  // namespace xview
