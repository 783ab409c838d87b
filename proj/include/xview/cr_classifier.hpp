#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <vector>

#include "xview/fusion.hpp"

namespace xview {

/// Sparse representation over the dictionary: at most k nonzero
/// coefficients, zero outside `support`. Support indices are listed in
/// selection order.
struct SparseRep {
  Eigen::VectorXd coefficients;
  std::vector<int> support;
};

/// One greedy OMP round, recorded for invariant checks: the index added,
/// the residual norm after refit, and max |X_support^T r| after refit.
struct OmpIteration {
  int chosen = -1;
  double residual_norm = 0.0;
  double support_correlation = 0.0;
};

struct OmpTrace {
  std::vector<OmpIteration> iterations;
};

/// Ridge (dense collaborative) representation: the unique minimizer of
/// ||y - X a||^2 + lambda ||a||^2, computed via the SPD normal equations
/// (X^T X + lambda I) a = X^T y.
Eigen::VectorXd ridge_solve(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda);

/// Cached factorization of (X^T X + lambda I) so that repeated queries cost
/// one matrix-vector chain. apply(y) equals ridge_solve(X, y, lambda).
class RidgeProjection {
 public:
  RidgeProjection(const Eigen::MatrixXd& X, double lambda);

  Eigen::VectorXd apply(const Eigen::VectorXd& y) const;
  Eigen::Index dictionary_rows() const { return xt_.cols(); }
  Eigen::Index dictionary_size() const { return xt_.rows(); }

 private:
  Eigen::MatrixXd xt_;  // X^T
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

/// Orthogonal Matching Pursuit for min ||y - X a|| s.t. ||a||_0 <= k.
/// Each round selects the unselected column with the largest |X^T r|
/// (lowest index on ties), refits by least squares on the support, and
/// updates the residual. Stops at k atoms, at ||r|| <= residual_tol, or
/// when every remaining correlation is zero. Columns are expected to be
/// unit l2-normalized by the caller.
SparseRep omp_solve(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int k,
                    double residual_tol = 1e-8, OmpTrace* trace = nullptr);

/// Convex combination lambda1 * sparse + (1 - lambda1) * dense.
Eigen::VectorXd combine(const Eigen::VectorXd& sparse, const Eigen::VectorXd& dense,
                        double lambda1);

/// Class scores q = B * combined (signed sums per class) and the argmax
/// label, lowest class index on ties.
std::pair<int, Eigen::VectorXd> predict(const Eigen::VectorXd& combined, const Eigen::MatrixXd& B);

/// All intermediate representations of one test sample, kept for
/// diagnostics.
struct RepresentationTriple {
  Eigen::VectorXd dense;
  SparseRep sparse;
  Eigen::VectorXd combined;
  Eigen::VectorXd class_scores;
};

struct Classification {
  int label = -1;
  RepresentationTriple rep;
};

/// Whole pipeline for one test vector: l2-normalize y, solve the dense and
/// sparse representations, combine, and predict.
Classification classify(const FusedDictionary& dict, const Eigen::VectorXd& y, double lambda,
                        double lambda1, int k, double residual_tol = 1e-8);

/// Reusable classifier for batches of test samples; the ridge projection is
/// factorized once at construction. Immutable afterwards, safe to share
/// across threads.
class CrClassifier {
 public:
  CrClassifier(FusedDictionary dict, double lambda, double lambda1, int k,
               double residual_tol = 1e-8);

  Classification classify(const Eigen::VectorXd& y) const;
  const FusedDictionary& dictionary() const { return dict_; }

 private:
  FusedDictionary dict_;
  RidgeProjection projection_;
  double lambda1_;
  int k_;
  double residual_tol_;
};

}  // namespace xview
