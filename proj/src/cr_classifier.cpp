#include "xview/cr_classifier.hpp"

#include <Eigen/QR>
#include <cmath>
#include <stdexcept>

namespace xview {

namespace {

void check_system(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.rows() < 1 || X.cols() < 1) throw std::invalid_argument("empty dictionary");
  if (y.size() != X.rows())
    throw std::invalid_argument("dictionary rows and test vector length differ");
  if (!X.allFinite() || !y.allFinite()) throw std::invalid_argument("non-finite input");
}

}  // namespace

Eigen::VectorXd ridge_solve(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda) {
  check_system(X, y);
  if (!(lambda > 0.0)) throw std::invalid_argument("ridge_solve: lambda must be > 0");
  Eigen::MatrixXd gram = X.transpose() * X;
  gram.diagonal().array() += lambda;  // SPD for lambda > 0
  return Eigen::LLT<Eigen::MatrixXd>(gram).solve(X.transpose() * y);
}

RidgeProjection::RidgeProjection(const Eigen::MatrixXd& X, double lambda) : xt_(X.transpose()) {
  if (X.rows() < 1 || X.cols() < 1) throw std::invalid_argument("empty dictionary");
  if (!X.allFinite()) throw std::invalid_argument("non-finite dictionary");
  if (!(lambda > 0.0)) throw std::invalid_argument("RidgeProjection: lambda must be > 0");
  Eigen::MatrixXd gram = xt_ * X;
  gram.diagonal().array() += lambda;
  llt_.compute(gram);
}

Eigen::VectorXd RidgeProjection::apply(const Eigen::VectorXd& y) const {
  if (y.size() != xt_.cols())
    throw std::invalid_argument("RidgeProjection: test vector length mismatch");
  return llt_.solve(xt_ * y);
}

SparseRep omp_solve(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int k,
                    double residual_tol, OmpTrace* trace) {
  check_system(X, y);
  const Eigen::Index n = X.cols();
  if (k < 1) throw std::invalid_argument("omp_solve: k must be >= 1");
  if (k > n) throw std::invalid_argument("omp_solve: k exceeds dictionary size");
  if (residual_tol < 0.0) throw std::invalid_argument("omp_solve: negative residual_tol");
  for (Eigen::Index j = 0; j < n; ++j)
    if (X.col(j).norm() == 0.0)
      throw std::invalid_argument("omp_solve: zero column at index " + std::to_string(j));
  if (trace) *trace = {};

  SparseRep rep;
  rep.coefficients = Eigen::VectorXd::Zero(n);
  std::vector<char> selected(n, 0);
  Eigen::VectorXd residual = y;
  Eigen::MatrixXd atoms(X.rows(), 0);

  while (static_cast<int>(rep.support.size()) < k) {
    if (residual.norm() <= residual_tol) break;

    const Eigen::VectorXd corr = X.transpose() * residual;
    int best = -1;
    double best_abs = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (selected[j]) continue;
      const double a = std::abs(corr(j));
      if (a > best_abs) {  // strict: ties stay with the lowest index
        best_abs = a;
        best = static_cast<int>(j);
      }
    }
    if (best < 0 || best_abs == 0.0) break;

    selected[best] = 1;
    rep.support.push_back(best);
    atoms.conservativeResize(Eigen::NoChange, atoms.cols() + 1);
    atoms.col(atoms.cols() - 1) = X.col(best);

    // least-squares refit on the selected atoms
    const Eigen::VectorXd coeffs = atoms.householderQr().solve(y);
    residual = y - atoms * coeffs;

    rep.coefficients.setZero();
    for (std::size_t s = 0; s < rep.support.size(); ++s)
      rep.coefficients(rep.support[s]) = coeffs(static_cast<Eigen::Index>(s));

    if (trace) {
      OmpIteration it;
      it.chosen = best;
      it.residual_norm = residual.norm();
      it.support_correlation = (atoms.transpose() * residual).cwiseAbs().maxCoeff();
      trace->iterations.push_back(it);
    }
  }
  return rep;
}

Eigen::VectorXd combine(const Eigen::VectorXd& sparse, const Eigen::VectorXd& dense,
                        double lambda1) {
  if (sparse.size() != dense.size())
    throw std::invalid_argument("combine: representation lengths differ");
  if (lambda1 < 0.0 || lambda1 > 1.0)
    throw std::invalid_argument("combine: lambda1 must be in [0, 1]");
  return lambda1 * sparse + (1.0 - lambda1) * dense;
}

std::pair<int, Eigen::VectorXd> predict(const Eigen::VectorXd& combined,
                                        const Eigen::MatrixXd& B) {
  if (B.cols() != combined.size())
    throw std::invalid_argument("predict: indicator matrix column count mismatch");
  const Eigen::VectorXd scores = B * combined;
  int label = 0;
  for (Eigen::Index i = 1; i < scores.size(); ++i)
    if (scores(i) > scores(label)) label = static_cast<int>(i);
  return {label, scores};
}

Classification classify(const FusedDictionary& dict, const Eigen::VectorXd& y, double lambda,
                        double lambda1, int k, double residual_tol) {
  return CrClassifier(dict, lambda, lambda1, k, residual_tol).classify(y);
}

CrClassifier::CrClassifier(FusedDictionary dict, double lambda, double lambda1, int k,
                           double residual_tol)
    : dict_(std::move(dict)),
      projection_(dict_.X, lambda),
      lambda1_(lambda1),
      k_(k),
      residual_tol_(residual_tol) {
  if (lambda1 < 0.0 || lambda1 > 1.0)
    throw std::invalid_argument("CrClassifier: lambda1 must be in [0, 1]");
  if (k < 1 || k > dict_.X.cols())
    throw std::invalid_argument("CrClassifier: sparsity must be in [1, n]");
  if (dict_.B.cols() != dict_.X.cols())
    throw std::invalid_argument("CrClassifier: indicator matrix does not match dictionary");
}

Classification CrClassifier::classify(const Eigen::VectorXd& y) const {
  if (y.size() != dict_.X.rows())
    throw std::invalid_argument("classify: test vector length mismatch");
  Eigen::VectorXd q = y;
  const double norm = q.norm();
  if (norm > 0.0) q /= norm;

  Classification out;
  out.rep.dense = projection_.apply(q);
  out.rep.sparse = omp_solve(dict_.X, q, k_, residual_tol_);
  out.rep.combined = combine(out.rep.sparse.coefficients, out.rep.dense, lambda1_);
  auto [label, scores] = predict(out.rep.combined, dict_.B);
  out.label = label;
  out.rep.class_scores = std::move(scores);
  return out;
}

}  // namespace xview
