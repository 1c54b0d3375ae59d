#include "gslope/decouple.hpp"

#include "gslope/sorted_l1.hpp"

#include <Eigen/QR>

#include <cmath>
#include <stdexcept>
#include <utility>

namespace gslope {

Vector GroupFactor::apply_R(const Vector& beta_block) const {
  return R * (P.transpose() * beta_block);
}

Vector GroupFactor::solve_min_norm(const Vector& eta) const {
  Vector x;
  if (rank == cols) {
    x = R.triangularView<Eigen::Upper>().solve(eta);
  } else {
    // Only the top `rank` rows of R carry information; take the minimum-norm
    // least-squares solution through that trapezoid.
    x = R.topRows(rank).completeOrthogonalDecomposition().solve(eta.head(rank));
  }
  return P * x;
}

GroupFactor factor_group(const Eigen::Ref<const Matrix>& X_block) {
  const Index n = X_block.rows();
  const Index k = X_block.cols();
  if (n < 1 || k < 1) throw std::invalid_argument("factor_group: empty block");
  if (X_block.cwiseAbs().maxCoeff() == 0.0)
    throw std::invalid_argument("factor_group: all-zero group block");

  Eigen::ColPivHouseholderQR<Matrix> qr(X_block);
  qr.setThreshold(1e-10);

  GroupFactor f;
  f.cols = k;
  f.rank = qr.rank();
  const Index q = std::min(n, k);
  f.U = qr.householderQ() * Matrix::Identity(n, q);
  f.R = Matrix::Zero(k, k);
  f.R.topRows(q) = qr.matrixR().topRows(q).triangularView<Eigen::Upper>();
  if (f.rank < k) f.R.bottomRows(k - f.rank).setZero();
  f.P = qr.colsPermutation();
  return f;
}

DecoupledProblem decouple(const GroupedProblem& problem) {
  const GroupedDesign& design = problem.design;
  design.partition.validate(design.d());
  if (problem.lambda.size() != design.m())
    throw std::invalid_argument("decouple: lambda length does not match group count");

  const Index n = design.n();
  const Index d = design.d();
  const Index m = design.m();

  DecoupledProblem dp;
  dp.y = design.y;
  dp.lambda = problem.lambda;
  dp.partition = design.partition;
  dp.Xhat.setZero(n, d);
  dp.z_diag.resize(d);
  dp.factors.reserve(static_cast<std::size_t>(m));

  GroupPartition bspace;
  bspace.groups.resize(static_cast<std::size_t>(m));
  bspace.weights = design.partition.weights;

  Matrix block;
  Index off = 0;
  for (Index i = 0; i < m; ++i) {
    const auto& group = design.partition.groups[static_cast<std::size_t>(i)];
    const Index k = static_cast<Index>(group.size());
    block.resize(n, k);
    for (Index j = 0; j < k; ++j) block.col(j) = design.X.col(group[static_cast<std::size_t>(j)]);

    GroupFactor f = factor_group(block);
    const double w = design.partition.weights[i];
    dp.Xhat.middleCols(off, f.rank) = f.U.leftCols(f.rank) / w;
    auto& bgroup = bspace.groups[static_cast<std::size_t>(i)];
    bgroup.reserve(static_cast<std::size_t>(k));
    for (Index j = 0; j < k; ++j) {
      dp.z_diag[off + j] = 1.0 / w;
      bgroup.push_back(off + j);
    }
    dp.factors.push_back(std::move(f));
    off += k;
  }
  dp.layout = GroupLayout::build(bspace);
  return dp;
}

Vector recover_beta(const DecoupledProblem& decoupled, const Vector& b) {
  if (b.size() != decoupled.d())
    throw std::invalid_argument("recover_beta: coefficient length mismatch");
  Vector beta(decoupled.d());
  const Index m = decoupled.m();
  for (Index i = 0; i < m; ++i) {
    const auto& group = decoupled.partition.groups[static_cast<std::size_t>(i)];
    const Index k = static_cast<Index>(group.size());
    const Index off = decoupled.layout.group_first(i);
    const double w = decoupled.partition.weights[i];
    const Vector eta = b.segment(off, k) / w;
    const Vector x = decoupled.factors[static_cast<std::size_t>(i)].solve_min_norm(eta);
    for (Index j = 0; j < k; ++j) beta[group[static_cast<std::size_t>(j)]] = x[j];
  }
  return beta;
}

Vector forward_b(const DecoupledProblem& decoupled, const Vector& beta) {
  if (beta.size() != decoupled.d())
    throw std::invalid_argument("forward_b: coefficient length mismatch");
  Vector b(decoupled.d());
  const Index m = decoupled.m();
  for (Index i = 0; i < m; ++i) {
    const auto& group = decoupled.partition.groups[static_cast<std::size_t>(i)];
    const Index k = static_cast<Index>(group.size());
    const Index off = decoupled.layout.group_first(i);
    const double w = decoupled.partition.weights[i];
    Vector beta_block(k);
    for (Index j = 0; j < k; ++j) beta_block[j] = beta[group[static_cast<std::size_t>(j)]];
    b.segment(off, k) = w * decoupled.factors[static_cast<std::size_t>(i)].apply_R(beta_block);
  }
  return b;
}

double objective_original(const GroupedProblem& problem, const Vector& beta) {
  const GroupedDesign& design = problem.design;
  if (beta.size() != design.d())
    throw std::invalid_argument("objective_original: coefficient length mismatch");
  const Index m = design.m();
  Vector effects(m);
  Vector fitted = Vector::Zero(design.n());
  Vector tmp(design.n());
  for (Index i = 0; i < m; ++i) {
    const auto& group = design.partition.groups[static_cast<std::size_t>(i)];
    tmp.setZero();
    for (Index col : group) tmp += design.X.col(col) * beta[col];
    effects[i] = design.partition.weights[i] * tmp.norm();
    fitted += tmp;
  }
  const double fit = 0.5 * (design.y - fitted).squaredNorm();
  return fit + eval_sorted_l1(effects, problem.lambda.lambdas);
}

double objective_decoupled(const DecoupledProblem& decoupled, const Vector& b) {
  if (b.size() != decoupled.d())
    throw std::invalid_argument("objective_decoupled: coefficient length mismatch");
  const double fit = 0.5 * (decoupled.y - decoupled.Xhat * b).squaredNorm();
  return fit + eval_sorted_l1(group_norms(b, decoupled.layout), decoupled.lambda.lambdas);
}

}  // namespace gslope
