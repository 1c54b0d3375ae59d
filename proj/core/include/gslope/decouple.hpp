#pragma once

#include "gslope/dataset.hpp"

#include <vector>

namespace gslope {

// Thin column-pivoted orthogonal factorization of one group block
// X_{I_i}: X_{I_i} * P = U * R with U's columns orthonormal. R is k x k upper
// triangular with rows at or beyond the numerical rank zeroed, so R is
// invertible iff rank == k.
struct GroupFactor {
  Matrix U;  // n x min(n,k)
  Matrix R;  // k x k
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic> P;
  Index rank = 0;
  Index cols = 0;

  // eta = R * P^T * beta_block (the forward change of variables).
  Vector apply_R(const Vector& beta_block) const;

  // beta_block solving R * P^T * beta = eta; exact back-substitution at full
  // rank, minimum-norm least-squares solution otherwise.
  Vector solve_min_norm(const Vector& eta) const;
};

// Decoupled form of the grouped problem: Xhat's group blocks are U_i/w_i
// (columns beyond the group rank are zero), so ||Xhat_{I_i}||_2 = 1/w_i and the
// penalty becomes J_lambda of the plain group norms of b. Groups are laid out
// contiguously in b-space; `partition` keeps the original column indices for
// mapping solutions back.
struct DecoupledProblem {
  Matrix Xhat;  // n x d
  Vector y;
  std::vector<GroupFactor> factors;
  Vector z_diag;  // per-column scaling 1/w_{g(j)} in b-space
  GroupPartition partition;
  GroupLayout layout;  // contiguous b-space groups
  LambdaSequence lambda;

  Index n() const { return Xhat.rows(); }
  Index d() const { return Xhat.cols(); }
  Index m() const { return partition.size(); }
};

// Factors one group block. Throws std::invalid_argument on an all-zero block
// (such a group contributes nothing; the caller must drop or perturb it).
// Numerical rank uses a 1e-10 relative pivot threshold.
GroupFactor factor_group(const Eigen::Ref<const Matrix>& X_block);

DecoupledProblem decouple(const GroupedProblem& problem);

// Maps a decoupled coefficient vector back to the original design:
// beta_{I_i} = solve(R_i, b_{I_i}/w_i), minimum-norm per group when
// rank-deficient. Satisfies X beta = Xhat b exactly up to roundoff.
Vector recover_beta(const DecoupledProblem& decoupled, const Vector& b);

// Forward change of variables b = Z^{-1} R beta (per group: w_i * R_i P_i^T
// beta_{I_i}); the inverse of recover_beta on full-rank instances.
Vector forward_b(const DecoupledProblem& decoupled, const Vector& beta);

// 0.5*||y - X beta||^2 + J_lambda(w_i * ||X_{I_i} beta_{I_i}||_2).
double objective_original(const GroupedProblem& problem, const Vector& beta);

// 0.5*||y - Xhat b||^2 + J_lambda(||b||_I).
double objective_decoupled(const DecoupledProblem& decoupled, const Vector& b);

}  // namespace gslope
