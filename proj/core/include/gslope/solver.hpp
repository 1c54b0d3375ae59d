#pragma once

#include "gslope/decouple.hpp"
#include "gslope/duality.hpp"
#include "gslope/screening.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace gslope {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct SolverConfig {
  Index max_iter = 20000;
  double gap_tol = 1e-6;

  // Batch step rule: fixed step 1/L, with L estimated by power iteration when
  // fixed_L == 0, or backtracking line search (L doubled by backtrack_eta on
  // sufficient-decrease failure).
  double fixed_L = 0.0;
  bool backtracking = false;
  double backtrack_eta = 2.0;
  // Function-value momentum restart; off by default, useful for very tight
  // tolerance reference solves.
  bool adaptive_restart = false;

  // Stochastic step: gamma == 0 selects an automatic step from the working
  // design's Frobenius norm.
  double gamma = 0.0;
  Index batch_size = 30;
  Index inner_iters = 30;
  // Scale the inner correction by 1/l as printed instead of the unbiased n/l.
  bool paper_literal = false;

  bool screening = false;
  // Screening passes start once gap <= screen_gate_rel * P(b0) and stay on.
  double screen_gate_rel = std::numeric_limits<double>::infinity();

  std::uint64_t seed = 0;
  bool record_dual = false;       // keep theta of every outer iteration
  std::optional<Vector> b0;       // warm start, length = decoupled d
};

struct SolverRun {
  Vector b_final;     // decoupled coefficients, screened blocks exactly zero
  Vector beta_final;  // original-design coefficients, screened blocks exactly zero
  Index iterations = 0;
  bool converged = false;
  double final_gap = std::numeric_limits<double>::quiet_NaN();
  std::vector<GapCertificate> gap_history;  // certificate per outer iteration, at b^k
  ScreeningTrace trace;
  ActiveSet active;
  std::vector<Index> restart_iterations;  // iterations where screening removed groups
  std::vector<double> t_history;          // momentum scalar used at each batch step
  std::vector<Vector> dual_history;       // theta per iteration when record_dual
  double wall_seconds = 0.0;
};

// Accelerated proximal gradient (FISTA) on the decoupled problem with the
// screening fixpoint run each iteration once the gate opens. Momentum restarts
// to t=1 whenever screening removes a group.
SolverRun apgd_solve(const DecoupledProblem& decoupled, const SolverConfig& config);

// Variance-reduced stochastic proximal gradient: each outer iteration computes
// the gap, optionally screens, snapshots the full gradient, then runs
// inner_iters prox steps on mini-batches of batch_size rows sampled without
// replacement.
SolverRun spgd_solve(const DecoupledProblem& decoupled, const SolverConfig& config);

// L = 1.01 * sigma_max(X)^2 by power iteration, relative tolerance 1e-6.
// Throws on an all-zero matrix or failure to settle within 10000 iterations.
double lipschitz_estimate(const Matrix& X);
double lipschitz_estimate(const DecoupledProblem& decoupled);

namespace detail {

// scale * sum_{i in batch} X.row(i)^T (X.row(i) . diff) — the mini-batch
// correction of the variance-reduced gradient, before adding the snapshot
// gradient. Exposed for the unbiasedness audit in tests.
Vector vr_direction(const RowMatrix& X, const Vector& diff,
                    const std::vector<std::int64_t>& batch, double scale);

}  // namespace detail

}  // namespace gslope
