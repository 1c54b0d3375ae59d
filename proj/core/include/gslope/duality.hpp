#pragma once

#include "gslope/dataset.hpp"
#include "gslope/decouple.hpp"

namespace gslope {

// Dual point for the decoupled problem, always produced feasible by scaling.
struct DualState {
  Vector theta;             // length n
  Vector group_dual_norms;  // theta~_i = ||Xhat_{I_i}^T theta||_2, length m
  double scale = 1.0;       // feasibility scaling s in (0,1]
  double dual_value = 0.0;  // D(theta)
  bool feasible = false;
};

struct GapCertificate {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;     // primal - dual, clamped at 0 within -1e-10
  double radius = 0.0;  // sqrt(2*max(gap,0)), the dual ball radius
};

// Convex conjugate of the per-sample loss 0.5*(y_i - z)^2:
// f_i*(theta_i) = 0.5*theta_i^2 + theta_i*y_i.
double conjugate_value(double theta_i, double y_i);

// Membership test for the dual set Delta: every prefix sum of the descending-
// sorted norms must not exceed the matching lambda prefix sum, up to an
// additive slack.
bool dual_feasible(const Vector& group_dual_norms, const Vector& lambdas, double slack = 1e-6);

// Scaled-residual dual candidate: with r = Xhat*b - y and rho_i the per-group
// norms of Xhat^T r, scale by s = min(1, min_i prefix(lambda)_i/prefix(rho)_i)
// (rho sorted descending, zero denominators skipped) and set theta = s*r.
DualState dual_candidate_core(const Vector& residual, const Vector& xt_residual,
                              const GroupLayout& layout, const Vector& lambdas, const Vector& y);
DualState dual_candidate(const Vector& b, const DecoupledProblem& decoupled);

// Builds the certificate from an already-computed primal value. Negative gaps
// within -1e-10 are floating-point noise and clamp to zero; anything more
// negative violates weak duality and raises std::runtime_error.
GapCertificate gap_from_primal(double primal, const DualState& dual);

// Full gap evaluation: P(b) = 0.5*||y - Xhat b||^2 + J_lambda(||b||_I),
// D(theta) = -sum_i f_i*(theta_i).
GapCertificate duality_gap(const Vector& b, const DualState& dual,
                           const DecoupledProblem& decoupled);

}  // namespace gslope
