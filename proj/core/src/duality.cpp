#include "gslope/duality.hpp"

#include "gslope/sorted_l1.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace gslope {

double conjugate_value(double theta_i, double y_i) {
  return 0.5 * theta_i * theta_i + theta_i * y_i;
}

bool dual_feasible(const Vector& group_dual_norms, const Vector& lambdas, double slack) {
  if (group_dual_norms.size() != lambdas.size())
    throw std::invalid_argument("dual_feasible: length mismatch");
  Vector sorted = group_dual_norms;
  std::sort(sorted.data(), sorted.data() + sorted.size(), std::greater<double>());
  double prefix_norm = 0.0;
  double prefix_lambda = 0.0;
  for (Index i = 0; i < sorted.size(); ++i) {
    prefix_norm += sorted[i];
    prefix_lambda += lambdas[i];
    if (prefix_norm > prefix_lambda + slack) return false;
  }
  return true;
}

DualState dual_candidate_core(const Vector& residual, const Vector& xt_residual,
                              const GroupLayout& layout, const Vector& lambdas, const Vector& y) {
  if (lambdas.size() != layout.group_count())
    throw std::invalid_argument("dual_candidate: lambda length does not match group count");
  const Vector rho = group_norms(xt_residual, layout);

  Vector sorted = rho;
  std::sort(sorted.data(), sorted.data() + sorted.size(), std::greater<double>());
  double scale = 1.0;
  double prefix_rho = 0.0;
  double prefix_lambda = 0.0;
  for (Index i = 0; i < sorted.size(); ++i) {
    prefix_rho += sorted[i];
    prefix_lambda += lambdas[i];
    if (prefix_rho > 0.0) scale = std::min(scale, prefix_lambda / prefix_rho);
  }

  DualState dual;
  dual.scale = scale;
  dual.theta = scale * residual;
  dual.group_dual_norms = scale * rho;
  dual.dual_value = -0.5 * dual.theta.squaredNorm() - dual.theta.dot(y);
  dual.feasible = dual_feasible(dual.group_dual_norms, lambdas);
  return dual;
}

DualState dual_candidate(const Vector& b, const DecoupledProblem& decoupled) {
  if (b.size() != decoupled.d())
    throw std::invalid_argument("dual_candidate: coefficient length mismatch");
  const Vector residual = decoupled.Xhat * b - decoupled.y;
  const Vector xt_residual = decoupled.Xhat.transpose() * residual;
  return dual_candidate_core(residual, xt_residual, decoupled.layout, decoupled.lambda.lambdas,
                             decoupled.y);
}

GapCertificate gap_from_primal(double primal, const DualState& dual) {
  if (!dual.feasible)
    throw std::invalid_argument("duality_gap: dual point is not feasible");
  GapCertificate cert;
  cert.primal = primal;
  cert.dual = dual.dual_value;
  double gap = primal - dual.dual_value;
  if (gap < 0.0) {
    if (gap < -1e-10)
      throw std::runtime_error("duality_gap: weak duality violated, gap = " +
                               std::to_string(gap));
    gap = 0.0;
  }
  cert.gap = gap;
  cert.radius = std::sqrt(2.0 * gap);
  return cert;
}

GapCertificate duality_gap(const Vector& b, const DualState& dual,
                           const DecoupledProblem& decoupled) {
  return gap_from_primal(objective_decoupled(decoupled, b), dual);
}

}  // namespace gslope
