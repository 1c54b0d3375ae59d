#pragma once

#include "gslope/dataset.hpp"

namespace gslope {

// Ordered weighted l1 penalty J_lambda(v) = sum_i lambda_i * |v|_[i], where
// |v|_[1] >= ... >= |v|_[m] are the magnitudes in descending order.
double eval_sorted_l1(const Vector& v, const Vector& lambdas);

// argmin_u 0.5*||u - v||^2 + t * J_lambda(u). Stack-based pool-adjacent-
// violators on the descending-sorted magnitudes; ties in |v| are broken by
// original index so the result is deterministic.
Vector prox_sorted_l1(const Vector& v, const Vector& lambdas, double t);

// argmin_u 0.5*||u - b||^2 + t * J_lambda(||u||_I): reduce to the norm vector
// c_i = ||b_{I_i}||_2, prox in norm space, then rescale each block radially.
// Zero-norm groups stay exactly zero.
Vector prox_group_slope(const Vector& b, const GroupLayout& layout, const Vector& lambdas,
                        double t);

}  // namespace gslope
