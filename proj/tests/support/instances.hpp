#pragma once

// Deterministic random problem generators shared by the unit and acceptance
// tests.  Everything is driven by gslope::Rng so a seed pins the instance.

#include <gslope/dataset.hpp>
#include <gslope/rng.hpp>

namespace gslope::testing {

struct InstanceParams {
  Index n_min = 20, n_max = 100;
  Index d_min = 50, d_max = 600;
  Index m_min = 10, m_max = 120;
  Index size_max = 10;
  // Probability that a multi-column group consists of exact copies of one
  // column, which makes its block rank deficient.
  double duplicate_prob = 0.2;
  double y_norm_min = 2.0, y_norm_max = 6.0;
  int sparsity_index_max = 3;
  double tau = 3.0;
  bool group_lasso_weights = false;
};

// Gaussian design with a contiguous group partition, a sparse planted signal
// and an OSCAR lambda sequence derived from the instance itself.
GroupedProblem random_problem(Rng& rng, const InstanceParams& prm);

// Small dense matrix / vector helpers.
Matrix random_matrix(Rng& rng, Index rows, Index cols);
Vector random_vector(Rng& rng, Index size);

// Contiguous layout with the given group sizes.
GroupPartition contiguous_partition(const std::vector<Index>& sizes,
                                    const Vector& weights);

}  // namespace gslope::testing
