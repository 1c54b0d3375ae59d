#include "instances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gslope::testing {

Matrix random_matrix(Rng& rng, Index rows, Index cols) {
  Matrix out(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) out(i, j) = rng.normal();
  return out;
}

Vector random_vector(Rng& rng, Index size) {
  Vector out(size);
  for (Index i = 0; i < size; ++i) out[i] = rng.normal();
  return out;
}

GroupPartition contiguous_partition(const std::vector<Index>& sizes,
                                    const Vector& weights) {
  GroupPartition part;
  part.weights = weights;
  Index at = 0;
  for (Index s : sizes) {
    std::vector<Index> cols(static_cast<std::size_t>(s));
    std::iota(cols.begin(), cols.end(), at);
    part.groups.push_back(std::move(cols));
    at += s;
  }
  return part;
}

GroupedProblem random_problem(Rng& rng, const InstanceParams& prm) {
  std::vector<Index> sizes;
  Index d = 0;
  for (int attempt = 0;; ++attempt) {
    if (attempt > 10000)
      throw std::invalid_argument("random_problem: dimension ranges infeasible");
    const Index m = rng.uniform_int(prm.m_min, prm.m_max);
    sizes.clear();
    d = 0;
    for (Index g = 0; g < m; ++g) {
      const Index s = rng.uniform_int(1, prm.size_max);
      sizes.push_back(s);
      d += s;
    }
    if (d >= prm.d_min && d <= prm.d_max) break;
  }
  const Index n = rng.uniform_int(prm.n_min, prm.n_max);
  const Index m = static_cast<Index>(sizes.size());

  Matrix X(n, d);
  Index at = 0;
  for (Index g = 0; g < m; ++g) {
    const Index s = sizes[static_cast<std::size_t>(g)];
    if (s > 1 && rng.uniform() < prm.duplicate_prob) {
      const Vector col = random_vector(rng, n);
      for (Index j = 0; j < s; ++j) X.col(at + j) = col;
    } else {
      X.middleCols(at, s) = random_matrix(rng, n, s);
    }
    at += s;
  }

  Vector weights(m);
  for (Index g = 0; g < m; ++g)
    weights[g] = prm.group_lasso_weights
                     ? std::sqrt(static_cast<double>(sizes[static_cast<std::size_t>(g)]))
                     : 1.0;
  GroupPartition part = contiguous_partition(sizes, weights);

  // Plant a sparse signal over whole groups so screening has inactive groups
  // to find, then add noise and rescale y to a moderate norm.
  const Index active = std::max<Index>(1, m / 6);
  std::vector<std::int64_t> scratch, chosen;
  rng.sample_without_replacement(m, active, scratch, chosen);
  Vector beta = Vector::Zero(d);
  at = 0;
  std::vector<Index> offsets(static_cast<std::size_t>(m));
  for (Index g = 0; g < m; ++g) {
    offsets[static_cast<std::size_t>(g)] = at;
    at += sizes[static_cast<std::size_t>(g)];
  }
  for (std::int64_t g : chosen) {
    const Index off = offsets[static_cast<std::size_t>(g)];
    const Index s = sizes[static_cast<std::size_t>(g)];
    beta.segment(off, s) = random_vector(rng, s);
  }
  Vector y = X * beta + 0.5 * random_vector(rng, n);
  const double target = prm.y_norm_min +
                        (prm.y_norm_max - prm.y_norm_min) * rng.uniform();
  y *= target / y.norm();

  GroupedDesign design{std::move(X), std::move(y), std::move(part)};
  const int idx = static_cast<int>(rng.uniform_int(1, prm.sparsity_index_max));
  const double p = static_cast<double>(idx) * std::exp(-prm.tau);
  LambdaSequence lambda = oscar_lambdas(design, p, prm.tau);
  return GroupedProblem{std::move(design), std::move(lambda)};
}

}  // namespace gslope::testing
