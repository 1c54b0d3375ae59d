#include "gslope/sorted_l1.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace gslope {

namespace {

void check_lengths(Index v_len, Index lambda_len) {
  if (v_len != lambda_len)
    throw std::invalid_argument("sorted_l1: vector and lambda lengths differ");
}

// Indices of v sorted by descending |v|, ties broken by original index.
std::vector<Index> descending_order(const Vector& v) {
  std::vector<Index> order(static_cast<std::size_t>(v.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(v[a]) > std::abs(v[b]); });
  return order;
}

}  // namespace

double eval_sorted_l1(const Vector& v, const Vector& lambdas) {
  check_lengths(v.size(), lambdas.size());
  Vector mags = v.cwiseAbs();
  std::sort(mags.data(), mags.data() + mags.size(), std::greater<double>());
  return mags.dot(lambdas);
}

Vector prox_sorted_l1(const Vector& v, const Vector& lambdas, double t) {
  check_lengths(v.size(), lambdas.size());
  if (!(t > 0.0)) throw std::invalid_argument("prox_sorted_l1: step must be positive");
  const Index m = v.size();
  const auto order = descending_order(v);

  // z = sorted magnitudes minus t*lambda; project onto the non-increasing cone
  // by pooling adjacent violating blocks, then clamp at zero.
  struct Block {
    Index len;
    double sum;
  };
  std::vector<Block> stack;
  stack.reserve(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) {
    const double z = std::abs(v[order[static_cast<std::size_t>(i)]]) - t * lambdas[i];
    stack.push_back({1, z});
    while (stack.size() >= 2) {
      const Block& cur = stack[stack.size() - 1];
      const Block& prev = stack[stack.size() - 2];
      if (cur.sum * static_cast<double>(prev.len) < prev.sum * static_cast<double>(cur.len))
        break;  // averages strictly decreasing, no violation
      Block merged{prev.len + cur.len, prev.sum + cur.sum};
      stack.pop_back();
      stack.back() = merged;
    }
  }

  Vector u(m);
  Index pos = 0;
  for (const Block& blk : stack) {
    const double avg = std::max(0.0, blk.sum / static_cast<double>(blk.len));
    for (Index r = 0; r < blk.len; ++r, ++pos) {
      const Index src = order[static_cast<std::size_t>(pos)];
      u[src] = v[src] < 0.0 ? -avg : avg;
    }
  }
  return u;
}

Vector prox_group_slope(const Vector& b, const GroupLayout& layout, const Vector& lambdas,
                        double t) {
  const Index m = layout.group_count();
  check_lengths(m, lambdas.size());
  if (!(t > 0.0)) throw std::invalid_argument("prox_group_slope: step must be positive");
  const Vector c = group_norms(b, layout);
  const Vector cstar = prox_sorted_l1(c, lambdas, t);

  Vector u = Vector::Zero(b.size());
  for (Index g = 0; g < m; ++g) {
    if (c[g] == 0.0) continue;  // prox of the zero block is zero
    const double factor = cstar[g] / c[g];
    if (factor == 0.0) continue;
    if (layout.contiguous) {
      const Index first = layout.group_first(g);
      u.segment(first, layout.group_size(g)) = b.segment(first, layout.group_size(g)) * factor;
    } else {
      for (Index k = layout.offsets[g]; k < layout.offsets[g + 1]; ++k) {
        const Index j = layout.indices[static_cast<std::size_t>(k)];
        u[j] = b[j] * factor;
      }
    }
  }
  return u;
}

}  // namespace gslope
