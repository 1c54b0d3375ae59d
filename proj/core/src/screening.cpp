#include "gslope/screening.hpp"

#include "gslope/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace gslope {

ActiveSet ActiveSet::full(Index m) {
  ActiveSet set;
  set.total_groups = m;
  set.active.resize(static_cast<std::size_t>(m));
  std::iota(set.active.begin(), set.active.end(), Index{0});
  return set;
}

std::vector<Index> ActiveSet::remove_positions(const std::vector<Index>& positions,
                                               Index iteration) {
  std::vector<Index> removed_ids;
  removed_ids.reserve(positions.size());
  for (Index pos : positions) {
    if (pos < 0 || pos >= size())
      throw std::invalid_argument("ActiveSet: removal position out of range");
    removed_ids.push_back(active[static_cast<std::size_t>(pos)]);
  }
  for (Index id : removed_ids) removed_log.emplace_back(iteration, id);
  std::vector<Index> survivors;
  survivors.reserve(active.size() - removed_ids.size());
  std::size_t next = 0;
  for (std::size_t i = 0; i < active.size(); ++i) {
    if (next < positions.size() && static_cast<Index>(i) == positions[next]) {
      ++next;
      continue;
    }
    survivors.push_back(active[i]);
  }
  active = std::move(survivors);
  return removed_ids;
}

std::vector<Index> ActiveSet::screened() const {
  std::vector<Index> ids;
  ids.reserve(removed_log.size());
  for (const auto& [iter, id] : removed_log) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

void ScreeningTrace::append(Index iteration, Index active_groups, double gap) {
  records.push_back({iteration, active_groups, gap, std::numeric_limits<double>::quiet_NaN()});
}

void ScreeningTrace::to_csv(std::ostream& out) const {
  out << "iter,active_groups,gap,rate\n";
  char buf[64];
  for (const TraceRecord& rec : records) {
    out << rec.iteration << ',' << rec.active_groups << ',';
    std::snprintf(buf, sizeof buf, "%.17g", rec.gap);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.17g", rec.rate);
    out << buf << '\n';
  }
}

std::vector<Index> screen_pass(const Vector& group_dual_norms, const Vector& block_norms,
                               double radius, const Vector& lambdas, Index threshold_index) {
  const Index m = group_dual_norms.size();
  if (block_norms.size() != m) throw std::invalid_argument("screen_pass: length mismatch");
  if (threshold_index < 1)
    throw std::invalid_argument("screen_pass: empty active set");
  if (threshold_index > lambdas.size())
    throw std::invalid_argument("screen_pass: threshold index beyond lambda length");
  const double threshold = lambdas[threshold_index - 1];
  std::vector<Index> removable;
  for (Index j = 0; j < m; ++j)
    if (group_dual_norms[j] + radius * block_norms[j] < threshold) removable.push_back(j);
  return removable;
}

std::vector<Index> screen_fixpoint(const Vector& group_dual_norms, const Vector& block_norms,
                                   double radius, const Vector& lambdas, Index threshold_index) {
  const Index m = group_dual_norms.size();
  if (block_norms.size() != m) throw std::invalid_argument("screen_fixpoint: length mismatch");
  if (threshold_index < 1)
    throw std::invalid_argument("screen_fixpoint: empty active set");
  if (threshold_index > lambdas.size())
    throw std::invalid_argument("screen_fixpoint: threshold index beyond lambda length");
  if (threshold_index != m)
    throw std::invalid_argument("screen_fixpoint: threshold index must equal candidate count");

  std::vector<char> alive(static_cast<std::size_t>(m), 1);
  Index survivors = threshold_index;
  bool changed = true;
  while (changed && survivors > 0) {
    changed = false;
    const double threshold = lambdas[survivors - 1];
    for (Index j = 0; j < m; ++j) {
      if (!alive[static_cast<std::size_t>(j)]) continue;
      if (group_dual_norms[j] + radius * block_norms[j] < threshold) {
        alive[static_cast<std::size_t>(j)] = 0;
        --survivors;
        changed = true;
      }
    }
  }
  std::vector<Index> removable;
  for (Index j = 0; j < m; ++j)
    if (!alive[static_cast<std::size_t>(j)]) removable.push_back(j);
  return removable;
}

Vector block_spectral_norms(const Matrix& X, const GroupLayout& layout) {
  const Index m = layout.group_count();
  Vector norms(m);
  for (Index g = 0; g < m; ++g) {
    const Index k = layout.group_size(g);
    Matrix block(X.rows(), k);
    for (Index j = 0; j < k; ++j)
      block.col(j) = X.col(layout.indices[static_cast<std::size_t>(layout.offsets[g] + j)]);
    // power iteration on block^T block
    Vector v = Vector::Ones(k) / std::sqrt(static_cast<double>(k));
    double sigma_sq = 0.0;
    for (int it = 0; it < 10000; ++it) {
      Vector u = block.transpose() * (block * v);
      const double norm = u.norm();
      if (norm == 0.0) {
        sigma_sq = 0.0;
        break;
      }
      const double next = v.dot(u);
      v = u / norm;
      if (it > 0 && std::abs(next - sigma_sq) <= 1e-8 * next) {
        sigma_sq = next;
        break;
      }
      sigma_sq = next;
    }
    norms[g] = std::sqrt(std::max(0.0, sigma_sq));
  }
  return norms;
}

double screening_rate(const ActiveSet& active, const std::vector<Index>& optimal_inactive) {
  std::vector<char> inactive_mask(static_cast<std::size_t>(active.total_groups), 0);
  for (Index id : optimal_inactive) {
    if (id < 0 || id >= active.total_groups)
      throw std::invalid_argument("screening_rate: reference group id out of range");
    inactive_mask[static_cast<std::size_t>(id)] = 1;
  }
  Index hits = 0;
  for (const auto& [iter, id] : active.removed_log) {
    if (!inactive_mask[static_cast<std::size_t>(id)])
      throw safeness_error("screening removed group " + std::to_string(id) +
                           ", which is active in the reference solution");
    ++hits;
  }
  if (optimal_inactive.empty()) return 1.0;
  return static_cast<double>(hits) / static_cast<double>(optimal_inactive.size());
}

void fill_rates(ScreeningTrace& trace, const ActiveSet& active,
                const std::vector<Index>& optimal_inactive) {
  std::vector<char> inactive_mask(static_cast<std::size_t>(active.total_groups), 0);
  for (Index id : optimal_inactive) {
    if (id < 0 || id >= active.total_groups)
      throw std::invalid_argument("fill_rates: reference group id out of range");
    inactive_mask[static_cast<std::size_t>(id)] = 1;
  }
  auto log = active.removed_log;
  std::stable_sort(log.begin(), log.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  const double denom = static_cast<double>(optimal_inactive.size());
  std::size_t consumed = 0;
  Index hits = 0;
  for (TraceRecord& rec : trace.records) {
    while (consumed < log.size() && log[consumed].first <= rec.iteration) {
      const Index id = log[consumed].second;
      if (!inactive_mask[static_cast<std::size_t>(id)])
        throw safeness_error("screening removed group " + std::to_string(id) +
                             ", which is active in the reference solution");
      ++hits;
      ++consumed;
    }
    rec.rate = optimal_inactive.empty() ? 1.0 : static_cast<double>(hits) / denom;
  }
}

}  // namespace gslope
