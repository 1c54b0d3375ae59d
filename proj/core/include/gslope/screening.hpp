#pragma once

#include "gslope/dataset.hpp"
#include "gslope/duality.hpp"

#include <iosfwd>
#include <limits>
#include <utility>
#include <vector>

namespace gslope {

// Bookkeeping for the surviving groups. `active` holds original group ids in
// ascending order; its size is the threshold index |A| selecting lambda_{|A|}.
// Groups only ever leave, never re-enter.
struct ActiveSet {
  Index total_groups = 0;
  std::vector<Index> active;
  std::vector<std::pair<Index, Index>> removed_log;  // (iteration, original group id)

  static ActiveSet full(Index m);

  Index size() const { return static_cast<Index>(active.size()); }

  // Removes the groups at the given positions of `active` (positions must be
  // ascending), logging each removal at `iteration`. Returns the removed
  // original group ids.
  std::vector<Index> remove_positions(const std::vector<Index>& positions, Index iteration);

  // All removed original group ids, ascending.
  std::vector<Index> screened() const;
};

struct TraceRecord {
  Index iteration = 0;
  Index active_groups = 0;
  double gap = 0.0;
  double rate = std::numeric_limits<double>::quiet_NaN();
};

struct ScreeningTrace {
  std::vector<TraceRecord> records;

  void append(Index iteration, Index active_groups, double gap);
  // CSV with header `iter,active_groups,gap,rate`.
  void to_csv(std::ostream& out) const;
};

// One screening pass: group j is removable iff
//   dual_norms[j] + radius*block_norms[j] < lambdas[threshold_index-1]
// (strict inequality; ties are kept). block_norms[j] = ||Xhat_{I_j}||_2, which
// is 1/w_j on a decoupled problem. Returns removable indices, ascending.
// threshold_index must be in [1, lambdas.size()].
std::vector<Index> screen_pass(const Vector& group_dual_norms, const Vector& block_norms,
                               double radius, const Vector& lambdas, Index threshold_index);

// Repeats passes over the survivors, lowering the threshold index to the
// survivor count after each pass (so the threshold lambda can only grow),
// until a pass removes nothing. Returns all removable indices, ascending.
std::vector<Index> screen_fixpoint(const Vector& group_dual_norms, const Vector& block_norms,
                                   double radius, const Vector& lambdas, Index threshold_index);

// Per-group spectral norms ||X_{I_i}||_2 by power iteration (relative
// tolerance 1e-8), for screening designs that were not decoupled.
Vector block_spectral_norms(const Matrix& X, const GroupLayout& layout);

// Fraction of the reference-inactive groups that have been screened. Returns
// 1.0 when `optimal_inactive` is empty. Throws safeness_error if any screened
// group is not reference-inactive.
double screening_rate(const ActiveSet& active, const std::vector<Index>& optimal_inactive);

// Fills the per-record rate column from the removal log (same convention and
// safeness check as screening_rate).
void fill_rates(ScreeningTrace& trace, const ActiveSet& active,
                const std::vector<Index>& optimal_inactive);

}  // namespace gslope
