#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace gslope {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class LabelsKind { regression, binary };

// A raw regression/classification dataset before any group structure is
// attached. X0 holds the original d0 feature columns.
struct Dataset {
  Matrix X0;
  Vector y;
  LabelsKind labels_kind = LabelsKind::regression;

  Index rows() const { return X0.rows(); }
  Index cols() const { return X0.cols(); }
};

// Disjoint groups I_1..I_m covering columns {0..d-1}, with per-group penalty
// weights w_i > 0.
struct GroupPartition {
  std::vector<std::vector<Index>> groups;
  Vector weights;

  Index size() const { return static_cast<Index>(groups.size()); }
  Index total_cols() const;

  // Throws std::invalid_argument unless the groups are nonempty, disjoint and
  // cover exactly {0..d-1}, and every weight is positive.
  void validate(Index d) const;
};

// Flat CSR-style view of a partition for tight per-group loops:
// group g owns columns indices[offsets[g] .. offsets[g+1]-1].
struct GroupLayout {
  std::vector<Index> indices;
  std::vector<Index> offsets;
  bool contiguous = false;  // every group is a sorted run [first, first+size)

  static GroupLayout build(const GroupPartition& partition);

  Index group_count() const { return static_cast<Index>(offsets.size()) - 1; }
  Index group_size(Index g) const { return offsets[g + 1] - offsets[g]; }
  Index group_first(Index g) const { return indices[offsets[g]]; }
};

// Per-group Euclidean norms ||b_{I_i}||_2, i = 1..m.
Vector group_norms(const Vector& b, const GroupLayout& layout);

// Non-increasing, nonnegative penalty sequence with at least one positive
// entry.
struct LambdaSequence {
  enum class Provenance { explicit_values, oscar };

  Vector lambdas;
  Provenance provenance = Provenance::explicit_values;
  double oscar_p = 0.0;
  double oscar_tau = 0.0;

  Index size() const { return lambdas.size(); }

  // Validates the invariants; throws std::invalid_argument on violation.
  static LambdaSequence from_explicit(Vector lambdas);
};

// Expanded design with its group structure but no penalty attached yet.
struct GroupedDesign {
  Matrix X;
  Vector y;
  GroupPartition partition;

  Index n() const { return X.rows(); }
  Index d() const { return X.cols(); }
  Index m() const { return partition.size(); }
};

struct GroupedProblem {
  GroupedDesign design;
  LambdaSequence lambda;

  Index n() const { return design.n(); }
  Index d() const { return design.d(); }
  Index m() const { return design.m(); }
};

// Parses LIBSVM text: one sample per line, `label idx:val idx:val ...` with
// 1-based strictly increasing indices (normalized to 0-based internally).
// Whitespace-only lines are skipped. If dim_override > 0 it fixes d0 and any
// larger index is an error; otherwise d0 is the largest index seen.
// Throws parse_error (carrying the 1-based line number) on malformed input.
Dataset parse_libsvm(std::istream& in, Index dim_override = 0);

// Writes the dataset back out in LIBSVM format (1-based indices, zeros
// omitted) with enough digits to round-trip doubles exactly.
void serialize_libsvm(std::ostream& out, const Dataset& dataset);

enum class GroupWeightRule {
  unit,        // w_i = 1
  group_lasso  // w_i = sqrt(|I_i|)
};

// Duplicates each original column i into a group of k_i exact replica columns,
// k_i drawn uniformly from {1..max_size} using the given seed. Groups are laid
// out contiguously, so m = d0 and d = sum k_i.
GroupedDesign expand_groups(const Dataset& dataset, std::int64_t max_size, std::uint64_t seed,
                            GroupWeightRule weight_rule = GroupWeightRule::unit);

// OSCAR sequence lambda_i = alpha1 + alpha2*(m - i) with
// alpha1 = p*||X^T y||_inf on the expanded design and alpha2 = alpha1/d.
// tau is recorded for provenance only; callers derive p from a sparsity index
// via p_i = i*exp(-tau).
LambdaSequence oscar_lambdas(const GroupedDesign& design, double p, double tau);

// Rescales every nonzero column of X0 to unit Euclidean norm (zero columns are
// left untouched). Used by the CLI --standardize flag and by the SLOPE
// reduction, which assumes unit-norm columns.
Dataset scale_columns_unit_norm(Dataset dataset);

}  // namespace gslope
