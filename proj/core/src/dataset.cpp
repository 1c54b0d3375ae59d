#include "gslope/dataset.hpp"

#include "gslope/errors.hpp"
#include "gslope/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace gslope {

namespace {

bool parse_full_double(std::string_view tok, double& out) {
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_full_index(std::string_view tok, long long& out) {
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), last, out);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> toks;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) toks.push_back(line.substr(i, j - i));
    i = j;
  }
  return toks;
}

}  // namespace

Index GroupPartition::total_cols() const {
  Index total = 0;
  for (const auto& g : groups) total += static_cast<Index>(g.size());
  return total;
}

void GroupPartition::validate(Index d) const {
  if (weights.size() != size())
    throw std::invalid_argument("partition: weights length does not match group count");
  for (Index i = 0; i < weights.size(); ++i)
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
      throw std::invalid_argument("partition: weights must be positive and finite");
  std::vector<char> seen(static_cast<std::size_t>(d), 0);
  Index covered = 0;
  for (const auto& g : groups) {
    if (g.empty()) throw std::invalid_argument("partition: empty group");
    for (Index col : g) {
      if (col < 0 || col >= d) throw std::invalid_argument("partition: column index out of range");
      if (seen[static_cast<std::size_t>(col)])
        throw std::invalid_argument("partition: groups are not disjoint");
      seen[static_cast<std::size_t>(col)] = 1;
      ++covered;
    }
  }
  if (covered != d) throw std::invalid_argument("partition: groups do not cover all columns");
}

GroupLayout GroupLayout::build(const GroupPartition& partition) {
  GroupLayout layout;
  layout.offsets.reserve(partition.groups.size() + 1);
  layout.offsets.push_back(0);
  layout.indices.reserve(static_cast<std::size_t>(partition.total_cols()));
  layout.contiguous = true;
  for (const auto& g : partition.groups) {
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (k > 0 && g[k] != g[k - 1] + 1) layout.contiguous = false;
      layout.indices.push_back(g[k]);
    }
    layout.offsets.push_back(static_cast<Index>(layout.indices.size()));
  }
  return layout;
}

Vector group_norms(const Vector& b, const GroupLayout& layout) {
  const Index m = layout.group_count();
  Vector norms(m);
  for (Index g = 0; g < m; ++g) {
    const Index size = layout.group_size(g);
    if (layout.contiguous) {
      norms[g] = b.segment(layout.group_first(g), size).norm();
    } else {
      double ss = 0.0;
      for (Index k = layout.offsets[g]; k < layout.offsets[g + 1]; ++k) {
        const double v = b[layout.indices[static_cast<std::size_t>(k)]];
        ss += v * v;
      }
      norms[g] = std::sqrt(ss);
    }
  }
  return norms;
}

LambdaSequence LambdaSequence::from_explicit(Vector lambdas) {
  if (lambdas.size() == 0) throw std::invalid_argument("lambda: empty sequence");
  for (Index i = 0; i < lambdas.size(); ++i) {
    if (!std::isfinite(lambdas[i]) || lambdas[i] < 0.0)
      throw std::invalid_argument("lambda: entries must be finite and nonnegative");
    if (i > 0 && lambdas[i] > lambdas[i - 1])
      throw std::invalid_argument("lambda: sequence must be non-increasing");
  }
  if (!(lambdas[0] > 0.0))
    throw std::invalid_argument("lambda: at least one entry must be positive");
  LambdaSequence seq;
  seq.lambdas = std::move(lambdas);
  return seq;
}

Dataset parse_libsvm(std::istream& in, Index dim_override) {
  std::vector<double> labels;
  std::vector<std::vector<std::pair<Index, double>>> rows;
  long long max_index = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto toks = split_ws(line);
    if (toks.empty()) continue;  // skip blank lines
    double label;
    if (!parse_full_double(toks[0], label) || !std::isfinite(label))
      throw parse_error(lineno, "malformed label '" + std::string(toks[0]) + "'");
    std::vector<std::pair<Index, double>> row;
    row.reserve(toks.size() - 1);
    long long prev_index = 0;
    for (std::size_t t = 1; t < toks.size(); ++t) {
      const std::string_view tok = toks[t];
      const std::size_t colon = tok.find(':');
      if (colon == std::string_view::npos || colon == 0 || colon + 1 == tok.size())
        throw parse_error(lineno, "malformed feature token '" + std::string(tok) + "'");
      long long index;
      double value;
      if (!parse_full_index(tok.substr(0, colon), index) || index < 1)
        throw parse_error(lineno, "malformed feature index in '" + std::string(tok) + "'");
      if (!parse_full_double(tok.substr(colon + 1), value) || !std::isfinite(value))
        throw parse_error(lineno, "malformed feature value in '" + std::string(tok) + "'");
      if (index <= prev_index)
        throw parse_error(lineno, "feature indices must be strictly increasing");
      if (dim_override > 0 && index > dim_override)
        throw parse_error(lineno, "feature index " + std::to_string(index) +
                                      " exceeds declared dimension " +
                                      std::to_string(dim_override));
      prev_index = index;
      row.emplace_back(static_cast<Index>(index - 1), value);
    }
    max_index = std::max(max_index, prev_index);
    labels.push_back(label);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw parse_error(0, "empty stream");

  Dataset ds;
  const Index n = static_cast<Index>(rows.size());
  const Index d0 = dim_override > 0 ? dim_override : static_cast<Index>(max_index);
  ds.X0 = Matrix::Zero(n, d0);
  ds.y.resize(n);
  bool binary = true;
  for (Index i = 0; i < n; ++i) {
    ds.y[i] = labels[static_cast<std::size_t>(i)];
    if (ds.y[i] != 1.0 && ds.y[i] != -1.0) binary = false;
    for (const auto& [j, v] : rows[static_cast<std::size_t>(i)]) ds.X0(i, j) = v;
  }
  ds.labels_kind = binary ? LabelsKind::binary : LabelsKind::regression;
  return ds;
}

void serialize_libsvm(std::ostream& out, const Dataset& dataset) {
  char buf[64];
  for (Index i = 0; i < dataset.rows(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", dataset.y[i]);
    out << buf;
    for (Index j = 0; j < dataset.cols(); ++j) {
      const double v = dataset.X0(i, j);
      if (v == 0.0) continue;
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << ' ' << (j + 1) << ':' << buf;
    }
    out << '\n';
  }
}

GroupedDesign expand_groups(const Dataset& dataset, std::int64_t max_size, std::uint64_t seed,
                            GroupWeightRule weight_rule) {
  if (max_size < 1) throw std::invalid_argument("expand_groups: max group size must be >= 1");
  const Index d0 = dataset.cols();
  Rng rng(seed);
  std::vector<Index> sizes(static_cast<std::size_t>(d0));
  Index d = 0;
  for (Index i = 0; i < d0; ++i) {
    sizes[static_cast<std::size_t>(i)] = static_cast<Index>(rng.uniform_int(1, max_size));
    d += sizes[static_cast<std::size_t>(i)];
  }

  GroupedDesign design;
  design.X.resize(dataset.rows(), d);
  design.y = dataset.y;
  design.partition.groups.resize(static_cast<std::size_t>(d0));
  design.partition.weights.resize(d0);
  Index col = 0;
  for (Index i = 0; i < d0; ++i) {
    const Index k = sizes[static_cast<std::size_t>(i)];
    auto& group = design.partition.groups[static_cast<std::size_t>(i)];
    group.reserve(static_cast<std::size_t>(k));
    for (Index r = 0; r < k; ++r) {
      design.X.col(col) = dataset.X0.col(i);
      group.push_back(col);
      ++col;
    }
    design.partition.weights[i] =
        weight_rule == GroupWeightRule::group_lasso ? std::sqrt(static_cast<double>(k)) : 1.0;
  }
  return design;
}

LambdaSequence oscar_lambdas(const GroupedDesign& design, double p, double tau) {
  if (!(p > 0.0)) throw std::invalid_argument("oscar_lambdas: p must be positive");
  const double alpha1 = p * (design.X.transpose() * design.y).cwiseAbs().maxCoeff();
  if (!(alpha1 > 0.0))
    throw std::invalid_argument("oscar_lambdas: X^T y is identically zero, all-zero lambda");
  const double alpha2 = alpha1 / static_cast<double>(design.d());
  const Index m = design.m();
  Vector lambdas(m);
  for (Index i = 0; i < m; ++i)
    lambdas[i] = alpha1 + alpha2 * static_cast<double>(m - 1 - i);
  LambdaSequence seq = LambdaSequence::from_explicit(std::move(lambdas));
  seq.provenance = LambdaSequence::Provenance::oscar;
  seq.oscar_p = p;
  seq.oscar_tau = tau;
  return seq;
}

Dataset scale_columns_unit_norm(Dataset dataset) {
  for (Index j = 0; j < dataset.cols(); ++j) {
    const double norm = dataset.X0.col(j).norm();
    if (norm > 0.0) dataset.X0.col(j) /= norm;
  }
  return dataset;
}

}  // namespace gslope
