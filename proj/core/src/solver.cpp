#include "gslope/solver.hpp"

#include "gslope/rng.hpp"
#include "gslope/sorted_l1.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace gslope {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Shrinkable copy of the decoupled problem restricted to the surviving groups.
// lambda is always the head of the full sequence, so its last entry is
// lambda_{|A|}, the screening threshold.
struct Working {
  const DecoupledProblem* full = nullptr;
  Matrix X;
  RowMatrix Xrows;  // row-major mirror, kept only for the stochastic solver
  bool keep_rows = false;
  Vector y;
  Vector lambda;
  Vector weights;
  Vector inv_weights;  // block spectral norms 1/w on the decoupled design
  GroupLayout layout;
  ActiveSet active;
  std::vector<Index> col_map;  // working column -> full decoupled column

  void init(const DecoupledProblem& dp, bool rows) {
    if (!dp.layout.contiguous)
      throw std::invalid_argument("solver: decoupled problem must have contiguous group layout");
    full = &dp;
    X = dp.Xhat;
    keep_rows = rows;
    if (rows) Xrows = dp.Xhat;
    y = dp.y;
    lambda = dp.lambda.lambdas;
    weights = dp.partition.weights;
    inv_weights = weights.cwiseInverse();
    layout = dp.layout;
    active = ActiveSet::full(dp.m());
    col_map.resize(static_cast<std::size_t>(dp.d()));
    std::iota(col_map.begin(), col_map.end(), Index{0});
  }

  // Drops the working groups at `positions` (ascending), compacting the design
  // and every vector in `vecs`. Returns false when no group survives.
  bool shrink(const std::vector<Index>& positions, Index iteration,
              std::initializer_list<Vector*> vecs) {
    const Index m_old = active.size();
    std::vector<char> removed(static_cast<std::size_t>(m_old), 0);
    for (Index pos : positions) removed[static_cast<std::size_t>(pos)] = 1;

    std::vector<Index> keep;
    keep.reserve(static_cast<std::size_t>(m_old) - positions.size());
    Index d_new = 0;
    for (Index g = 0; g < m_old; ++g) {
      if (removed[static_cast<std::size_t>(g)]) continue;
      keep.push_back(g);
      d_new += layout.group_size(g);
    }
    const Index m_new = static_cast<Index>(keep.size());

    Matrix X_new(X.rows(), d_new);
    RowMatrix Xr_new;
    if (keep_rows) Xr_new.resize(X.rows(), d_new);
    std::vector<Index> col_map_new(static_cast<std::size_t>(d_new));
    Vector weights_new(m_new);
    GroupPartition part;
    part.groups.resize(static_cast<std::size_t>(m_new));

    std::vector<Vector> vec_new(vecs.size());
    for (auto& v : vec_new) v.resize(d_new);

    Index off = 0;
    for (Index idx = 0; idx < m_new; ++idx) {
      const Index g = keep[static_cast<std::size_t>(idx)];
      const Index k = layout.group_size(g);
      const Index first = layout.group_first(g);
      X_new.middleCols(off, k) = X.middleCols(first, k);
      if (keep_rows) Xr_new.middleCols(off, k) = Xrows.middleCols(first, k);
      std::size_t vi = 0;
      for (Vector* v : vecs) {
        vec_new[vi].segment(off, k) = v->segment(first, k);
        ++vi;
      }
      auto& group = part.groups[static_cast<std::size_t>(idx)];
      group.reserve(static_cast<std::size_t>(k));
      for (Index j = 0; j < k; ++j) {
        col_map_new[static_cast<std::size_t>(off + j)] =
            col_map[static_cast<std::size_t>(first + j)];
        group.push_back(off + j);
      }
      weights_new[idx] = weights[g];
      off += k;
    }

    X = std::move(X_new);
    if (keep_rows) Xrows = std::move(Xr_new);
    col_map = std::move(col_map_new);
    weights = std::move(weights_new);
    inv_weights = weights.cwiseInverse();
    lambda = full->lambda.lambdas.head(m_new);
    part.weights = weights;
    layout = GroupLayout::build(part);
    std::size_t vi = 0;
    for (Vector* v : vecs) {
      *v = std::move(vec_new[vi]);
      ++vi;
    }
    active.remove_positions(positions, iteration);
    return m_new > 0;
  }

  Vector expand(const Vector& b) const {
    Vector out = Vector::Zero(full->d());
    for (Index j = 0; j < b.size(); ++j) out[col_map[static_cast<std::size_t>(j)]] = b[j];
    return out;
  }
};

struct IterCert {
  DualState dual;
  GapCertificate cert;
  double primal = 0.0;
  Vector xt_residual;
};

// Certified groups are hard-dropped only once the prox has already zeroed
// their block: the drop is then a no-op on the surviving dynamics, so a
// screened run tracks the unscreened trajectory instead of perturbing it.
// Deferred groups stay certified and fall out on a later pass.
std::vector<Index> ready_to_drop(const std::vector<Index>& certified, const Working& w,
                                 const Vector& b) {
  std::vector<Index> ready;
  ready.reserve(certified.size());
  for (Index pos : certified)
    if (b.segment(w.layout.group_first(pos), w.layout.group_size(pos)).isZero(0.0))
      ready.push_back(pos);
  return ready;
}

IterCert evaluate(const Working& w, const Vector& b, const Vector& Xb, Index iteration,
                  const char* solver_name) {
  IterCert ic;
  const Vector residual = Xb - w.y;
  ic.xt_residual.noalias() = w.X.transpose() * residual;
  ic.primal =
      0.5 * residual.squaredNorm() + eval_sorted_l1(group_norms(b, w.layout), w.lambda);
  if (!std::isfinite(ic.primal))
    throw std::runtime_error(std::string(solver_name) + ": objective diverged at iteration " +
                             std::to_string(iteration));
  ic.dual = dual_candidate_core(residual, ic.xt_residual, w.layout, w.lambda, w.y);
  ic.cert = gap_from_primal(ic.primal, ic.dual);
  return ic;
}

void finalize(SolverRun& run, const Working& w, const Vector& b, Index iterations, bool converged,
              double final_gap, Clock::time_point start) {
  run.b_final = w.expand(b);
  run.beta_final = recover_beta(*w.full, run.b_final);
  run.active = w.active;
  run.iterations = iterations;
  run.converged = converged;
  run.final_gap = final_gap;
  run.wall_seconds = seconds_since(start);
}

void validate_config(const DecoupledProblem& dp, const SolverConfig& cfg, bool stochastic) {
  if (cfg.max_iter < 1) throw std::invalid_argument("solver: max_iter must be >= 1");
  if (!(cfg.gap_tol > 0.0)) throw std::invalid_argument("solver: gap_tol must be positive");
  if (cfg.backtracking && !(cfg.backtrack_eta > 1.0))
    throw std::invalid_argument("solver: backtracking growth factor must exceed 1");
  if (cfg.fixed_L < 0.0) throw std::invalid_argument("solver: fixed_L must be nonnegative");
  if (stochastic) {
    if (cfg.batch_size < 1) throw std::invalid_argument("solver: batch size must be >= 1");
    if (cfg.batch_size > dp.n())
      throw std::invalid_argument("solver: batch size exceeds sample count");
    if (cfg.inner_iters < 1) throw std::invalid_argument("solver: inner iterations must be >= 1");
    if (cfg.gamma < 0.0) throw std::invalid_argument("solver: gamma must be nonnegative");
  }
  if (cfg.b0 && cfg.b0->size() != dp.d())
    throw std::invalid_argument("solver: warm start length mismatch");
}

double auto_gamma(const Working& w) {
  // Row-smoothness scale: the batch estimator's effective curvature clusters
  // around the Frobenius norm (sum of row norms), which also dominates the
  // spectral norm, so this step is safe without a separate L estimate.
  const double frob_sq = w.X.squaredNorm();
  return 0.5 / std::max(frob_sq, 1e-12);
}

}  // namespace

double lipschitz_estimate(const Matrix& X) {
  if (X.rows() == 0 || X.cols() == 0 || X.cwiseAbs().maxCoeff() == 0.0)
    throw std::invalid_argument("lipschitz_estimate: zero design");
  const Index d = X.cols();
  Vector v(d);
  for (Index j = 0; j < d; ++j)
    v[j] = 1.0 + 1e-3 * static_cast<double>((j % 13) - 6);  // deterministic, symmetry-breaking
  v /= v.norm();
  double sigma_sq = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Vector u = X.transpose() * (X * v);
    const double norm = u.norm();
    if (norm == 0.0) {
      v = Vector::Unit(d, static_cast<Index>(it) % d);
      continue;
    }
    const double next = v.dot(u);  // Rayleigh quotient, approaches sigma_max^2
    v = u / norm;
    if (it > 0 && std::abs(next - sigma_sq) <= 1e-6 * next) return 1.01 * next;
    sigma_sq = next;
  }
  throw std::runtime_error("lipschitz_estimate: power iteration did not converge");
}

double lipschitz_estimate(const DecoupledProblem& decoupled) {
  return lipschitz_estimate(decoupled.Xhat);
}

SolverRun apgd_solve(const DecoupledProblem& decoupled, const SolverConfig& config) {
  validate_config(decoupled, config, false);
  const auto start = Clock::now();
  Working w;
  w.init(decoupled, false);
  SolverRun run;

  Vector b = config.b0 ? *config.b0 : Vector::Zero(decoupled.d());
  double L;
  if (config.backtracking) {
    L = 1e-12;
    for (Index j = 0; j < w.X.cols(); ++j) L = std::max(L, w.X.col(j).squaredNorm());
  } else {
    L = config.fixed_L > 0.0 ? config.fixed_L : lipschitz_estimate(w.X);
  }
  double step = 1.0 / L;

  Vector Xb = w.X * b;
  Vector bhat = b;
  Vector Xbhat = Xb;
  double t_mom = 1.0;
  double last_primal = std::numeric_limits<double>::infinity();
  double initial_primal = std::numeric_limits<double>::quiet_NaN();
  bool gate_open = false;
  Index steps = 0;
  Vector grad(w.X.cols());

  while (true) {
    IterCert ic = evaluate(w, b, Xb, steps, "apgd_solve");
    if (std::isnan(initial_primal)) initial_primal = ic.primal;
    if (config.adaptive_restart && ic.primal > last_primal) {
      t_mom = 1.0;
      bhat = b;
      Xbhat = Xb;
    }
    last_primal = ic.primal;
    if (config.record_dual) run.dual_history.push_back(ic.dual.theta);
    run.gap_history.push_back(ic.cert);

    if (config.screening && !gate_open &&
        ic.cert.gap <= config.screen_gate_rel * initial_primal)
      gate_open = true;
    if (gate_open && w.active.size() > 0) {
      const auto certified = screen_fixpoint(ic.dual.group_dual_norms, w.inv_weights,
                                             ic.cert.radius, w.lambda, w.active.size());
      const auto removable = ready_to_drop(certified, w, b);
      if (!removable.empty()) {
        run.restart_iterations.push_back(steps);
        if (!w.shrink(removable, steps, {&b})) {
          // every group screened out: zero is the certified optimum
          run.trace.append(steps, 0, 0.0);
          finalize(run, w, b, steps, true, 0.0, start);
          return run;
        }
        Xb.noalias() = w.X * b;
        bhat = b;
        Xbhat = Xb;
        t_mom = 1.0;
        last_primal = std::numeric_limits<double>::infinity();
        // The initial L still bounds the reduced design's curvature, so the
        // surviving coordinates keep the exact update rule of an unscreened
        // run; only the momentum reset distinguishes the two trajectories.
        grad.resize(w.X.cols());
      }
    }
    run.trace.append(steps, w.active.size(), ic.cert.gap);

    if (ic.cert.gap <= config.gap_tol) {
      finalize(run, w, b, steps, true, ic.cert.gap, start);
      return run;
    }
    if (steps >= config.max_iter) {
      finalize(run, w, b, steps, false, ic.cert.gap, start);
      return run;
    }

    grad.noalias() = w.X.transpose() * (Xbhat - w.y);
    run.t_history.push_back(t_mom);
    Vector b_next;
    Vector Xb_next;
    if (config.backtracking) {
      const double f_hat = 0.5 * (Xbhat - w.y).squaredNorm();
      while (true) {
        b_next = prox_group_slope(bhat - grad / L, w.layout, w.lambda, 1.0 / L);
        Xb_next.noalias() = w.X * b_next;
        const double f_next = 0.5 * (Xb_next - w.y).squaredNorm();
        const Vector diff = b_next - bhat;
        const double model =
            f_hat + grad.dot(diff) + 0.5 * L * diff.squaredNorm() + 1e-12 * std::abs(f_hat);
        if (f_next <= model) break;
        L *= config.backtrack_eta;
        if (!(L < 1e30))
          throw std::runtime_error("apgd_solve: backtracking failed to find a stable step");
      }
      step = 1.0 / L;
    } else {
      b_next = prox_group_slope(bhat - step * grad, w.layout, w.lambda, step);
      Xb_next.noalias() = w.X * b_next;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_mom * t_mom));
    const double mu = (t_mom - 1.0) / t_next;
    bhat = b_next + mu * (b_next - b);
    Xbhat = Xb_next + mu * (Xb_next - Xb);
    b.swap(b_next);
    Xb.swap(Xb_next);
    t_mom = t_next;
    ++steps;
  }
}

SolverRun spgd_solve(const DecoupledProblem& decoupled, const SolverConfig& config) {
  validate_config(decoupled, config, true);
  const auto start = Clock::now();
  Working w;
  w.init(decoupled, true);
  SolverRun run;
  Rng rng(config.seed);

  Vector b = config.b0 ? *config.b0 : Vector::Zero(decoupled.d());
  const Index n = decoupled.n();
  const Index l = config.batch_size;
  double gamma = config.gamma > 0.0 ? config.gamma : auto_gamma(w);
  const double scale =
      config.paper_literal ? 1.0 / static_cast<double>(l)
                           : static_cast<double>(n) / static_cast<double>(l);

  Vector Xb = w.X * b;
  double initial_primal = std::numeric_limits<double>::quiet_NaN();
  bool gate_open = false;
  Index steps = 0;
  std::vector<std::int64_t> batch;
  std::vector<std::int64_t> scratch;

  while (true) {
    IterCert ic = evaluate(w, b, Xb, steps, "spgd_solve");
    if (std::isnan(initial_primal)) initial_primal = ic.primal;
    if (config.record_dual) run.dual_history.push_back(ic.dual.theta);
    run.gap_history.push_back(ic.cert);

    if (config.screening && !gate_open &&
        ic.cert.gap <= config.screen_gate_rel * initial_primal)
      gate_open = true;
    bool removed_any = false;
    if (gate_open && w.active.size() > 0) {
      const auto certified = screen_fixpoint(ic.dual.group_dual_norms, w.inv_weights,
                                             ic.cert.radius, w.lambda, w.active.size());
      const auto removable = ready_to_drop(certified, w, b);
      if (!removable.empty()) {
        run.restart_iterations.push_back(steps);
        if (!w.shrink(removable, steps, {&b})) {
          run.trace.append(steps, 0, 0.0);
          finalize(run, w, b, steps, true, 0.0, start);
          return run;
        }
        removed_any = true;
        Xb.noalias() = w.X * b;
        // gamma stays at its full-design value: still a stable step for the
        // reduced problem, and the surviving dynamics match an unscreened run.
      }
    }
    run.trace.append(steps, w.active.size(), ic.cert.gap);

    if (ic.cert.gap <= config.gap_tol) {
      finalize(run, w, b, steps, true, ic.cert.gap, start);
      return run;
    }
    if (steps >= config.max_iter) {
      finalize(run, w, b, steps, false, ic.cert.gap, start);
      return run;
    }

    // snapshot full gradient at b (recomputed when screening shrank the state)
    Vector vtilde;
    if (removed_any)
      vtilde.noalias() = w.X.transpose() * (Xb - w.y);
    else
      vtilde = std::move(ic.xt_residual);
    const Vector snap = b;
    Vector z = b;
    Vector v(z.size());
    for (Index t = 0; t < config.inner_iters; ++t) {
      rng.sample_without_replacement(static_cast<std::int64_t>(n),
                                     static_cast<std::int64_t>(l), scratch, batch);
      const Vector diff = z - snap;
      v = detail::vr_direction(w.Xrows, diff, batch, scale) + vtilde;
      z = prox_group_slope(z - gamma * v, w.layout, w.lambda, gamma);
    }
    b = std::move(z);
    Xb.noalias() = w.X * b;
    ++steps;
  }
}

namespace detail {

Vector vr_direction(const RowMatrix& X, const Vector& diff,
                    const std::vector<std::int64_t>& batch, double scale) {
  Vector acc = Vector::Zero(X.cols());
  for (const std::int64_t i : batch) {
    const double e = X.row(i).dot(diff);
    acc.noalias() += e * X.row(i).transpose();
  }
  return scale * acc;
}

}  // namespace detail

}  // namespace gslope
