#pragma once

#include "gslope/dataset.hpp"
#include "gslope/screening.hpp"
#include "gslope/solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace gslope {

struct SyntheticDataset {
  Dataset data;
  Vector beta_true;                 // length d0
  std::vector<Index> true_support;  // original feature indices of the nonzeros
};

// X0 has i.i.d. standard normal entries (filled column-major), beta_true has
// k_active entries of +-1 at positions sampled without replacement, and
// y = X0 beta_true + noise_sigma * standard normal noise. Reproducible from
// the seed alone.
SyntheticDataset make_synthetic(Index n, Index d0, Index k_active, double noise_sigma,
                                std::uint64_t seed);

enum class ScreeningMode { off, on, both };

struct ExperimentSpec {
  std::string data_path;  // LIBSVM file; empty selects the synthetic generator
  Index synth_n = 100;
  Index synth_d0 = 500;
  Index synth_k = 10;
  double synth_sigma = 0.1;

  Index group_max_size = 10;
  double tau = 3.0;
  int sparsity_index = 1;  // p = index * exp(-tau)
  bool group_lasso_weights = false;
  bool standardize = false;

  std::string solver = "apgd";  // "apgd" | "spgd"
  ScreeningMode screening = ScreeningMode::both;
  Index trials = 5;
  std::uint64_t seed = 1;
  // Per-solver knobs (gap_tol, gamma, batch/inner sizes, gate, max_iter, ...);
  // the screening and seed fields here are ignored and driven per arm/trial.
  SolverConfig config;
};

struct TrialRow {
  Index trial = 0;
  double wall_s = 0.0;
  Index iters = 0;
  double gap = 0.0;
  Index active_groups = 0;
};

struct SpecResult {
  std::string spec_id;
  std::string solver;
  std::string screening;  // "on" | "off"
  std::vector<TrialRow> trials;
  double mean_wall = 0.0;
  double std_wall = 0.0;
  double rel_time_pct = 100.0;  // vs the first arm's mean wall time
  ScreeningTrace trace;         // first trial's trace, rates filled in
  Vector beta;                  // first trial's solution on the expanded design
};

struct Report {
  std::vector<SpecResult> specs;
};

// Builds the grouped problem, decouples it once, then runs every requested
// screening arm for `trials` trials each (same data across trials, per-trial
// derived solver seeds). When both arms are present their solutions are
// cross-checked to 1e-5 max-norm (safeness_error beyond that) and screening
// rates are filled against the unscreened reference support. batch_size is
// clamped to n for the stochastic solver.
Report run_experiment(const ExperimentSpec& spec);

// CSV columns: spec_id,solver,screening,trial,wall_s,iters,gap,active_groups,
// rel_time_pct. JSON is an array of aggregate objects with nested trial rows.
// Each arm's trace goes to a sibling file <spec_id>_trace.csv under out_dir.
void emit_report(const Report& report, const std::string& format, const std::string& out_dir);
void write_report_csv(const Report& report, std::ostream& out);
void write_report_json(const Report& report, std::ostream& out);

// Parallel-trial cap from the GSLOPE_THREADS environment variable; 1 when
// unset or invalid.
int thread_cap();

}  // namespace gslope
