#include "gslope/bench.hpp"

#include "gslope/decouple.hpp"
#include "gslope/errors.hpp"
#include "gslope/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <utility>

namespace gslope {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Groups whose decoupled coefficient block is exactly zero.
std::vector<Index> inactive_groups(const Vector& b_full, const GroupLayout& layout) {
  std::vector<Index> inactive;
  for (Index g = 0; g < layout.group_count(); ++g) {
    if (b_full.segment(layout.group_first(g), layout.group_size(g)).isZero(0.0))
      inactive.push_back(g);
  }
  return inactive;
}

}  // namespace

SyntheticDataset make_synthetic(Index n, Index d0, Index k_active, double noise_sigma,
                                std::uint64_t seed) {
  if (n < 1 || d0 < 1) throw std::invalid_argument("make_synthetic: dimensions must be positive");
  if (k_active < 0 || k_active > d0)
    throw std::invalid_argument("make_synthetic: active count must be in [0, d0]");
  if (noise_sigma < 0.0) throw std::invalid_argument("make_synthetic: sigma must be nonnegative");

  Rng rng(seed);
  SyntheticDataset out;
  out.data.X0.resize(n, d0);
  for (Index j = 0; j < d0; ++j)
    for (Index i = 0; i < n; ++i) out.data.X0(i, j) = rng.normal();

  out.beta_true = Vector::Zero(d0);
  std::vector<std::int64_t> scratch;
  std::vector<std::int64_t> picked;
  rng.sample_without_replacement(static_cast<std::int64_t>(d0),
                                 static_cast<std::int64_t>(k_active), scratch, picked);
  std::sort(picked.begin(), picked.end());
  out.true_support.reserve(picked.size());
  for (const std::int64_t j : picked) {
    out.beta_true[static_cast<Index>(j)] = rng.uniform() < 0.5 ? -1.0 : 1.0;
    out.true_support.push_back(static_cast<Index>(j));
  }

  out.data.y = out.data.X0 * out.beta_true;
  for (Index i = 0; i < n; ++i) out.data.y[i] += noise_sigma * rng.normal();
  out.data.labels_kind = LabelsKind::regression;
  return out;
}

int thread_cap() {
  const char* env = std::getenv("GSLOPE_THREADS");
  if (env == nullptr) return 1;
  const int v = std::atoi(env);
  return v >= 1 ? v : 1;
}

Report run_experiment(const ExperimentSpec& spec) {
  if (spec.trials < 1) throw std::invalid_argument("run_experiment: trials must be >= 1");
  if (spec.sparsity_index < 1 || spec.sparsity_index > 3)
    throw std::invalid_argument("run_experiment: sparsity index must be 1, 2 or 3");
  if (spec.solver != "apgd" && spec.solver != "spgd")
    throw std::invalid_argument("run_experiment: unknown solver '" + spec.solver + "'");

  Rng seed_source(spec.seed);

  Dataset ds;
  if (!spec.data_path.empty()) {
    std::ifstream in(spec.data_path);
    if (!in) throw std::runtime_error("run_experiment: cannot open " + spec.data_path);
    ds = parse_libsvm(in);
  } else {
    ds = make_synthetic(spec.synth_n, spec.synth_d0, spec.synth_k, spec.synth_sigma,
                        seed_source.derive(1))
             .data;
  }
  if (spec.standardize) ds = scale_columns_unit_norm(std::move(ds));

  GroupedDesign design = expand_groups(
      ds, spec.group_max_size, seed_source.derive(2),
      spec.group_lasso_weights ? GroupWeightRule::group_lasso : GroupWeightRule::unit);
  const double p = static_cast<double>(spec.sparsity_index) * std::exp(-spec.tau);
  LambdaSequence lambda = oscar_lambdas(design, p, spec.tau);
  GroupedProblem problem{std::move(design), std::move(lambda)};
  const DecoupledProblem decoupled = decouple(problem);

  std::vector<bool> arms;  // screening flag per arm, unscreened first
  switch (spec.screening) {
    case ScreeningMode::off: arms = {false}; break;
    case ScreeningMode::on: arms = {true}; break;
    case ScreeningMode::both: arms = {false, true}; break;
  }

  Report report;
  std::vector<SolverRun> first_runs;  // trial-0 run per arm
  for (const bool screen : arms) {
    SpecResult res;
    res.solver = spec.solver;
    res.screening = screen ? "on" : "off";
    res.spec_id = spec.solver + "_" + res.screening;

    SolverConfig base = spec.config;
    base.screening = screen;
    base.batch_size = std::min(base.batch_size, decoupled.n());

    std::vector<SolverRun> runs(static_cast<std::size_t>(spec.trials));
    auto run_trial = [&](Index t) {
      SolverConfig cfg = base;
      cfg.seed = Rng(spec.seed).derive(100 + static_cast<std::uint64_t>(t));
      runs[static_cast<std::size_t>(t)] = spec.solver == "apgd" ? apgd_solve(decoupled, cfg)
                                                                : spgd_solve(decoupled, cfg);
    };
    const int cap = thread_cap();
    if (cap <= 1 || spec.trials == 1) {
      for (Index t = 0; t < spec.trials; ++t) run_trial(t);
    } else {
      std::atomic<Index> next{0};
      std::vector<std::thread> pool;
      const int workers = std::min<int>(cap, static_cast<int>(spec.trials));
      pool.reserve(static_cast<std::size_t>(workers));
      for (int wi = 0; wi < workers; ++wi)
        pool.emplace_back([&] {
          for (Index t = next.fetch_add(1); t < spec.trials; t = next.fetch_add(1)) run_trial(t);
        });
      for (auto& th : pool) th.join();
    }

    double sum = 0.0;
    double sum_sq = 0.0;
    for (Index t = 0; t < spec.trials; ++t) {
      const SolverRun& run = runs[static_cast<std::size_t>(t)];
      res.trials.push_back({t, run.wall_seconds, run.iterations, run.final_gap,
                            run.active.size()});
      sum += run.wall_seconds;
      sum_sq += run.wall_seconds * run.wall_seconds;
    }
    res.mean_wall = sum / static_cast<double>(spec.trials);
    const double var =
        std::max(0.0, sum_sq / static_cast<double>(spec.trials) - res.mean_wall * res.mean_wall);
    res.std_wall = std::sqrt(var);
    res.trace = runs.front().trace;
    res.beta = runs.front().beta_final;
    first_runs.push_back(std::move(runs.front()));
    report.specs.push_back(std::move(res));
  }

  for (SpecResult& res : report.specs)
    res.rel_time_pct = 100.0 * (res.mean_wall / report.specs.front().mean_wall);

  // Safeness cross-check and rate reference: prefer the unscreened arm.
  if (arms.size() == 2) {
    const double diff = (first_runs[1].beta_final - first_runs[0].beta_final)
                            .lpNorm<Eigen::Infinity>();
    if (diff > 1e-5)
      throw safeness_error("screened and unscreened solutions differ by " + format_double(diff) +
                           " (max-norm), beyond the 1e-5 agreement bound");
  }
  const SolverRun& reference = first_runs.front();
  const std::vector<Index> ref_inactive = inactive_groups(reference.b_final, decoupled.layout);
  for (std::size_t a = 0; a < first_runs.size(); ++a)
    fill_rates(report.specs[a].trace, first_runs[a].active, ref_inactive);

  return report;
}

void write_report_csv(const Report& report, std::ostream& out) {
  out << "spec_id,solver,screening,trial,wall_s,iters,gap,active_groups,rel_time_pct\n";
  for (const SpecResult& res : report.specs) {
    for (const TrialRow& row : res.trials) {
      out << res.spec_id << ',' << res.solver << ',' << res.screening << ',' << row.trial << ','
          << format_double(row.wall_s) << ',' << row.iters << ',' << format_double(row.gap) << ','
          << row.active_groups << ',' << format_double(res.rel_time_pct) << '\n';
    }
  }
}

void write_report_json(const Report& report, std::ostream& out) {
  nlohmann::json specs = nlohmann::json::array();
  for (const SpecResult& res : report.specs) {
    nlohmann::json trials = nlohmann::json::array();
    for (const TrialRow& row : res.trials) {
      trials.push_back({{"trial", row.trial},
                        {"wall_s", row.wall_s},
                        {"iters", row.iters},
                        {"gap", row.gap},
                        {"active_groups", row.active_groups}});
    }
    specs.push_back({{"spec_id", res.spec_id},
                     {"solver", res.solver},
                     {"screening", res.screening},
                     {"mean_wall_s", res.mean_wall},
                     {"std_wall_s", res.std_wall},
                     {"rel_time_pct", res.rel_time_pct},
                     {"trials", std::move(trials)}});
  }
  out << specs.dump(2) << '\n';
}

void emit_report(const Report& report, const std::string& format, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  if (format == "csv") {
    std::ofstream out(dir / "report.csv");
    if (!out) throw std::runtime_error("emit_report: cannot write to " + out_dir);
    write_report_csv(report, out);
  } else if (format == "json") {
    std::ofstream out(dir / "report.json");
    if (!out) throw std::runtime_error("emit_report: cannot write to " + out_dir);
    write_report_json(report, out);
  } else {
    throw std::invalid_argument("emit_report: unknown format '" + format + "'");
  }

  for (const SpecResult& res : report.specs) {
    std::ofstream out(dir / (res.spec_id + "_trace.csv"));
    if (!out) throw std::runtime_error("emit_report: cannot write trace for " + res.spec_id);
    res.trace.to_csv(out);
  }
}

}  // namespace gslope
