#include "gslope/bench.hpp"
#include "gslope/errors.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

struct Options {
  std::string data_path;
  std::string synthetic;  // "n,d0,k,sigma"
  long long group_max_size = 10;
  double tau = 3.0;
  int sparsity_index = 1;
  std::string solver = "apgd";
  std::string screening;
  double gamma = 0.0;
  long long batch_size = 30;
  long long inner_iters = 30;
  double gap_tol = 1e-6;
  long long trials = 5;
  unsigned long long seed = 1;
  bool paper_literal = false;
  std::string out;
  std::string format = "csv";
  bool standardize = false;
  bool group_lasso_weights = false;
  double screen_gate = 0.5;
  long long max_iter = 20000;
};

struct SynthParams {
  long long n = 0;
  long long d0 = 0;
  long long k = 0;
  double sigma = 0.0;
};

SynthParams parse_synthetic(const std::string& text) {
  SynthParams p;
  char extra = '\0';
  const int got = std::sscanf(text.c_str(), "%lld,%lld,%lld,%lf%c", &p.n, &p.d0, &p.k, &p.sigma,
                              &extra);
  if (got != 4)
    throw CLI::ValidationError("--synthetic", "expected n,d0,k,sigma (e.g. 100,500,10,0.1)");
  return p;
}

void add_problem_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--data", o.data_path, "LIBSVM dataset file")->check(CLI::ExistingFile);
  cmd->add_option("--synthetic", o.synthetic,
                  "Synthetic generator parameters n,d0,k,sigma (used when --data is absent)");
  cmd->add_option("--group-max-size", o.group_max_size,
                  "Max replicas per feature group, sizes drawn uniformly from {1..s}")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tau", o.tau, "OSCAR sparsity scale tau; p = i*exp(-tau)");
  cmd->add_option("--sparsity-index", o.sparsity_index, "Sparsity level index i in {1,2,3}")
      ->check(CLI::Range(1, 3));
  cmd->add_option("--seed", o.seed, "Base seed for data synthesis, grouping and solver draws");
  cmd->add_flag("--standardize", o.standardize,
                "Rescale original columns to unit norm before group expansion");
  cmd->add_flag("--group-lasso-weights", o.group_lasso_weights,
                "Use group weights sqrt(|I_i|) instead of 1");
}

void add_solver_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--solver", o.solver, "Solver: apgd (batch) or spgd (stochastic)")
      ->check(CLI::IsMember({"apgd", "spgd"}));
  cmd->add_option("--gamma", o.gamma, "SPGD step size; 0 selects an automatic step")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--batch-size", o.batch_size, "SPGD mini-batch size (clamped to n)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--inner-iters", o.inner_iters, "SPGD inner steps per outer iteration")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--gap-tol", o.gap_tol, "Duality-gap stopping tolerance")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-iter", o.max_iter, "Outer iteration cap")->check(CLI::PositiveNumber);
  cmd->add_flag("--paper-literal", o.paper_literal,
                "Scale the SPGD correction by 1/l instead of the unbiased n/l");
  cmd->add_option("--screen-gate", o.screen_gate,
                  "Warm-start gate: screening starts once gap <= gate * initial objective")
      ->check(CLI::NonNegativeNumber);
}

gslope::ExperimentSpec build_spec(const Options& o, const std::string& screening_mode) {
  gslope::ExperimentSpec spec;
  spec.data_path = o.data_path;
  if (spec.data_path.empty()) {
    if (o.synthetic.empty())
      throw CLI::ValidationError("--data/--synthetic", "either a dataset or synthetic parameters "
                                                       "are required");
    const SynthParams p = parse_synthetic(o.synthetic);
    spec.synth_n = p.n;
    spec.synth_d0 = p.d0;
    spec.synth_k = p.k;
    spec.synth_sigma = p.sigma;
  }
  spec.group_max_size = o.group_max_size;
  spec.tau = o.tau;
  spec.sparsity_index = o.sparsity_index;
  spec.group_lasso_weights = o.group_lasso_weights;
  spec.standardize = o.standardize;
  spec.solver = o.solver;
  if (screening_mode == "on")
    spec.screening = gslope::ScreeningMode::on;
  else if (screening_mode == "off")
    spec.screening = gslope::ScreeningMode::off;
  else
    spec.screening = gslope::ScreeningMode::both;
  spec.trials = o.trials;
  spec.seed = o.seed;
  spec.config.gap_tol = o.gap_tol;
  spec.config.max_iter = o.max_iter;
  spec.config.gamma = o.gamma;
  spec.config.batch_size = o.batch_size;
  spec.config.inner_iters = o.inner_iters;
  spec.config.paper_literal = o.paper_literal;
  spec.config.screen_gate_rel = o.screen_gate;
  return spec;
}

void print_summary(const gslope::Report& report) {
  for (const gslope::SpecResult& res : report.specs) {
    std::printf("%-10s mean %.4fs  sd %.4fs  rel %6.1f%%  iters %lld  gap %.3g  active %lld\n",
                res.spec_id.c_str(), res.mean_wall, res.std_wall, res.rel_time_pct,
                static_cast<long long>(res.trials.front().iters), res.trials.front().gap,
                static_cast<long long>(res.trials.front().active_groups));
  }
  if (report.specs.size() == 2 && report.specs[1].mean_wall > 0.0) {
    std::printf("speedup %.2fx (%s vs %s)\n",
                report.specs[0].mean_wall / report.specs[1].mean_wall,
                report.specs[1].spec_id.c_str(), report.specs[0].spec_id.c_str());
  }
}

void write_betas(const gslope::Report& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  for (const gslope::SpecResult& res : report.specs) {
    std::ofstream out(fs::path(out_dir) / (res.spec_id + "_beta.csv"));
    out << "index,beta\n";
    char buf[64];
    for (Eigen::Index j = 0; j < res.beta.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", res.beta[j]);
      out << j << ',' << buf << '\n';
    }
  }
}

int run_synth(const Options& o) {
  if (o.synthetic.empty())
    throw CLI::ValidationError("--synthetic", "synth requires --synthetic n,d0,k,sigma");
  if (o.out.empty()) throw CLI::ValidationError("--out", "synth requires an output file path");
  const SynthParams p = parse_synthetic(o.synthetic);
  const gslope::SyntheticDataset synth =
      gslope::make_synthetic(p.n, p.d0, p.k, p.sigma, o.seed);
  std::ofstream out(o.out);
  if (!out) throw std::runtime_error("cannot write " + o.out);
  gslope::serialize_libsvm(out, synth.data);
  std::ofstream support(o.out + ".support");
  for (const auto j : synth.true_support) support << j << '\n';
  std::printf("wrote %lld x %lld dataset to %s (support: %zu features)\n",
              static_cast<long long>(p.n), static_cast<long long>(p.d0), o.out.c_str(),
              synth.true_support.size());
  return 0;
}

int run_solve(const Options& o, const std::string& screening_mode) {
  gslope::ExperimentSpec spec = build_spec(o, screening_mode);
  spec.trials = 1;
  const gslope::Report report = gslope::run_experiment(spec);
  print_summary(report);
  if (!o.out.empty()) {
    gslope::emit_report(report, o.format, o.out);
    write_betas(report, o.out);
    std::printf("report written to %s\n", o.out.c_str());
  }
  return 0;
}

int run_bench(const Options& o, const std::string& screening_mode) {
  const gslope::ExperimentSpec spec = build_spec(o, screening_mode);
  const gslope::Report report = gslope::run_experiment(spec);
  print_summary(report);
  const std::string out_dir = o.out.empty() ? "gslope_out" : o.out;
  gslope::emit_report(report, o.format, out_dir);
  std::printf("report written to %s\n", out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Eigen::setNbThreads(gslope::thread_cap());

  CLI::App app{"Group SLOPE solver with gap-safe screening"};
  app.require_subcommand(1);
  Options o;

  CLI::App* solve = app.add_subcommand("solve", "Solve one problem and report the solution");
  std::string solve_screening = "on";
  add_problem_flags(solve, o);
  add_solver_flags(solve, o);
  solve->add_option("--screening", solve_screening, "Screening arm: on, off or both")
      ->check(CLI::IsMember({"on", "off", "both"}));
  solve->add_option("--out", o.out, "Output directory for report, trace and solution files");
  solve->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"csv", "json"}));

  CLI::App* bench = app.add_subcommand("bench", "Run the timed screening comparison");
  std::string bench_screening = "both";
  add_problem_flags(bench, o);
  add_solver_flags(bench, o);
  bench->add_option("--screening", bench_screening, "Arms to run: on, off or both")
      ->check(CLI::IsMember({"on", "off", "both"}));
  bench->add_option("--trials", o.trials, "Trials per arm")->check(CLI::PositiveNumber);
  bench->add_option("--out", o.out, "Output directory for report and trace files");
  bench->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"csv", "json"}));

  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic LIBSVM dataset");
  synth->add_option("--synthetic", o.synthetic, "Generator parameters n,d0,k,sigma")->required();
  synth->add_option("--seed", o.seed, "Generator seed");
  synth->add_option("--out", o.out, "Output LIBSVM file path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(synth)) return run_synth(o);
    if (app.got_subcommand(solve)) return run_solve(o, solve_screening);
    return run_bench(o, bench_screening);
  } catch (const gslope::safeness_error& e) {
    std::cerr << "safeness violation: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
