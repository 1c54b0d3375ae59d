#include <doctest.h>

#include <gslope/bench.hpp>
#include <gslope/errors.hpp>

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gslope;

TEST_CASE("make_synthetic plants the advertised signal") {
  SyntheticDataset s = make_synthetic(30, 50, 7, 0.0, 99);
  CHECK(s.data.X0.rows() == 30);
  CHECK(s.data.X0.cols() == 50);
  REQUIRE(s.beta_true.size() == 50);
  REQUIRE(s.true_support.size() == 7);
  for (std::size_t i = 1; i < s.true_support.size(); ++i)
    CHECK(s.true_support[i - 1] < s.true_support[i]);
  Index nonzeros = 0;
  for (Index j = 0; j < 50; ++j) {
    if (s.beta_true[j] != 0.0) {
      ++nonzeros;
      CHECK(std::abs(s.beta_true[j]) == 1.0);
    }
  }
  CHECK(nonzeros == 7);
  // Zero noise means y is exactly X0 * beta_true.
  CHECK((s.data.y - s.data.X0 * s.beta_true).cwiseAbs().maxCoeff() == 0.0);

  // Same seed, same dataset; another seed differs.
  SyntheticDataset again = make_synthetic(30, 50, 7, 0.0, 99);
  CHECK((again.data.X0 - s.data.X0).cwiseAbs().maxCoeff() == 0.0);
  SyntheticDataset other = make_synthetic(30, 50, 7, 0.0, 100);
  CHECK((other.data.X0 - s.data.X0).cwiseAbs().maxCoeff() > 0.0);

  SyntheticDataset noisy = make_synthetic(30, 50, 7, 0.3, 99);
  const double dev = (noisy.data.y - noisy.data.X0 * noisy.beta_true).norm();
  CHECK(dev > 0.0);
  CHECK(dev < 0.3 * std::sqrt(30.0) * 3.0);
}

namespace {

ExperimentSpec small_spec() {
  ExperimentSpec spec;
  spec.synth_n = 40;
  spec.synth_d0 = 60;
  spec.synth_k = 5;
  spec.synth_sigma = 0.1;
  spec.group_max_size = 4;
  spec.trials = 2;
  spec.seed = 11;
  spec.config.gap_tol = 1e-7;
  spec.config.max_iter = 50000;
  return spec;
}

}  // namespace

TEST_CASE("run_experiment produces consistent two-arm reports") {
  ExperimentSpec spec = small_spec();
  Report report = run_experiment(spec);
  REQUIRE(report.specs.size() == 2);
  const SpecResult& off = report.specs[0];
  const SpecResult& on = report.specs[1];
  CHECK(off.screening == "off");
  CHECK(on.screening == "on");
  CHECK(off.rel_time_pct == 100.0);
  CHECK(off.trials.size() == 2);
  CHECK(on.trials.size() == 2);
  CHECK((off.beta - on.beta).cwiseAbs().maxCoeff() < 1e-5);

  // Both traces end with rates filled against the same reference.
  REQUIRE_FALSE(on.trace.records.empty());
  for (const TraceRecord& rec : on.trace.records) {
    CHECK(rec.rate >= 0.0);
    CHECK(rec.rate <= 1.0);
  }
  CHECK(on.trace.records.back().rate == doctest::Approx(1.0));

  // Determinism: a rerun reproduces everything but the wall clock.
  Report rerun = run_experiment(spec);
  for (std::size_t a = 0; a < 2; ++a) {
    REQUIRE(rerun.specs[a].trials.size() == report.specs[a].trials.size());
    for (std::size_t t = 0; t < rerun.specs[a].trials.size(); ++t) {
      CHECK(rerun.specs[a].trials[t].iters == report.specs[a].trials[t].iters);
      CHECK(rerun.specs[a].trials[t].gap == report.specs[a].trials[t].gap);
      CHECK(rerun.specs[a].trials[t].active_groups ==
            report.specs[a].trials[t].active_groups);
    }
    CHECK((rerun.specs[a].beta - report.specs[a].beta).cwiseAbs().maxCoeff() ==
          0.0);
  }
}

TEST_CASE("single-arm experiments honor the screening mode") {
  ExperimentSpec spec = small_spec();
  spec.screening = ScreeningMode::on;
  Report on_only = run_experiment(spec);
  REQUIRE(on_only.specs.size() == 1);
  CHECK(on_only.specs[0].screening == "on");
  CHECK(on_only.specs[0].rel_time_pct == 100.0);

  spec.screening = ScreeningMode::off;
  Report off_only = run_experiment(spec);
  REQUIRE(off_only.specs.size() == 1);
  CHECK(off_only.specs[0].screening == "off");
}

TEST_CASE("csv report has the exact column layout") {
  ExperimentSpec spec = small_spec();
  spec.trials = 1;
  Report report = run_experiment(spec);
  std::ostringstream out;
  write_report_csv(report, out);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "spec_id,solver,screening,trial,wall_s,iters,gap,active_groups,rel_time_pct");
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 8);
  }
  CHECK(rows == 2);  // two arms, one trial each
}

TEST_CASE("json report parses and mirrors the csv content") {
  ExperimentSpec spec = small_spec();
  spec.trials = 2;
  Report report = run_experiment(spec);
  std::ostringstream out;
  write_report_json(report, out);
  const nlohmann::json parsed = nlohmann::json::parse(out.str());
  REQUIRE(parsed.is_array());
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0]["spec_id"] == report.specs[0].spec_id);
  CHECK(parsed[0]["screening"] == "off");
  CHECK(parsed[0]["trials"].size() == 2);
  CHECK(parsed[1]["trials"][1]["iters"].get<Index>() ==
        report.specs[1].trials[1].iters);
}

TEST_CASE("emit_report writes report and trace files") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "gslope_test_emit";
  fs::remove_all(dir);
  ExperimentSpec spec = small_spec();
  spec.trials = 1;
  Report report = run_experiment(spec);
  emit_report(report, "csv", dir.string());
  CHECK(fs::exists(dir / "report.csv"));
  for (const SpecResult& res : report.specs) {
    const fs::path trace = dir / (res.spec_id + "_trace.csv");
    REQUIRE(fs::exists(trace));
    std::ifstream in(trace);
    std::string header;
    std::getline(in, header);
    CHECK(header == "iter,active_groups,gap,rate");
  }
  emit_report(report, "json", dir.string());
  CHECK(fs::exists(dir / "report.json"));
  fs::remove_all(dir);
}

TEST_CASE("trial parallelism does not change the results") {
  ExperimentSpec spec = small_spec();
  spec.trials = 4;
  Report serial = run_experiment(spec);
  setenv("GSLOPE_THREADS", "3", 1);
  CHECK(thread_cap() == 3);
  Report parallel = run_experiment(spec);
  unsetenv("GSLOPE_THREADS");
  CHECK(thread_cap() == 1);
  for (std::size_t a = 0; a < serial.specs.size(); ++a) {
    for (std::size_t t = 0; t < 4; ++t) {
      CHECK(serial.specs[a].trials[t].iters == parallel.specs[a].trials[t].iters);
      CHECK(serial.specs[a].trials[t].gap == parallel.specs[a].trials[t].gap);
    }
  }
}

TEST_CASE("spgd experiments run both arms with consistent results") {
  ExperimentSpec spec = small_spec();
  spec.solver = "spgd";
  spec.synth_n = 80;
  spec.config.batch_size = 20;
  spec.config.inner_iters = 20;
  spec.config.gap_tol = 1e-6;
  Report report = run_experiment(spec);
  REQUIRE(report.specs.size() == 2);
  CHECK(report.specs[0].spec_id == "spgd_off");
  CHECK(report.specs[1].spec_id == "spgd_on");
  for (const SpecResult& res : report.specs)
    for (const TrialRow& row : res.trials) CHECK(row.gap <= 1e-6);
}

TEST_CASE("invalid experiment specs are rejected") {
  ExperimentSpec bad = small_spec();
  bad.solver = "sgd";
  CHECK_THROWS(run_experiment(bad));

  ExperimentSpec neg = small_spec();
  neg.trials = 0;
  CHECK_THROWS(run_experiment(neg));

  ExperimentSpec missing = small_spec();
  missing.data_path = "/nonexistent/file.libsvm";
  CHECK_THROWS(run_experiment(missing));
}
