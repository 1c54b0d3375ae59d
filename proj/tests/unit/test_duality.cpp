#include <doctest.h>

#include <gslope/decouple.hpp>
#include <gslope/duality.hpp>
#include <gslope/rng.hpp>
#include <gslope/solver.hpp>

#include "../support/instances.hpp"
#include "../support/oracles.hpp"

#include <cmath>
#include <stdexcept>

using namespace gslope;

namespace {

testing::InstanceParams small_params() {
  testing::InstanceParams prm;
  prm.n_min = 10;
  prm.n_max = 30;
  prm.d_min = 12;
  prm.d_max = 50;
  prm.m_min = 4;
  prm.m_max = 10;
  prm.size_max = 5;
  return prm;
}

}  // namespace

TEST_CASE("conjugate_value maximizes u*theta - 0.5*(u - y)^2") {
  Rng rng(301);
  for (int rep = 0; rep < 20; ++rep) {
    const double theta = 4.0 * (rng.uniform() - 0.5);
    const double y = 4.0 * (rng.uniform() - 0.5);
    double best = -1e300;
    for (double u = -50.0; u <= 50.0; u += 1e-3)
      best = std::max(best, u * theta - 0.5 * (u - y) * (u - y));
    CHECK(conjugate_value(theta, y) == doctest::Approx(best).epsilon(1e-5));
  }
}

TEST_CASE("dual_feasible compares sorted cumulative sums") {
  Vector lam(3);
  lam << 3, 2, 1;

  Vector inside(3);
  inside << 2.9, 0.5, 1.9;  // sorted: 2.9, 1.9, 0.5 ; prefixes 2.9, 4.8, 5.3
  CHECK(dual_feasible(inside, lam));

  Vector outside_first(3);
  outside_first << 3.5, 0, 0;  // first prefix exceeds 3
  CHECK_FALSE(dual_feasible(outside_first, lam));

  Vector outside_tail(3);
  outside_tail << 2.5, 2.4, 1.5;  // total 6.4 > 6 while prefixes 2.5, 4.9 pass
  CHECK_FALSE(dual_feasible(outside_tail, lam));

  // The boundary itself is feasible (small slack tolerance).
  CHECK(dual_feasible(lam, lam));
}

TEST_CASE("dual candidate is always feasible and scales correctly") {
  Rng rng(307);
  testing::InstanceParams prm = small_params();
  for (int rep = 0; rep < 30; ++rep) {
    GroupedProblem problem = testing::random_problem(rng, prm);
    DecoupledProblem dp = decouple(problem);
    Vector b = testing::random_vector(rng, dp.d());
    if (rep % 3 == 0) b.setZero();
    DualState dual = dual_candidate(b, dp);
    CHECK(dual.feasible);
    CHECK(dual.scale <= 1.0 + 1e-15);
    CHECK(dual.scale > 0.0);
    // theta is a scaled residual.
    Vector residual = dp.Xhat * b - dp.y;
    CHECK((dual.theta - dual.scale * residual).cwiseAbs().maxCoeff() < 1e-12);
    // Reported dual value matches its definition.
    CHECK(dual.dual_value ==
          doctest::Approx(-0.5 * dual.theta.squaredNorm() - dual.theta.dot(dp.y))
              .epsilon(1e-12));
  }
}

TEST_CASE("weak duality holds for every candidate pair") {
  Rng rng(311);
  testing::InstanceParams prm = small_params();
  for (int rep = 0; rep < 20; ++rep) {
    GroupedProblem problem = testing::random_problem(rng, prm);
    DecoupledProblem dp = decouple(problem);
    for (int inner = 0; inner < 10; ++inner) {
      Vector b = 2.0 * testing::random_vector(rng, dp.d());
      DualState dual = dual_candidate(b, dp);
      GapCertificate cert = duality_gap(b, dual, dp);
      CHECK(cert.gap >= 0.0);
      CHECK(cert.primal >= cert.dual - 1e-9);
      CHECK(cert.radius == doctest::Approx(std::sqrt(2.0 * cert.gap)));
    }
  }
}

TEST_CASE("gap collapses at the optimum") {
  Rng rng(313);
  testing::InstanceParams prm = small_params();
  prm.m_min = 4;
  prm.m_max = 6;
  prm.d_min = 8;
  prm.d_max = 25;
  for (int rep = 0; rep < 5; ++rep) {
    GroupedProblem problem = testing::random_problem(rng, prm);
    DecoupledProblem dp = decouple(problem);
    SolverConfig cfg;
    cfg.gap_tol = 1e-13;
    cfg.max_iter = 200000;
    cfg.adaptive_restart = true;
    SolverRun run = apgd_solve(dp, cfg);
    REQUIRE(run.converged);
    DualState dual = dual_candidate(run.b_final, dp);
    GapCertificate cert = duality_gap(run.b_final, dual, dp);
    CHECK(cert.gap <= 1e-12);
    CHECK(cert.radius <= 2e-6);
  }
}

TEST_CASE("feasibility certifies the Fenchel inequality on group norms") {
  Rng rng(317);
  testing::InstanceParams prm = small_params();
  GroupedProblem problem = testing::random_problem(rng, prm);
  DecoupledProblem dp = decouple(problem);
  const Vector& lam = dp.lambda.lambdas;
  for (int rep = 0; rep < 50; ++rep) {
    Vector b = 3.0 * testing::random_vector(rng, dp.d());
    DualState dual = dual_candidate(b, dp);
    REQUIRE(dual.feasible);
    // <theta, Xhat c> <= J(group norms of c) for any c: the group dual norms
    // paired with arbitrary magnitudes obey the sorted-l1 bound.
    for (int inner = 0; inner < 20; ++inner) {
      Vector c = testing::random_vector(rng, dp.d()).cwiseAbs();
      Vector cnorms = group_norms(c, dp.layout);
      const double lhs = dual.group_dual_norms.dot(cnorms);
      const double rhs = oracle::sorted_l1_value(cnorms, lam);
      CHECK(lhs <= rhs + 1e-6 * std::max(1.0, std::abs(rhs)));
    }
  }
}

TEST_CASE("gap_from_primal rejects infeasible duals and negative gaps") {
  DualState dual;
  dual.feasible = false;
  dual.dual_value = 0.0;
  CHECK_THROWS_AS(gap_from_primal(1.0, dual), std::invalid_argument);

  dual.feasible = true;
  dual.dual_value = 2.0;
  CHECK_THROWS_AS(gap_from_primal(1.0, dual), std::runtime_error);

  // Tiny negative gaps from floating point cancellation clamp to zero.
  dual.dual_value = 1.0 + 1e-12;
  GapCertificate cert = gap_from_primal(1.0, dual);
  CHECK(cert.gap == 0.0);
  CHECK(cert.radius == 0.0);

  dual.dual_value = 0.25;
  cert = gap_from_primal(1.0, dual);
  CHECK(cert.gap == doctest::Approx(0.75));
  CHECK(cert.radius == doctest::Approx(std::sqrt(1.5)));
}
