#include <doctest.h>

#include <gslope/rng.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

using gslope::Rng;

TEST_CASE("rng reproducibility and stream independence") {
  Rng a(42), b(42), c(43);
  bool same = true, diff = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    same = same && x == b.next_u64();
    diff = diff || x != c.next_u64();
  }
  CHECK(same);
  CHECK(diff);

  // derive() gives a stable child seed that differs across salts.
  CHECK(Rng(7).derive(1) == Rng(7).derive(1));
  CHECK(Rng(7).derive(1) != Rng(7).derive(2));
  CHECK(Rng(7).derive(1) != Rng(8).derive(1));
  Rng child(Rng(7).derive(1));
  CHECK(child.next_u64() != Rng(7).next_u64());
}

TEST_CASE("uniform lies in [0,1) and has a sane mean") {
  Rng rng(5);
  double sum = 0.0;
  bool in_range = true;
  const int trials = 200000;
  for (int i = 0; i < trials; ++i) {
    const double u = rng.uniform();
    in_range = in_range && u >= 0.0 && u < 1.0;
    sum += u;
  }
  CHECK(in_range);
  // Mean of U(0,1) is 0.5 with sd 1/sqrt(12n); 5 sigma band.
  CHECK(std::abs(sum / trials - 0.5) < 5.0 / std::sqrt(12.0 * trials));
}

TEST_CASE("uniform_int covers the inclusive range uniformly") {
  Rng rng(11);
  std::vector<int> counts(6, 0);
  const int trials = 60000;
  for (int i = 0; i < trials; ++i) {
    const auto v = rng.uniform_int(2, 7);
    REQUIRE(v >= 2);
    REQUIRE(v <= 7);
    counts[static_cast<std::size_t>(v - 2)]++;
  }
  for (int cnt : counts) {
    // Each bucket expects trials/6 = 10000 with sd ~91; allow 6 sigma.
    CHECK(std::abs(cnt - trials / 6) < 600);
  }
  CHECK(rng.uniform_int(3, 3) == 3);
}

TEST_CASE("normal moments match a standard gaussian") {
  Rng rng(17);
  const int trials = 200000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < trials; ++i) {
    const double x = rng.normal();
    s1 += x;
    s2 += x * x;
  }
  CHECK(std::abs(s1 / trials) < 5.0 / std::sqrt(static_cast<double>(trials)));
  CHECK(std::abs(s2 / trials - 1.0) < 0.02);
}

TEST_CASE("sample_without_replacement returns distinct in-range draws") {
  Rng rng(23);
  std::vector<std::int64_t> scratch, out;
  rng.sample_without_replacement(10, 10, scratch, out);
  std::set<std::int64_t> seen(out.begin(), out.end());
  CHECK(seen.size() == 10);
  CHECK(*seen.begin() == 0);
  CHECK(*seen.rbegin() == 9);

  // Marginal inclusion probability of each item is k/n.
  std::vector<int> hits(50, 0);
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    rng.sample_without_replacement(50, 5, scratch, out);
    CHECK(out.size() == 5);
    for (auto v : out) hits[static_cast<std::size_t>(v)]++;
  }
  for (int h : hits) {
    // Expect trials/10 = 2000, sd ~42; allow 6 sigma.
    CHECK(std::abs(h - 2000) < 260);
  }
}
