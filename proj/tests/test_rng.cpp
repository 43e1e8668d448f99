#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "netmirror/rng.hpp"

using namespace netmirror;

TEST_CASE("derived streams are deterministic and distinct") {
  CHECK(derive_seed(7, {1, 2}) == derive_seed(7, {1, 2}));
  CHECK(derive_seed(7, {1, 2}) != derive_seed(7, {2, 1}));
  CHECK(derive_seed(7, {1}) != derive_seed(8, {1}));
  CHECK(derive_seed(7, {0}) != derive_seed(7, {0, 0}));
  Rng a = make_rng(3, {4, 5}), b = make_rng(3, {4, 5});
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
}

TEST_CASE("uniform01 lies in [0,1) with mean one half") {
  Rng rng(11);
  std::vector<double> xs;
  for (int i = 0; i < 200000; ++i) {
    const double u = uniform01(rng);
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    xs.push_back(u);
  }
  CHECK(std::abs(testutil::mean(xs) - 0.5) < 3.5 * testutil::std_error(xs));
}

TEST_CASE("uniform_index covers the range evenly") {
  Rng rng(12);
  const std::size_t k = 7, draws = 70000;
  std::vector<double> counts(k, 0.0);
  for (std::size_t i = 0; i < draws; ++i) {
    const std::size_t v = uniform_index(rng, k);
    REQUIRE(v < k);
    counts[v] += 1;
  }
  double chi2 = 0;
  for (double c : counts) chi2 += (c - 10000.0) * (c - 10000.0) / 10000.0;
  CHECK(chi2 < 22.5);  // 6 dof, p ~ 0.001
  CHECK(uniform_index(rng, 1) == 0);
}

TEST_CASE("standard_normal moments") {
  Rng rng(13);
  std::vector<double> xs, sq;
  for (int i = 0; i < 100000; ++i) {
    const double z = standard_normal(rng);
    xs.push_back(z);
    sq.push_back(z * z);
  }
  CHECK(std::abs(testutil::mean(xs)) < 4 * testutil::std_error(xs));
  CHECK(std::abs(testutil::mean(sq) - 1.0) < 4 * testutil::std_error(sq));
}
