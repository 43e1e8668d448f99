#include <cmath>
#include <functional>

#include "doctest.h"
#include "helpers.hpp"
#include "netmirror/changepoint.hpp"
#include "netmirror/errors.hpp"
#include "netmirror/mds.hpp"
#include "netmirror/models.hpp"
#include "netmirror/theory.hpp"

using namespace netmirror;

namespace {

Eigen::VectorXd hinge_design_fit(const Eigen::VectorXd& ts, const Eigen::VectorXd& ys, const std::vector<std::size_t>& knots) {
  Eigen::MatrixXd X(ts.size(), 2 + knots.size());
  for (Eigen::Index i = 0; i < ts.size(); ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = ts(i);
    for (std::size_t k = 0; k < knots.size(); ++k) X(i, 2 + k) = std::max(0.0, ts(i) - ts(knots[k]));
  }
  // normal equations, independent of the QR used in the library
  const Eigen::VectorXd beta = (X.transpose() * X).ldlt().solve(X.transpose() * ys);
  return ys - X * beta;
}

// Best RSS over all admissible knot sets of the given size.
double brute_force_rss(const Eigen::VectorXd& ts, const Eigen::VectorXd& ys, std::size_t breaks) {
  const std::size_t m = ts.size();
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> knots;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    if (knots.size() == breaks) {
      best = std::min(best, hinge_design_fit(ts, ys, knots).squaredNorm());
      return;
    }
    for (std::size_t j = from; j + 2 < m; ++j) {
      knots.push_back(j);
      rec(j + 2);
      knots.pop_back();
    }
  };
  rec(1);
  return best;
}

double broken_line_rss_normal_eq(const Eigen::VectorXd& ts, const Eigen::VectorXd& ys, Eigen::Index k) {
  Eigen::MatrixXd X(ts.size(), 3);
  for (Eigen::Index i = 0; i < ts.size(); ++i) {
    const double u = ts(i) - ts(k);
    X.row(i) << 1.0, u, std::max(0.0, u);
  }
  const Eigen::Matrix3d G = X.transpose() * X;
  const Eigen::Vector3d beta = G.inverse() * (X.transpose() * ys);
  return (ys - X * beta).squaredNorm();
}

Eigen::VectorXd noise(Rng& rng, std::size_t m, double sd) {
  Eigen::VectorXd v(m);
  for (std::size_t i = 0; i < m; ++i) v(i) = sd * standard_normal(rng);
  return v;
}

}  // namespace

TEST_CASE("noiseless mirror samples are localized exactly") {
  const std::size_t m = 30;
  const Eigen::VectorXd ts = default_times(m);
  const Eigen::VectorXd ys = psi_z_target(m, 0.3, 0.9, 0.5).values;
  const LocalizeResult l2 = localize_l2(ts, ys);
  CHECK(l2.t_hat == 0.5);
  CHECK(l2.index == 15);
  REQUIRE(l2.scores.size() == m - 2);
  CHECK(l2.scores[13] < 1e-20);
  const LocalizeResult li = localize_linf(ts, ys);
  CHECK(li.t_hat == 0.5);
  CHECK(li.index == 15);
}

TEST_CASE("linear input falls back to the second time point") {
  const std::size_t m = 12;
  const Eigen::VectorXd ts = default_times(m);
  const Eigen::VectorXd ys = 3.0 * ts.array() - 1.0;
  const LocalizeResult l2 = localize_l2(ts, ys);
  CHECK(l2.index == 2);
  CHECK(l2.t_hat == ts(1));
  for (double s : l2.scores) CHECK(s < 1e-20);
  CHECK(localize_linf(ts, ys).index == 2);

  const Eigen::VectorXd same = psi_z_target(m, 0.4, 0.4, 0.5).values;
  CHECK(localize_l2(ts, same).index == 2);
  CHECK(localize_linf(ts, same).index == 2);
}

TEST_CASE("localizer argument checks") {
  const Eigen::VectorXd ts3 = default_times(3);
  CHECK_THROWS_AS(localize_l2(ts3, ts3), ParameterError);
  CHECK_THROWS_AS(localize_linf(ts3, ts3), ParameterError);
  Eigen::VectorXd ts = default_times(6);
  ts(3) = ts(2);
  CHECK_THROWS_AS(localize_l2(ts, ts), ParameterError);
  CHECK_THROWS_AS(localize_l2(default_times(6), default_times(5)), ParameterError);
}

TEST_CASE("broken-line residuals match the normal equations") {
  Rng rng(11);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t m = 4 + uniform_index(rng, 20);
    const Eigen::VectorXd ts = default_times(m);
    const Eigen::VectorXd ys = noise(rng, m, 1.0);
    const LocalizeResult r = localize_l2(ts, ys);
    for (std::size_t k = 2; k <= m - 1; ++k) {
      const double want = broken_line_rss_normal_eq(ts, ys, static_cast<Eigen::Index>(k - 1));
      CHECK(r.scores[k - 2] == doctest::Approx(want).epsilon(1e-8).scale(1.0));
    }
  }
}

TEST_CASE("localizers stay interior and ignore affine maps") {
  Rng rng(12);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t m = 4 + uniform_index(rng, 36);
    Eigen::VectorXd ts = default_times(m);
    if (rep % 3 == 0) {
      ts = testutil::random_matrix(rng, static_cast<Eigen::Index>(m), 1, 0.0, 10.0).col(0);
      std::sort(ts.data(), ts.data() + ts.size());
    }
    const Eigen::VectorXd ys = noise(rng, m, 1.0) + 4.0 * (ts.array() - ts(m / 2)).max(0.0).matrix();
    const double a = (uniform01(rng) < 0.5 ? -1.0 : 1.0) * (0.5 + 3.0 * uniform01(rng));
    const double b = 10.0 * standard_normal(rng);
    const Eigen::VectorXd mapped = (a * ys.array() + b).matrix();
    for (auto loc : {&localize_l2, &localize_linf}) {
      const LocalizeResult r = loc(ts, ys);
      CHECK(r.index >= 2);
      CHECK(r.index <= m - 1);
      CHECK(r.t_hat == ts(static_cast<Eigen::Index>(r.index - 1)));
      CHECK(loc(ts, mapped).index == r.index);
    }
  }
}

TEST_CASE("chebyshev fit values") {
  // residual bound of the best line through a symmetric zig-zag is its half-amplitude
  const Eigen::VectorXd ts = default_times(8);
  Eigen::VectorXd ys(8);
  ys << 0, 1, 0, 1, 0, 1, 0, 1;
  const LocalizeResult r = localize_linf(ts, ys);
  for (double s : r.scores) {
    CHECK(s <= 0.5 + 1e-9);
    CHECK(s >= 0.0);
  }

  Eigen::MatrixXd G(2, 2);
  G << 1, 1, 1, -1;
  Eigen::Vector2d h(4, 2), c(-1, -2);
  CHECK(simplex_min(G, h, c) == doctest::Approx(-8.0));
}

TEST_CASE("single outlier diagnostic") {
  const std::size_t m = 30;
  const Eigen::VectorXd ts = default_times(m);
  Eigen::VectorXd ys = psi_z_target(m, 0.3, 0.9, 0.5).values;
  ys(3) += 0.5;
  MESSAGE("outlier at t_4: l2 -> " << localize_l2(ts, ys).t_hat << ", linf -> " << localize_linf(ts, ys).t_hat);
}

TEST_CASE("segmented fit equals exhaustive search over knot sets") {
  Rng rng(13);
  for (int rep = 0; rep < 12; ++rep) {
    const std::size_t m = 6 + uniform_index(rng, 8);
    Eigen::VectorXd ts = default_times(m);
    if (rep % 2) {
      ts = testutil::random_matrix(rng, static_cast<Eigen::Index>(m), 1, 0.0, 5.0).col(0);
      std::sort(ts.data(), ts.data() + ts.size());
    }
    const Eigen::VectorXd ys = noise(rng, m, 1.0);
    for (std::size_t K = 0; K <= 3; ++K) {
      const double want = brute_force_rss(ts, ys, K);
      if (!std::isfinite(want)) {
        CHECK_THROWS_AS(segmented_fit(ts, ys, K), ParameterError);
        continue;
      }
      const auto [rss, knots] = segmented_fit(ts, ys, K);
      CHECK(rss == doctest::Approx(want).epsilon(1e-7).scale(1.0));
      CHECK(knots.size() == K);
      CHECK(hinge_design_fit(ts, ys, knots).squaredNorm() == doctest::Approx(rss).epsilon(1e-7).scale(1.0));
    }
  }
}

TEST_CASE("segmented BIC on clean and null signals") {
  const std::size_t m = 40;
  const Eigen::VectorXd ts = default_times(m);
  const Eigen::VectorXd kink = psi_z_target(m, 0.2, 0.7, 0.4).values;
  const SegmentedFit one = segmented_bic(ts, kink, 20);
  CHECK(one.breaks.size() == 1);
  CHECK(one.break_index == std::vector<std::size_t>{15});
  CHECK(one.breaks[0] == doctest::Approx(0.4));
  CHECK(one.exact);

  const SegmentedFit flat = segmented_bic(ts, Eigen::VectorXd::Constant(m, 2.5), 20);
  CHECK(flat.breaks.empty());

  Rng rng(14);
  int zero = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const SegmentedFit f = segmented_bic(default_times(50), noise(rng, 50, 1.0), 20);
    zero += f.breaks.empty();
  }
  MESSAGE("null trials with no breaks: " << zero << "/100");
  CHECK(zero >= 90);

  // two kinks with modest noise
  Eigen::VectorXd two(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double t = ts(i);
    two(i) = t - 3.0 * std::max(0.0, t - 0.3) + 4.0 * std::max(0.0, t - 0.7);
  }
  const SegmentedFit f2 = segmented_bic(ts, two + noise(rng, m, 0.01), 20);
  REQUIRE(f2.breaks.size() == 2);
  CHECK(std::abs(f2.breaks[0] - 0.3) < 0.051);
  CHECK(std::abs(f2.breaks[1] - 0.7) < 0.051);
}

TEST_CASE("sufficient statistics") {
  Rng rng(15);
  {
    const LatentPaths still = sample_london_lpp(LondonParams::simulation(50, 10, 0.0, 0.0), rng);
    const SuffStats s = london_suff_stats(still);
    for (Eigen::Index t = 0; t <= 10; ++t) CHECK(s.counts(t, 0) == 1.0);
    const MleEstimate e = london_mle(s, 5);
    CHECK(e.p_hat == 0.0);
    CHECK(e.q_hat == 0.0);
  }
  {
    const LondonParams params = LondonParams::simulation(20, 10, 1.0, 1.0);
    const SuffStats s = london_suff_stats(sample_london_lpp(params, rng));
    for (Eigen::Index t = 0; t <= 10; ++t) CHECK(s.counts(t, t) == 1.0);
    const MleEstimate e = london_mle(s, params.change_step() + 1);
    CHECK(e.p_hat == 1.0);
    CHECK(e.q_hat == 1.0);
    CHECK(std::isnan(london_mle(s, 1).p_hat));
    CHECK_THROWS_AS(london_mle(s, 0), ParameterError);
    CHECK_THROWS_AS(london_mle(s, 11), ParameterError);
  }
  {
    LatentPaths bad = sample_london_lpp(LondonParams::simulation(5, 4, 0.5, 0.5), rng);
    bad.values(2, 3) += 0.01;
    CHECK_THROWS_AS(london_suff_stats(bad), DomainError);
  }
}

TEST_CASE("frequency tables follow the binomial marginal") {
  Rng rng(16);
  const std::size_t n = 10000;
  const LondonParams params = LondonParams::simulation(n, 20, 0.35, 0.8);
  const SuffStats s = london_suff_stats(sample_london_lpp(params, rng));
  for (Eigen::Index t = 0; t <= 20; ++t) CHECK(s.counts.row(t).sum() == doctest::Approx(1.0));
  for (std::size_t t = 1; t <= params.change_step(); ++t)
    for (std::size_t k = 0; k <= t; ++k) {
      const double pmf = std::exp(std::lgamma(t + 1.0) - std::lgamma(k + 1.0) - std::lgamma(t - k + 1.0) +
                                  k * std::log(0.35) + (t - k) * std::log(0.65));
      if (n * pmf < 10.0) continue;  // too few expected hits for a normal band
      const double se = std::sqrt(pmf * (1 - pmf) / n);
      CHECK(std::abs(s.counts(t, k) - pmf) <= 3.0 * se + 1e-12);
    }
}

TEST_CASE("MLE is consistent at the true change") {
  Rng rng(17);
  const LondonParams params = LondonParams::simulation(100000, 20, 0.3, 0.9);
  const SuffStats s = london_suff_stats(sample_london_lpp(params, rng));
  const MleEstimate e = london_mle(s, params.change_step() + 1);
  CHECK(std::abs(e.p_hat - 0.3) < 0.01);
  CHECK(std::abs(e.q_hat - 0.9) < 0.01);
}
