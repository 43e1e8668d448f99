#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <utility>
#include <vector>

#include "netmirror/models.hpp"

namespace netmirror {

struct LocalizeResult {
  double t_hat = 0.0;
  std::size_t index = 0;        // 1-based k0 in 2..m-1
  std::vector<double> scores;   // S_k for k = 2..m-1
};

// Broken-line fits a + bL (t - t_k) + (bR - bL)(t - t_k)_+ for k = 2..m-1; the
// smallest k attaining the minimal residual wins.
LocalizeResult localize_l2(const Eigen::VectorXd& ts, const Eigen::VectorXd& ys);
LocalizeResult localize_linf(const Eigen::VectorXd& ts, const Eigen::VectorXd& ys);

// minimize c^T z subject to G z <= h, z >= 0, with h >= 0.
double simplex_min(const Eigen::MatrixXd& G, const Eigen::VectorXd& h, const Eigen::VectorXd& c);

struct SegmentedFit {
  std::vector<double> breaks;            // breakpoint times
  std::vector<std::size_t> break_index;  // 0-based positions in ts
  std::vector<double> rss_by_breaks;     // best RSS with K breaks, K = 0..
  std::vector<double> bic_by_breaks;
  double bic = 0.0;
  bool exact = true;
};

// Continuous piecewise-linear least squares with 0..max_breaks knots on
// t_2..t_{m-1}; each segment holds at least two points. Selected by BIC.
SegmentedFit segmented_bic(const Eigen::VectorXd& ts, const Eigen::VectorXd& ys, std::size_t max_breaks);
// Best RSS for exactly K knots, and its knot positions.
std::pair<double, std::vector<std::size_t>> segmented_fit(const Eigen::VectorXd& ts, const Eigen::VectorXd& ys,
                                                          std::size_t breaks);

struct SuffStats {
  Eigen::MatrixXd counts;  // (m+1) x (m+1): row t, column level k
};

SuffStats london_suff_stats(const LatentPaths& paths);

struct MleEstimate {
  double p_hat;  // NaN when t = 1 (no pre-change steps)
  double q_hat;
};

// Changepoint hypothesis t: steps 1..t-1 use p, steps t..m use q.
MleEstimate london_mle(const SuffStats& stats, std::size_t t);

}  // namespace netmirror
