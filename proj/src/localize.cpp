#include <algorithm>
#include <cmath>
#include <limits>

#include "netmirror/changepoint.hpp"
#include "netmirror/errors.hpp"

namespace netmirror {

namespace {

void check_series(const Eigen::VectorXd& ts, const Eigen::VectorXd& ys) {
  if (ts.size() != ys.size()) throw ParameterError("localizer: ts and ys differ in length");
  if (ts.size() < 4) throw ParameterError("localizer: need at least 4 time points");
  for (Eigen::Index i = 1; i < ts.size(); ++i)
    if (!(ts(i) > ts(i - 1))) throw ParameterError("localizer: ts must be strictly increasing");
  if (!ys.allFinite()) throw ParameterError("localizer: non-finite values");
}

Eigen::MatrixXd broken_line_design(const Eigen::VectorXd& ts, Eigen::Index k) {
  const Eigen::Index m = ts.size();
  Eigen::MatrixXd X(m, 3);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double u = ts(i) - ts(k);
    X(i, 0) = 1.0;
    X(i, 1) = u;
    X(i, 2) = u > 0.0 ? u : 0.0;
  }
  return X;
}

LocalizeResult pick_smallest(const Eigen::VectorXd& ts, std::vector<double> scores, double tie) {
  LocalizeResult r;
  const double best = *std::min_element(scores.begin(), scores.end());
  std::size_t k = 0;
  while (scores[k] > best + tie) ++k;
  r.index = k + 2;
  r.t_hat = ts(static_cast<Eigen::Index>(k + 1));
  r.scores = std::move(scores);
  return r;
}

}  // namespace

LocalizeResult localize_l2(const Eigen::VectorXd& ts, const Eigen::VectorXd& ys) {
  check_series(ts, ys);
  const Eigen::Index m = ts.size();
  const double tss = (ys.array() - ys.mean()).square().sum();
  std::vector<double> scores;
  for (Eigen::Index k = 1; k <= m - 2; ++k) {
    const Eigen::MatrixXd X = broken_line_design(ts, k);
    const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(ys);
    scores.push_back((ys - X * beta).squaredNorm());
  }
  return pick_smallest(ts, std::move(scores), 1e-10 * tss);
}

double simplex_min(const Eigen::MatrixXd& G, const Eigen::VectorXd& h, const Eigen::VectorXd& c) {
  const Eigen::Index R = G.rows(), V = G.cols();
  if (h.size() != R || c.size() != V) throw DomainError("simplex_min: shape mismatch");
  if ((h.array() < 0.0).any()) throw DomainError("simplex_min: origin must be feasible");
  const Eigen::Index cols = V + R + 1, rhs = V + R;
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(R + 1, cols);
  T.topLeftCorner(R, V) = G;
  T.block(0, V, R, R).setIdentity();
  T.col(rhs).head(R) = h;
  T.row(R).head(V) = c.transpose();
  std::vector<Eigen::Index> basis(R);
  for (Eigen::Index r = 0; r < R; ++r) basis[r] = V + r;
  constexpr double eps = 1e-12;
  for (std::size_t guard = 0; guard < 100000; ++guard) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < V + R; ++j)
      if (T(R, j) < -eps) {
        enter = j;
        break;
      }
    if (enter < 0) return -T(R, rhs);
    Eigen::Index leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index r = 0; r < R; ++r) {
      if (T(r, enter) <= eps) continue;
      const double ratio = T(r, rhs) / T(r, enter);
      const double slack = 1e-12 * (1.0 + std::abs(best));
      if (leave < 0 || ratio < best - slack || (ratio <= best + slack && basis[r] < basis[leave])) {
        if (ratio < best) best = ratio;
        leave = r;
      }
    }
    if (leave < 0) throw DomainError("simplex_min: unbounded");
    T.row(leave) /= T(leave, enter);
    for (Eigen::Index r = 0; r <= R; ++r)
      if (r != leave && T(r, enter) != 0.0) T.row(r) -= T(r, enter) * T.row(leave);
    basis[leave] = enter;
  }
  throw DomainError("simplex_min: iteration limit");
}

LocalizeResult localize_linf(const Eigen::VectorXd& ts, const Eigen::VectorXd& ys) {
  check_series(ts, ys);
  const Eigen::Index m = ts.size();
  const double center = 0.5 * (ys.maxCoeff() + ys.minCoeff());
  const double scale = 0.5 * (ys.maxCoeff() - ys.minCoeff());
  if (scale == 0.0) return pick_smallest(ts, std::vector<double>(m - 2, 0.0), 0.0);
  const Eigen::VectorXd y = (ys.array() - center) / scale;
  const double span = ts(m - 1) - ts(0);
  const double bound = y.cwiseAbs().maxCoeff() + 1.0;

  std::vector<double> scores;
  for (Eigen::Index k = 1; k <= m - 2; ++k) {
    const Eigen::MatrixXd X = broken_line_design(ts, k) * Eigen::Vector3d(1.0, 1.0 / span, 1.0 / span).asDiagonal();
    // z = (x+, x-, s+, s-), residual bound r = bound + s+ - s-.
    Eigen::MatrixXd G(2 * m, 8);
    Eigen::VectorXd h(2 * m);
    for (Eigen::Index i = 0; i < m; ++i) {
      G.row(i) << X.row(i), -X.row(i), -1.0, 1.0;
      h(i) = y(i) + bound;
      G.row(m + i) << -X.row(i), X.row(i), -1.0, 1.0;
      h(m + i) = bound - y(i);
    }
    Eigen::VectorXd c = Eigen::VectorXd::Zero(8);
    c(6) = 1.0;
    c(7) = -1.0;
    scores.push_back(std::max(0.0, bound + simplex_min(G, h, c)) * scale);
  }
  return pick_smallest(ts, std::move(scores), 1e-9 * scale);
}

SuffStats london_suff_stats(const LatentPaths& paths) {
  const std::size_t n = paths.n(), m = paths.m();
  if (paths.step <= 0.0) throw DomainError("london_suff_stats: paths carry no grid");
  SuffStats s;
  s.counts = Eigen::MatrixXd::Zero(m + 1, m + 1);
  for (std::size_t t = 0; t <= m; ++t)
    for (std::size_t v = 0; v < n; ++v) {
      const double x = paths.values(v, t);
      const double level = std::round((x - paths.origin) / paths.step);
      if (level < 0.0 || level > static_cast<double>(m) ||
          std::abs(paths.origin + level * paths.step - x) > 1e-9 * std::max(1.0, std::abs(x)))
        throw DomainError("london_suff_stats: value " + std::to_string(x) + " is off the grid");
      s.counts(t, static_cast<Eigen::Index>(level)) += 1.0;
    }
  s.counts /= static_cast<double>(n);
  return s;
}

MleEstimate london_mle(const SuffStats& stats, std::size_t t) {
  const std::size_t m = stats.counts.rows() - 1;
  if (t < 1 || t > m) throw ParameterError("london_mle: t must lie in 1..m");
  const Eigen::VectorXd levels = Eigen::VectorXd::LinSpaced(m + 1, 0.0, static_cast<double>(m));
  const double before = stats.counts.row(t - 1).dot(levels);
  const double end = stats.counts.row(m).dot(levels);
  MleEstimate e;
  e.p_hat = t >= 2 ? before / static_cast<double>(t - 1) : std::numeric_limits<double>::quiet_NaN();
  e.q_hat = (end - before) / static_cast<double>(m - t + 1);
  return e;
}

}  // namespace netmirror
