#include <algorithm>
#include <cmath>
#include <limits>

#include "netmirror/changepoint.hpp"
#include "netmirror/errors.hpp"

namespace netmirror {

namespace {

// q(h) = a h^2 + b h + c, the best cost so far given the fitted value h at a
// knot; prev_knot/prev_piece point at the state it extends.
struct Piece {
  double a, b, c;
  std::size_t prev_knot, prev_piece;
};

constexpr std::size_t kNoPrev = std::numeric_limits<std::size_t>::max();
constexpr std::size_t kMaxPieces = 4096;

struct Sums {
  std::vector<double> n, t, tt, y, yt, yy;  // prefix sums

  Sums(const Eigen::VectorXd& ts, const Eigen::VectorXd& ys) {
    const std::size_t m = ts.size();
    for (auto* v : {&n, &t, &tt, &y, &yt, &yy}) v->assign(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      n[i + 1] = n[i] + 1.0;
      t[i + 1] = t[i] + ts(i);
      tt[i + 1] = tt[i] + ts(i) * ts(i);
      y[i + 1] = y[i] + ys(i);
      yt[i + 1] = yt[i] + ys(i) * ts(i);
      yy[i + 1] = yy[i] + ys(i) * ys(i);
    }
  }
};

// Residual cost of the segment interpolating (t_i, h) and (t_j, g) over the
// points i+1..j (or i..j when the left end is included), as
// A h^2 + 2B h g + C g^2 + 2D h + 2E g + F.
struct SegmentCost {
  double A, B, C, D, E, F;
};

SegmentCost segment_cost(const Sums& s, const Eigen::VectorXd& ts, std::size_t i, std::size_t j, bool include_left) {
  const std::size_t lo = include_left ? i : i + 1, hi = j + 1;
  const double cnt = s.n[hi] - s.n[lo], st = s.t[hi] - s.t[lo], stt = s.tt[hi] - s.tt[lo];
  const double sy = s.y[hi] - s.y[lo], syt = s.yt[hi] - s.yt[lo], syy = s.yy[hi] - s.yy[lo];
  const double ta = ts(i), L = ts(j) - ts(i);
  const double sw = (st - cnt * ta) / L;
  const double sww = (stt - 2.0 * ta * st + cnt * ta * ta) / (L * L);
  const double syw = (syt - ta * sy) / L;
  const double suu = cnt - 2.0 * sw + sww, suw = sw - sww, syu = sy - syw;
  return {suu, suw, sww, -syu, -syw, syy};
}

// min over h of q(h) + cost(h, g), as a quadratic in g.
Piece extend(const Piece& q, const SegmentCost& k, std::size_t prev_knot, std::size_t prev_piece) {
  const double s = q.a + k.A;
  const double lin = q.b + 2.0 * k.D;
  return {std::max(k.C - k.B * k.B / s, 0.0), 2.0 * k.E - k.B * lin / s, k.F + q.c - lin * lin / (4.0 * s),
          prev_knot, prev_piece};
}

double minimum(const Piece& q) {
  if (q.a <= 1e-14 * (1.0 + std::abs(q.b) + std::abs(q.c))) return q.c;
  return q.c - q.b * q.b / (4.0 * q.a);
}

double eval(const Piece& q, double h) { return (q.a * h + q.b) * h + q.c; }

// First point after x where g drops below f, or +inf.
double crossing_after(const Piece& f, const Piece& g, double x) {
  const double da = g.a - f.a, db = g.b - f.b, dc = g.c - f.c;
  const double scale = 1e-12 * (1.0 + std::abs(x));
  const double tiny = 1e-13 * (std::abs(g.a) + std::abs(f.a) + 1e-300);
  double r = std::numeric_limits<double>::infinity();
  if (std::abs(da) <= tiny) {
    if (db < 0.0) r = -dc / db;
  } else {
    const double disc = db * db - 4.0 * da * dc;
    if (disc > 0.0) {
      const double sq = std::sqrt(disc);
      const double q = -0.5 * (db + std::copysign(sq, db));
      double r1 = q / da, r2 = dc / q;
      if (r1 > r2) std::swap(r1, r2);
      r = da > 0.0 ? r1 : r2;
    }
  }
  return r > x + scale ? r : std::numeric_limits<double>::infinity();
}

// Keep only the pieces on the lower envelope.
std::vector<Piece> envelope(std::vector<Piece> cand, bool& exact) {
  if (cand.size() <= 1) return cand;
  std::size_t cur = 0;
  for (std::size_t i = 1; i < cand.size(); ++i) {
    const Piece &a = cand[i], &b = cand[cur];
    if (a.a < b.a || (a.a == b.a && (a.b > b.b || (a.b == b.b && a.c < b.c)))) cur = i;
  }
  std::vector<char> keep(cand.size(), 0);
  keep[cur] = 1;
  double x = -std::numeric_limits<double>::infinity();
  for (std::size_t step = 0; step < 2 * cand.size() + 2; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t next = cur;
    for (std::size_t i = 0; i < cand.size(); ++i) {
      if (i == cur) continue;
      const double r = crossing_after(cand[cur], cand[i], std::isfinite(x) ? x : -1e300);
      if (r < best || (r == best && next != cur && eval(cand[i], r + 1.0) < eval(cand[next], r + 1.0))) {
        best = r;
        next = i;
      }
    }
    if (!std::isfinite(best)) break;
    cur = next;
    x = best;
    keep[cur] = 1;
  }
  std::vector<Piece> out;
  for (std::size_t i = 0; i < cand.size(); ++i)
    if (keep[i]) out.push_back(cand[i]);
  if (out.size() > kMaxPieces) {
    exact = false;
    std::nth_element(out.begin(), out.begin() + kMaxPieces, out.end(),
                     [](const Piece& l, const Piece& r) { return minimum(l) < minimum(r); });
    out.resize(kMaxPieces);
  }
  return out;
}

struct DpResult {
  std::vector<double> rss;                        // by break count
  std::vector<std::vector<std::size_t>> knots;    // by break count
  bool exact = true;
};

DpResult run_dp(const Eigen::VectorXd& ts_in, const Eigen::VectorXd& ys, std::size_t max_breaks) {
  const std::size_t m = ts_in.size();
  // Work on [0,1] time to keep the prefix sums well conditioned.
  const Eigen::VectorXd ts = (ts_in.array() - ts_in(0)) / (ts_in(m - 1) - ts_in(0));
  const Sums sums(ts, ys);
  DpResult out;

  // states[K][j]: pieces with K knots, the last one at index j.
  std::vector<std::vector<std::vector<Piece>>> states(max_breaks + 1, std::vector<std::vector<Piece>>(m));
  const Piece origin{0.0, 0.0, 0.0, kNoPrev, kNoPrev};

  auto finish = [&](const std::vector<Piece>& pieces, std::size_t knot, bool from_origin, double& best_val,
                    std::size_t& best_piece) {
    const SegmentCost k = segment_cost(sums, ts, knot, m - 1, from_origin);
    for (std::size_t p = 0; p < pieces.size(); ++p) {
      const double v = minimum(extend(pieces[p], k, knot, p));
      if (v < best_val) {
        best_val = v;
        best_piece = p;
      }
    }
  };

  {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bp = 0;
    finish({origin}, 0, true, best, bp);
    out.rss.push_back(std::max(best, 0.0));
    out.knots.push_back({});
  }
  for (std::size_t K = 1; K <= max_breaks; ++K) {
    bool any = false;
    for (std::size_t j = 1; j + 2 < m; ++j) {
      std::vector<Piece> cand;
      if (K == 1) {
        cand.push_back(extend(origin, segment_cost(sums, ts, 0, j, true), kNoPrev, 0));
      } else {
        for (std::size_t i = 1; i + 2 <= j; ++i) {
          const auto& prev = states[K - 1][i];
          if (prev.empty()) continue;
          const SegmentCost k = segment_cost(sums, ts, i, j, false);
          for (std::size_t p = 0; p < prev.size(); ++p) cand.push_back(extend(prev[p], k, i, p));
        }
      }
      states[K][j] = envelope(std::move(cand), out.exact);
      any = any || !states[K][j].empty();
    }
    if (!any) break;
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_knot = 0, best_piece = 0;
    for (std::size_t j = 1; j + 2 < m; ++j) {
      double v = best;
      std::size_t p = 0;
      finish(states[K][j], j, false, v, p);
      if (v < best) {
        best = v;
        best_knot = j;
        best_piece = p;
      }
    }
    std::vector<std::size_t> knots;
    std::size_t knot = best_knot, piece = best_piece;
    for (std::size_t level = K; level >= 1; --level) {
      knots.push_back(knot);
      const Piece& pc = states[level][knot][piece];
      knot = pc.prev_knot;
      piece = pc.prev_piece;
    }
    std::reverse(knots.begin(), knots.end());
    out.rss.push_back(std::max(best, 0.0));
    out.knots.push_back(std::move(knots));
  }
  return out;
}

void check_inputs(const Eigen::VectorXd& ts, const Eigen::VectorXd& ys) {
  if (ts.size() != ys.size()) throw ParameterError("segmented fit: ts and ys differ in length");
  if (ts.size() < 2) throw ParameterError("segmented fit: need at least two points");
  for (Eigen::Index i = 1; i < ts.size(); ++i)
    if (!(ts(i) > ts(i - 1))) throw ParameterError("segmented fit: ts must be strictly increasing");
  if (!ys.allFinite()) throw ParameterError("segmented fit: non-finite values");
}

}  // namespace

std::pair<double, std::vector<std::size_t>> segmented_fit(const Eigen::VectorXd& ts, const Eigen::VectorXd& ys,
                                                          std::size_t breaks) {
  check_inputs(ts, ys);
  DpResult r = run_dp(ts, ys, breaks);
  if (r.rss.size() <= breaks) throw ParameterError("segmented fit: too many breaks for the series length");
  return {r.rss[breaks], r.knots[breaks]};
}

SegmentedFit segmented_bic(const Eigen::VectorXd& ts, const Eigen::VectorXd& ys, std::size_t max_breaks) {
  check_inputs(ts, ys);
  const double n = static_cast<double>(ts.size());
  const double tss = (ys.array() - ys.mean()).square().sum();
  SegmentedFit fit;
  if (tss == 0.0) {
    fit.rss_by_breaks = {0.0};
    fit.bic_by_breaks = {-std::numeric_limits<double>::infinity()};
    fit.bic = fit.bic_by_breaks[0];
    return fit;
  }
  const DpResult r = run_dp(ts, ys, max_breaks);
  fit.exact = r.exact;
  fit.rss_by_breaks = r.rss;
  const double floor = 1e-12 * tss;
  std::size_t best = 0;
  for (std::size_t K = 0; K < r.rss.size(); ++K) {
    const double bic = n * std::log(std::max(r.rss[K], floor) / n) + (2.0 + 2.0 * static_cast<double>(K)) * std::log(n);
    fit.bic_by_breaks.push_back(bic);
    if (bic < fit.bic_by_breaks[best]) best = K;
  }
  fit.bic = fit.bic_by_breaks[best];
  fit.break_index = r.knots[best];
  for (std::size_t k : fit.break_index) fit.breaks.push_back(ts(static_cast<Eigen::Index>(k)));
  return fit;
}

}  // namespace netmirror
