#include "netmirror/theory.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "netmirror/errors.hpp"

namespace netmirror {

namespace {

using Wide = unsigned __int128;

Wide binom_exact(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  Wide r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

long double binom(std::size_t n, std::size_t k) { return static_cast<long double>(binom_exact(n, k)); }

// Past this order the alternating sums lose too much to cancellation.
constexpr std::size_t kMaxFormulaOrder = 25;

void require_index(std::size_t i, std::size_t m, const char* who) {
  if (i < 1 || i > m) throw DomainError(std::string(who) + ": time index out of range");
}

const Eigen::VectorXd& spectral_weights(std::size_t N) {
  static std::mutex mu;
  static std::map<std::size_t, Eigen::VectorXd> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(N);
  if (it != cache.end()) return it->second;
  const Eigen::MatrixXd V = atlanta_eigenvectors(N);
  Eigen::MatrixXd M(N, N);
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = 0; b < N; ++b) {
      const double d = static_cast<double>(a) - static_cast<double>(b);
      M(a, b) = d * d;
    }
  const Eigen::MatrixXd MV = M * V;
  Eigen::VectorXd w(N);
  for (std::size_t r = 0; r < N; ++r) w(r) = V.col(r).dot(MV.col(r));
  return cache.emplace(N, std::move(w)).first->second;
}

}  // namespace

double psi_z(double t, double p, double q, double t_star, double c) {
  if (t < t_star) return p * t + c;
  return p * t_star + (t - t_star) * q + c;
}

MirrorTarget psi_z_target(std::size_t m, double p, double q, double t_star, double c) {
  MirrorTarget out;
  out.values.resize(m);
  for (std::size_t i = 1; i <= m; ++i)
    out.values(i - 1) = psi_z(static_cast<double>(i) / static_cast<double>(m), p, q, t_star, c);
  out.label = "psi_Z";
  return out;
}

double london_ind_dmv_sq(std::size_t i, std::size_t j, const LondonParams& s) {
  require_index(i, s.m, "london_ind_dmv_sq");
  require_index(j, s.m, "london_ind_dmv_sq");
  if (s.c_L != 0.0 || std::abs(s.delta_m * static_cast<double>(s.m) - 1.0) > 1e-12)
    throw ParameterError("london_ind_dmv_sq needs c_L = 0 and delta_m = 1/m");
  if (i > j) std::swap(i, j);
  const double p = s.p, q = s.q, m2 = static_cast<double>(s.m) * static_cast<double>(s.m);
  const double ts = static_cast<double>(s.change_step());
  const double di = static_cast<double>(i), dj = static_cast<double>(j);
  const double vp = p - p * p, vq = q - q * q;
  if (dj <= ts) return ((di + dj) * vp + p * p * (di - dj) * (di - dj)) / m2;
  if (di <= ts) {
    const double gap = (dj - ts) * q + (ts - di) * p;
    return (vp * di + vp * ts + (dj - ts) * vq + gap * gap) / m2;
  }
  return (vq * (di + dj) + 2.0 * ts * (vp - vq) + q * (di - dj) * (di - dj)) / m2;
}

double london_ind_dmv_sq_moments(std::size_t i, std::size_t j, const LondonParams& s) {
  require_index(i, s.m, "london_ind_dmv_sq_moments");
  require_index(j, s.m, "london_ind_dmv_sq_moments");
  const std::size_t ts = s.change_step();
  auto moments = [&](std::size_t t) {
    const double np = static_cast<double>(std::min(t, ts));
    const double nq = static_cast<double>(t > ts ? t - ts : 0);
    const double mean = s.c_L + s.delta_m * (np * s.p + nq * s.q);
    const double var = s.delta_m * s.delta_m * (np * s.p * (1 - s.p) + nq * s.q * (1 - s.q));
    return std::pair{mean, var};
  };
  const auto [mi, vi] = moments(i);
  const auto [mj, vj] = moments(j);
  return vi + vj + (mi - mj) * (mi - mj);
}

double london_w1(std::size_t i, std::size_t j, const LondonParams& s) {
  require_index(i, s.m, "london_w1");
  require_index(j, s.m, "london_w1");
  const double m = static_cast<double>(s.m);
  return std::abs(psi_z(static_cast<double>(i) / m, s.p, s.q, s.t_star) -
                  psi_z(static_cast<double>(j) / m, s.p, s.q, s.t_star));
}

DistanceMatrix london_w1_matrix(const LondonParams& s) {
  DistanceMatrix D;
  D.metric = MetricTag::w1;
  D.values = Eigen::MatrixXd::Zero(s.m, s.m);
  for (std::size_t i = 1; i <= s.m; ++i)
    for (std::size_t j = 1; j <= s.m; ++j) D.values(i - 1, j - 1) = london_w1(i, j, s);
  return D;
}

Eigen::MatrixXd atlanta_transition_matrix(std::size_t N, double p) {
  if (N < 2) throw ParameterError("transition matrix needs N >= 2");
  if (!(p >= 0.0 && p <= 0.5)) throw ParameterError("transition probability must lie in [0,0.5]");
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(N, N);
  for (std::size_t a = 0; a < N; ++a) {
    if (a > 0) T(a, a - 1) = p;
    if (a + 1 < N) T(a, a + 1) = p;
    T(a, a) = (a == 0 || a + 1 == N) ? 1.0 - p : 1.0 - 2.0 * p;
  }
  return T;
}

Eigen::VectorXd atlanta_eigenvalues(std::size_t N, double p) {
  Eigen::VectorXd lam(N);
  for (std::size_t k = 0; k < N; ++k)
    lam(k) = 1.0 - 2.0 * p + 2.0 * p * std::cos(static_cast<double>(k) * std::numbers::pi / static_cast<double>(N));
  return lam;
}

Eigen::MatrixXd atlanta_eigenvectors(std::size_t N) {
  Eigen::MatrixXd V(N, N);
  const double n = static_cast<double>(N);
  for (std::size_t k = 0; k < N; ++k) {
    const double norm = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (std::size_t j = 0; j < N; ++j)
      V(j, k) = norm * std::cos(static_cast<double>(k) * std::numbers::pi * (2.0 * static_cast<double>(j) + 1.0) / (2.0 * n));
  }
  return V;
}

double trace_tpk_m(std::size_t N, std::size_t k, double p) {
  if (k >= N) throw DomainError("trace_tpk_m: requires k < N");
  long double sum = 0.0L;
  const long double lp = p;
  for (std::size_t t = 2; t <= k; ++t) {
    const long double term = binom(k, t) * binom(2 * t - 4, t - 2) * std::pow(lp, static_cast<long double>(t)) /
                             static_cast<long double>(t - 1);
    sum += (t % 2 == 0) ? term : -term;
  }
  const long double lead = 2.0L * static_cast<long double>(N - 1) * static_cast<long double>(k) * lp;
  return static_cast<double>(lead - 4.0L * sum);
}

double trace_tpk_tql_m(std::size_t N, std::size_t k, std::size_t l, double p, double q) {
  if (k + l >= N) throw DomainError("trace_tpk_tql_m: requires k + l < N");
  const long double lp = p, lq = q;
  long double sum = 0.0L;
  for (std::size_t d = 2; d <= k + l; ++d) {
    const std::size_t t_lo = d > l ? d - l : 0, t_hi = std::min(d, k);
    long double inner = 0.0L;
    for (std::size_t t = t_lo; t <= t_hi; ++t)
      inner += binom(k, t) * binom(l, d - t) * std::pow(lp, static_cast<long double>(t)) *
               std::pow(lq, static_cast<long double>(d - t));
    const long double term = 4.0L / static_cast<long double>(d - 1) * binom(2 * d - 4, d - 2) * inner;
    sum += (d % 2 == 0) ? term : -term;
  }
  const long double lead = 2.0L * static_cast<long double>(N - 1) *
                           (static_cast<long double>(k) * lp + static_cast<long double>(l) * lq);
  return static_cast<double>(lead - sum);
}

double trace_power_spectral(std::size_t N, std::size_t k, std::size_t l, double p, double q) {
  const Eigen::VectorXd& w = spectral_weights(N);
  const Eigen::VectorXd lp = atlanta_eigenvalues(N, p), lq = atlanta_eigenvalues(N, q);
  double total = 0.0;
  for (std::size_t r = 0; r < N; ++r)
    total += std::pow(lp(r), static_cast<double>(k)) * std::pow(lq(r), static_cast<double>(l)) * w(r);
  return total;
}

double atlanta_dmv_sq(std::size_t i, std::size_t j, const AtlantaParams& s) {
  require_index(i, s.m, "atlanta_dmv_sq");
  require_index(j, s.m, "atlanta_dmv_sq");
  if (i > j) std::swap(i, j);
  const std::size_t ts = s.change_step();
  // Steps i+1..j: those up to the change step use p, the rest q.
  const std::size_t k = ts > i ? std::min(ts - i, j - i) : 0;
  const std::size_t l = (j - i) - k;
  const double delta = s.delta();
  double tr;
  if (k + l < s.N && k + l <= kMaxFormulaOrder)
    tr = trace_tpk_tql_m(s.N, k, l, s.p, s.q);
  else
    tr = trace_power_spectral(s.N, k, l, s.p, s.q);
  return delta * delta / static_cast<double>(s.N) * tr;
}

double atlanta_ind_dmv_sq(std::size_t N, double c_A) {
  if (N < 2) throw ParameterError("atlanta_ind_dmv_sq needs N >= 2");
  const double n = static_cast<double>(N);
  return c_A * c_A / 6.0 * (n + 1.0) / (n - 1.0);
}

double alpha_dmv_sq(double alpha, double dmv_sq, double ind_sq) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in [0,1]");
  return (1.0 - alpha) * dmv_sq + alpha * ind_sq;
}

namespace {

DistanceMatrix atlanta_matrix(const AtlantaParams& s, MetricTag tag, double alpha, bool squared) {
  validate(s);
  DistanceMatrix D;
  D.metric = tag;
  D.squared = squared;
  D.values = Eigen::MatrixXd::Zero(s.m, s.m);
  const double ind = atlanta_ind_dmv_sq(s.N, s.c_A);
  for (std::size_t i = 1; i <= s.m; ++i)
    for (std::size_t j = i + 1; j <= s.m; ++j) {
      const double sq = alpha_dmv_sq(alpha, alpha < 1.0 ? atlanta_dmv_sq(i, j, s) : 0.0, ind);
      const double v = squared ? sq : std::sqrt(sq);
      D.values(i - 1, j - 1) = v;
      D.values(j - 1, i - 1) = v;
    }
  return D;
}

}  // namespace

DistanceMatrix atlanta_dmv_matrix(const AtlantaParams& s) { return atlanta_matrix(s, MetricTag::dmv, 0.0, false); }
DistanceMatrix atlanta_dmv_sq_matrix(const AtlantaParams& s) {
  return atlanta_matrix(s, MetricTag::dmv_sq, 0.0, true);
}
DistanceMatrix atlanta_ind_matrix(const AtlantaParams& s) { return atlanta_matrix(s, MetricTag::ind_dmv, 1.0, false); }
DistanceMatrix atlanta_alpha_matrix(const AtlantaParams& s, double alpha) {
  return atlanta_matrix(s, MetricTag::alpha_dmv, alpha, false);
}

double alpha_cmds_scale(double alpha, std::size_t N, double c_A, double lambda1) {
  const double n = static_cast<double>(N);
  return std::sqrt(1.0 - alpha + alpha * c_A * c_A * (n + 1.0) / (12.0 * (n - 1.0) * lambda1));
}

double chance_mse(std::size_t m, double t_star) {
  if (m < 4) throw ParameterError("chance_mse needs m >= 4");
  long double total = 0.0L;
  for (std::size_t k = 2; k <= m - 1; ++k) {
    const long double e = static_cast<long double>(k) / static_cast<long double>(m) - t_star;
    total += e * e;
  }
  return static_cast<double>(total / static_cast<long double>(m - 2));
}

Eigen::MatrixXd rescale_grid(const LatentPaths& paths, double new_origin, double new_step) {
  if (paths.step <= 0.0) throw DomainError("rescale_grid: paths carry no grid step");
  return ((paths.values.array() - paths.origin) / paths.step * new_step + new_origin).matrix();
}

}  // namespace netmirror
