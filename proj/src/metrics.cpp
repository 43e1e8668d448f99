#include "netmirror/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "netmirror/errors.hpp"
#include "netmirror/lap.hpp"
#include "netmirror/spectral.hpp"

namespace netmirror {

namespace {

void require_same_shape(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const char* who) {
  if (X.rows() != Y.rows() || X.cols() != Y.cols())
    throw DomainError(std::string(who) + ": shape mismatch");
  if (X.rows() == 0) throw DomainError(std::string(who) + ": empty input");
}

void require_order(int p) {
  if (p != 1 && p != 2) throw ParameterError("Wasserstein order must be 1 or 2");
}

// Sum of squared residuals of X - wY minimized over w in {+1,-1}.
double sign_min_sum_sq(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
  return std::min((X - Y).squaredNorm(), (X + Y).squaredNorm());
}

Eigen::MatrixXd pairwise_cost(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, int p) {
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd C(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto diff = (X.row(i) - Y.row(j)).array();
      C(i, j) = p == 1 ? diff.abs().sum() : diff.square().sum();
    }
  return C;
}

double finish(double mean_cost, int p) { return p == 1 ? mean_cost : std::sqrt(std::max(mean_cost, 0.0)); }

}  // namespace

std::string to_string(MetricTag tag) {
  switch (tag) {
    case MetricTag::dmv: return "dmv";
    case MetricTag::dmv_sq: return "dmv_sq";
    case MetricTag::alpha_dmv: return "alpha_dmv";
    case MetricTag::ind_dmv: return "ind_dmv";
    case MetricTag::w1: return "w1";
    case MetricTag::w2: return "w2";
    case MetricTag::avg_degree: return "avg_degree";
  }
  return "unknown";
}

MetricTag metric_from_string(const std::string& name) {
  for (MetricTag t : {MetricTag::dmv, MetricTag::dmv_sq, MetricTag::alpha_dmv, MetricTag::ind_dmv, MetricTag::w1,
                      MetricTag::w2, MetricTag::avg_degree})
    if (to_string(t) == name) return t;
  throw ParameterError("unknown metric '" + name + "'");
}

bool is_squared(MetricTag tag) { return tag == MetricTag::dmv_sq; }

void check_distance_matrix(const DistanceMatrix& D, double tol) {
  const Eigen::MatrixXd& V = D.values;
  if (V.rows() != V.cols()) throw DomainError("distance matrix must be square");
  for (Eigen::Index i = 0; i < V.rows(); ++i) {
    if (std::abs(V(i, i)) > tol) throw DomainError("distance matrix must have zero diagonal");
    for (Eigen::Index j = 0; j < V.cols(); ++j) {
      if (!std::isfinite(V(i, j)) || V(i, j) < -tol) throw DomainError("distance matrix must be nonnegative");
      if (std::abs(V(i, j) - V(j, i)) > tol) throw DomainError("distance matrix must be symmetric");
    }
  }
}

double dmv_hat_sq(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
  require_same_shape(X, Y, "dmv_hat");
  const double n = static_cast<double>(X.rows());
  if (X.cols() == 1) return sign_min_sum_sq(X, Y) / n;
  const Eigen::MatrixXd E = X - Y * procrustes_rotation(X, Y);
  const Eigen::MatrixXd G = E.transpose() * E;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
  return std::max(es.eigenvalues().maxCoeff(), 0.0) / n;
}

double dmv_hat(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) { return std::sqrt(dmv_hat_sq(X, Y)); }

double dmv_hat_frobenius(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
  require_same_shape(X, Y, "dmv_hat_frobenius");
  const double n = static_cast<double>(X.rows());
  if (X.cols() == 1) return std::sqrt(sign_min_sum_sq(X, Y) / n);
  return std::sqrt((X - Y * procrustes_rotation(X, Y)).squaredNorm() / n);
}

double wasserstein_1d(const Eigen::VectorXd& x, const Eigen::VectorXd& y, int p) {
  require_order(p);
  if (x.size() != y.size()) throw DomainError("wasserstein_1d: length mismatch");
  if (x.size() == 0) throw DomainError("wasserstein_1d: empty input");
  std::vector<double> a(x.data(), x.data() + x.size()), b(y.data(), y.data() + y.size());
  std::stable_sort(a.begin(), a.end());
  std::stable_sort(b.begin(), b.end());
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    total += p == 1 ? d : d * d;
  }
  return finish(total / static_cast<double>(a.size()), p);
}

double wasserstein_lap(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, int p) {
  require_order(p);
  require_same_shape(X, Y, "wasserstein_lap");
  const LapResult r = solve_lap(pairwise_cost(X, Y, p));
  return finish(r.total_cost / static_cast<double>(X.rows()), p);
}

ProcWassersteinResult proc_wasserstein(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, int p,
                                       const ProcWassersteinOptions& opt) {
  require_order(p);
  require_same_shape(X, Y, "proc_wasserstein");
  const double n = static_cast<double>(X.rows());
  const auto d = static_cast<std::size_t>(X.cols());

  struct Eval {
    double mean_cost;
    Permutation matching;
  };
  auto assign = [&](const Eigen::MatrixXd& W) {
    LapResult r = solve_lap(pairwise_cost(X, Y * W, p));
    return Eval{r.total_cost / n, std::move(r.assignment)};
  };

  ProcWassersteinResult best;
  best.value = std::numeric_limits<double>::infinity();

  if (opt.mode == PwMode::single_procrustes) {
    best.W = procrustes_rotation(X, Y);
    Eval e = assign(best.W);
    best.value = finish(e.mean_cost, p);
    best.matching = std::move(e.matching);
    best.objective_trace = {e.mean_cost};
    return best;
  }

  std::vector<Eigen::MatrixXd> starts;
  starts.push_back(procrustes_rotation(X, Y));
  starts.push_back(Eigen::MatrixXd::Identity(d, d));
  {
    // row norms survive rotations: pair rows by norm rank
    auto by_norm = [](const Eigen::MatrixXd& M) {
      Permutation order = identity_permutation(M.rows());
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return M.row(a).norm() < M.row(b).norm(); });
      return permute_rows(M, order);
    };
    starts.push_back(procrustes_rotation(by_norm(X), by_norm(Y)));
  }
  if (d == 1) starts.push_back(-Eigen::MatrixXd::Identity(1, 1));
  Rng rng(opt.seed);
  for (std::size_t r = 0; r < opt.restarts; ++r) starts.push_back(random_orthogonal(d, rng));

  bool all_converged = true;
  double best_cost = std::numeric_limits<double>::infinity();
  for (const Eigen::MatrixXd& W0 : starts) {
    Eigen::MatrixXd W = W0;
    Eval cur = assign(W);
    std::vector<double> trace{cur.mean_cost};
    std::size_t it = 0;
    bool converged = false;
    while (it < opt.max_iter) {
      ++it;
      const Eigen::MatrixXd W_next = procrustes_rotation(X, permute_rows(Y, cur.matching));
      Eval next = assign(W_next);
      if (next.mean_cost < cur.mean_cost - opt.tol * std::max(1.0, cur.mean_cost)) {
        W = W_next;
        cur = std::move(next);
        trace.push_back(cur.mean_cost);
      } else {
        converged = true;
        break;
      }
    }
    all_converged = all_converged && converged;
    if (cur.mean_cost < best_cost) {
      best_cost = cur.mean_cost;
      best.W = W;
      best.matching = cur.matching;
      best.iterations = it;
      best.objective_trace = std::move(trace);
    }
  }
  best.value = finish(best_cost, p);
  best.converged = all_converged;
  return best;
}

double avg_degree(const Adjacency& A) { return A.average_degree(); }

double embedding_distance(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const MetricConfig& cfg) {
  switch (cfg.metric) {
    case MetricTag::dmv: return dmv_hat(X, Y);
    case MetricTag::dmv_sq: return dmv_hat_sq(X, Y);
    case MetricTag::w1:
    case MetricTag::w2: {
      const int p = cfg.metric == MetricTag::w1 ? 1 : 2;
      if (X.cols() == 1) {
        const double plus = wasserstein_1d(X.col(0), Y.col(0), p);
        if (cfg.procrustes == ProcrustesMode::none) return plus;
        return std::min(plus, wasserstein_1d(X.col(0), -Y.col(0), p));
      }
      if (cfg.procrustes == ProcrustesMode::none) return wasserstein_lap(X, Y, p);
      ProcWassersteinOptions opt;
      opt.mode = PwMode::single_procrustes;
      return proc_wasserstein(X, Y, p, opt).value;
    }
    case MetricTag::avg_degree:
      throw ParameterError("avg_degree is a graph statistic, not an embedding distance");
    case MetricTag::alpha_dmv:
    case MetricTag::ind_dmv:
      throw ParameterError(to_string(cfg.metric) + " is a population quantity; use the theory builders");
  }
  throw ParameterError("unknown metric");
}

DistanceMatrix distance_matrix_from_embeddings(const std::vector<Eigen::MatrixXd>& emb, const MetricConfig& cfg) {
  const std::size_t m = emb.size();
  DistanceMatrix D;
  D.metric = cfg.metric;
  D.squared = is_squared(cfg.metric);
  D.values = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t s = k + 1; s < m; ++s) {
      const double v = embedding_distance(emb[k], emb[s], cfg);
      D.values(k, s) = v;
      D.values(s, k) = v;
    }
  return D;
}

DistanceMatrix distance_matrix_from_profile(const std::vector<double>& profile, MetricTag tag) {
  const std::size_t m = profile.size();
  DistanceMatrix D;
  D.metric = tag;
  D.squared = false;
  D.values = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t s = 0; s < m; ++s) D.values(k, s) = std::abs(profile[k] - profile[s]);
  return D;
}

std::vector<Eigen::MatrixXd> embed_tsg(const Tsg& tsg, std::size_t d_ase) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(tsg.m());
  for (const Adjacency& A : tsg.adjacency) out.push_back(ase(A, d_ase).coords);
  return out;
}

std::vector<double> degree_profile(const Tsg& tsg) {
  std::vector<double> out;
  for (const Adjacency& A : tsg.adjacency) out.push_back(avg_degree(A));
  return out;
}

DistanceMatrix distance_matrix(const Tsg& tsg, const MetricConfig& cfg, const LatentPaths* truth) {
  if (cfg.d_ase < 1) throw ParameterError("d_ase must be >= 1");
  if (cfg.metric == MetricTag::avg_degree) return distance_matrix_from_profile(degree_profile(tsg), cfg.metric);
  std::vector<Eigen::MatrixXd> emb;
  if (cfg.use_true_latents) {
    if (!truth) throw ParameterError("use_true_latents requires the latent paths");
    if (truth->m() != tsg.m() || truth->n() != tsg.n()) throw DomainError("latent paths do not match the TSG");
    for (std::size_t t = 0; t < tsg.m(); ++t) {
      Eigen::MatrixXd X = truth->at(t + 1);
      if (tsg.shuffles) X = permute_rows(X, (*tsg.shuffles)[t]);
      emb.push_back(std::move(X));
    }
  } else {
    emb = embed_tsg(tsg, cfg.d_ase);
  }
  return distance_matrix_from_embeddings(emb, cfg);
}

}  // namespace netmirror
