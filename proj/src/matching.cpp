#include "netmirror/matching.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "netmirror/errors.hpp"

namespace netmirror {

namespace {

using RMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
constexpr double kRandomStartWeight = 0.1;

// out(i,j) += scale * sum_k A(i,k) B(map[k], j), over k with map[k] != kNone.
void popcount_product(const Adjacency& A, const Adjacency& B, const std::vector<std::size_t>& map, double scale,
                      RMat& out) {
  const std::size_t n = A.size(), W = A.words_per_row();
  std::vector<std::uint64_t> bt(n * W, 0);
  for (std::size_t k = 0; k < n; ++k) {
    if (map[k] == kNone) continue;
    const auto row = B.row(map[k]);
    const std::uint64_t bit = 1ULL << (k & 63);
    for (std::size_t w = 0; w < W; ++w) {
      std::uint64_t word = row[w];
      while (word) {
        const std::size_t j = w * 64 + std::countr_zero(word);
        bt[j * W + (k >> 6)] |= bit;
        word &= word - 1;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto arow = A.row(i);
    double* dst = out.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const std::uint64_t* brow = bt.data() + j * W;
      unsigned c = 0;
      for (std::size_t w = 0; w < W; ++w) c += std::popcount(arow[w] & brow[w]);
      if (c) dst[j] += scale * c;
    }
  }
}

struct Blocks {
  std::vector<std::size_t> free_rows, free_cols;
  std::vector<std::size_t> seed_map;  // A vertex -> B vertex for seeds, else kNone
};

Blocks split_seeds(std::size_t n, const GmConfig& cfg) {
  Blocks b;
  b.seed_map.assign(n, kNone);
  std::vector<char> col_used(n, 0);
  for (const auto& [i, j] : cfg.seeds) {
    if (i >= n || j >= n) throw ParameterError("seed vertex out of range");
    if (b.seed_map[i] != kNone || col_used[j]) throw ParameterError("seeds must be a partial bijection");
    b.seed_map[i] = j;
    col_used[j] = 1;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (b.seed_map[i] == kNone) b.free_rows.push_back(i);
    if (!col_used[i]) b.free_cols.push_back(i);
  }
  return b;
}

// Maximize <M, P> over permutations extending the seeds.
Permutation best_permutation(const RMat& M, const Blocks& b, std::vector<double>* duals = nullptr) {
  const std::size_t n = M.rows(), k = b.free_rows.size();
  Permutation sigma(n);
  for (std::size_t i = 0; i < n; ++i)
    if (b.seed_map[i] != kNone) sigma[i] = b.seed_map[i];
  if (k == 0) return sigma;
  std::vector<double> cost(k * k);
  for (std::size_t a = 0; a < k; ++a) {
    const double* row = M.data() + b.free_rows[a] * n;
    for (std::size_t c = 0; c < k; ++c) cost[a * k + c] = -row[b.free_cols[c]];
  }
  const LapResult r = solve_lap(cost.data(), k, duals);
  for (std::size_t a = 0; a < k; ++a) sigma[b.free_rows[a]] = b.free_cols[r.assignment[a]];
  return sigma;
}

struct RunResult {
  Permutation sigma;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

RunResult frank_wolfe(const Adjacency& A, const Adjacency& B, const Blocks& blocks, const RMat& D0, RMat H,
                      const GmConfig& cfg) {
  const std::size_t n = A.size();
  RMat D = D0;
  RunResult out;
  double f = (H.array() * D.array()).sum();
  out.trace.push_back(f);
  RMat ASB(n, n);
  // successive gradients are close, so last step's duals are a good start
  std::vector<double> duals;
  for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
    out.iterations = it;
    const Permutation sigma = best_permutation(H, blocks, &duals);
    double hs = 0.0;
    for (std::size_t i = 0; i < n; ++i) hs += H(i, sigma[i]);
    ASB.setZero();
    popcount_product(A, B, sigma, 1.0, ASB);
    double fs = 0.0;
    for (std::size_t i = 0; i < n; ++i) fs += ASB(i, sigma[i]);
    // f(D + g(S-D)) = f + b g + a g^2
    const double b = 2.0 * (hs - f);
    const double a = fs - 2.0 * hs + f;
    if (b <= 1e-12 * std::max(1.0, std::abs(f))) {
      out.converged = true;
      break;
    }
    const double gamma = a < 0.0 ? std::min(1.0, -b / (2.0 * a)) : 1.0;
    D *= 1.0 - gamma;
    for (std::size_t i = 0; i < n; ++i) D(i, sigma[i]) += gamma;
    H = (1.0 - gamma) * H + gamma * ASB;
    const double f_new = (H.array() * D.array()).sum();
    out.trace.push_back(f_new);
    const double change = (f_new - f) / std::max(1.0, std::abs(f));
    f = f_new;
    if (change < cfg.tol) {
      out.converged = true;
      break;
    }
  }
  out.sigma = best_permutation(D, blocks);
  return out;
}

}  // namespace

Eigen::MatrixXd sinkhorn(Eigen::MatrixXd K, double tol, std::size_t max_iter) {
  if ((K.array() <= 0.0).any()) throw DomainError("sinkhorn needs a positive matrix");
  for (std::size_t it = 0; it < max_iter; ++it) {
    K.array().colwise() /= K.rowwise().sum().array();
    K.array().rowwise() /= K.colwise().sum().array();
    if ((K.rowwise().sum().array() - 1.0).abs().maxCoeff() < tol) break;
  }
  return K;
}

Eigen::MatrixXd random_doubly_stochastic(std::size_t n, Rng& rng) {
  if (n < 1) throw ParameterError("random_doubly_stochastic needs n >= 1");
  Eigen::MatrixXd K(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) K(i, j) = 1.0 - uniform01(rng);
  return sinkhorn(std::move(K));
}

double match_objective(const Adjacency& A, const Adjacency& B, const Permutation& sigma) {
  const std::size_t n = A.size();
  if (B.size() != n || !is_permutation(sigma, n)) throw DomainError("match_objective: bad sizes");
  std::size_t mismatched = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) mismatched += A.edge(i, j) != B.edge(sigma[i], sigma[j]);
  return std::sqrt(2.0 * static_cast<double>(mismatched));
}

MatchResult graph_match_fw(const Adjacency& A, const Adjacency& B, const GmConfig& cfg, Rng& rng) {
  const std::size_t n = A.size();
  if (B.size() != n) throw DomainError("graph_match_fw: size mismatch");
  if (cfg.max_iter < 1) throw ParameterError("graph_match_fw: max_iter must be >= 1");
  MatchResult best;
  best.objective = std::numeric_limits<double>::infinity();
  if (n == 0) {
    best.objective = 0.0;
    best.converged = true;
    return best;
  }
  const Blocks blocks = split_seeds(n, cfg);
  const std::size_t k = blocks.free_rows.size();
  const std::size_t restarts = std::max<std::size_t>(cfg.restarts, 1);

  for (std::size_t r = 0; r < restarts; ++r) {
    RMat D0 = RMat::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i)
      if (blocks.seed_map[i] != kNone) D0(i, blocks.seed_map[i]) = 1.0;
    RMat H = RMat::Zero(n, n);
    if (r == 0 && !cfg.random_first_start) {
      std::vector<std::size_t> free_map(n, kNone);
      const double bary = k ? 0.5 / static_cast<double>(k) : 0.0;
      for (std::size_t a = 0; a < k; ++a) {
        free_map[blocks.free_rows[a]] = blocks.free_cols[a];
        for (std::size_t c = 0; c < k; ++c) D0(blocks.free_rows[a], blocks.free_cols[c]) = bary;
        D0(blocks.free_rows[a], blocks.free_cols[a]) += 0.5;
      }
      popcount_product(A, B, blocks.seed_map, 1.0, H);
      popcount_product(A, B, free_map, 0.5, H);
      if (k) {
        // rank-one barycenter part: (A 1_free_rows)(1_free_cols^T B) / (2k)
        Eigen::VectorXd a1 = Eigen::VectorXd::Zero(n), b1 = Eigen::VectorXd::Zero(n);
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t fr : blocks.free_rows) a1(i) += A.edge(i, fr);
          for (std::size_t fc : blocks.free_cols) b1(i) += B.edge(fc, i);
        }
        H += bary * a1 * b1.transpose();
      }
    } else {
      if (k) {
        // starts far from the barycenter rarely find planted matches
        const Eigen::MatrixXd S = random_doubly_stochastic(k, rng);
        const double w = kRandomStartWeight, bary = (1.0 - w) / static_cast<double>(k);
        for (std::size_t a = 0; a < k; ++a)
          for (std::size_t c = 0; c < k; ++c) D0(blocks.free_rows[a], blocks.free_cols[c]) = bary + w * S(a, c);
      }
      const RMat Ad = A.to_dense(), Bd = B.to_dense();
      H = Ad * D0 * Bd;
    }
    RunResult run = frank_wolfe(A, B, blocks, D0, std::move(H), cfg);
    const double obj = match_objective(A, B, run.sigma);
    if (obj < best.objective) {
      best.objective = obj;
      best.permutation = std::move(run.sigma);
      best.iterations = run.iterations;
      best.converged = run.converged;
      best.relaxed_trace = std::move(run.trace);
    }
  }
  return best;
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::none: return "none";
    case Strategy::all_to_one: return "all_to_one";
    case Strategy::consecutive: return "consecutive";
    case Strategy::pairwise: return "pairwise";
  }
  return "unknown";
}

Strategy strategy_from_string(const std::string& name) {
  for (Strategy s : {Strategy::none, Strategy::all_to_one, Strategy::consecutive, Strategy::pairwise})
    if (to_string(s) == name) return s;
  throw ParameterError("unknown strategy '" + name + "'");
}

Alignment match_all_to_one(const Tsg& tsg, const GmConfig& cfg, Rng& rng) {
  if (tsg.m() < 1) throw ParameterError("match_all_to_one needs m >= 1");
  Alignment out;
  out.permutations.push_back(identity_permutation(tsg.n()));
  for (std::size_t k = 1; k < tsg.m(); ++k) {
    Rng stream(rng());
    MatchResult r = graph_match_fw(tsg.adjacency[0], tsg.adjacency[k], cfg, stream);
    out.permutations.push_back(r.permutation);
    out.matches.push_back(std::move(r));
  }
  return out;
}

Alignment match_consecutive(const Tsg& tsg, const GmConfig& cfg, Rng& rng) {
  if (tsg.m() < 2) throw ParameterError("match_consecutive needs m >= 2");
  Alignment out;
  out.permutations.push_back(identity_permutation(tsg.n()));
  Adjacency previous = tsg.adjacency[0];
  for (std::size_t k = 1; k < tsg.m(); ++k) {
    Rng stream(rng());
    MatchResult r = graph_match_fw(previous, tsg.adjacency[k], cfg, stream);
    previous = tsg.adjacency[k].permuted(r.permutation);
    out.permutations.push_back(r.permutation);
    out.matches.push_back(std::move(r));
  }
  return out;
}

DistanceMatrix matched_distance_matrix(const Tsg& tsg, const std::vector<Eigen::MatrixXd>& emb, Strategy strategy,
                                       const GmConfig& gm, const MetricConfig& metric, Rng& rng, Alignment* alignment) {
  if (metric.metric == MetricTag::avg_degree)
    return distance_matrix_from_profile(degree_profile(tsg), MetricTag::avg_degree);
  if (emb.size() != tsg.m()) throw DomainError("matched_distance_matrix: one embedding per time required");
  switch (strategy) {
    case Strategy::none: return distance_matrix_from_embeddings(emb, metric);
    case Strategy::all_to_one:
    case Strategy::consecutive: {
      const Alignment al =
          strategy == Strategy::all_to_one ? match_all_to_one(tsg, gm, rng) : match_consecutive(tsg, gm, rng);
      std::vector<Eigen::MatrixXd> aligned;
      for (std::size_t k = 0; k < emb.size(); ++k) aligned.push_back(permute_rows(emb[k], al.permutations[k]));
      if (alignment) *alignment = al;
      return distance_matrix_from_embeddings(aligned, metric);
    }
    case Strategy::pairwise: {
      const std::size_t m = tsg.m();
      DistanceMatrix D;
      D.metric = metric.metric;
      D.squared = is_squared(metric.metric);
      D.values = Eigen::MatrixXd::Zero(m, m);
      for (std::size_t k = 0; k < m; ++k)
        for (std::size_t s = k + 1; s < m; ++s) {
          Rng stream(rng());
          const MatchResult r = graph_match_fw(tsg.adjacency[k], tsg.adjacency[s], gm, stream);
          if (alignment) alignment->matches.push_back(r);
          const double v = embedding_distance(emb[k], permute_rows(emb[s], r.permutation), metric);
          D.values(k, s) = v;
          D.values(s, k) = v;
        }
      return D;
    }
  }
  throw ParameterError("unknown strategy");
}

DistanceMatrix matched_distance_matrix(const Tsg& tsg, Strategy strategy, const GmConfig& gm,
                                       const MetricConfig& metric, Rng& rng) {
  std::vector<Eigen::MatrixXd> emb;
  if (metric.metric != MetricTag::avg_degree) emb = embed_tsg(tsg, metric.d_ase);
  return matched_distance_matrix(tsg, emb, strategy, gm, metric, rng);
}

}  // namespace netmirror
