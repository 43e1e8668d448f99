#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "netmirror/adjacency.hpp"
#include "netmirror/lap.hpp"
#include "netmirror/metrics.hpp"
#include "netmirror/models.hpp"
#include "netmirror/rng.hpp"

namespace netmirror {

struct GmConfig {
  std::size_t max_iter = 100;
  std::size_t restarts = 1;
  double tol = 1e-6;
  // (vertex of A, vertex of B) pairs held fixed
  std::vector<std::pair<std::size_t, std::size_t>> seeds;
  // Restarts >= 1 start at 0.9 J/n + 0.1 K, K random doubly stochastic. This
  // flag makes restart 0 random too instead of (J/n + I)/2.
  bool random_first_start = false;
};

struct MatchResult {
  Permutation permutation;  // vertex i of A <-> vertex permutation[i] of B
  double objective = 0.0;   // ||A - P B P^T||_F
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> relaxed_trace;  // tr(A D B D^T) per iteration, chosen restart
};

Eigen::MatrixXd sinkhorn(Eigen::MatrixXd K, double tol = 1e-10, std::size_t max_iter = 100000);
Eigen::MatrixXd random_doubly_stochastic(std::size_t n, Rng& rng);

// ||A - P B P^T||_F for the permutation sigma.
double match_objective(const Adjacency& A, const Adjacency& B, const Permutation& sigma);

MatchResult graph_match_fw(const Adjacency& A, const Adjacency& B, const GmConfig& cfg, Rng& rng);

enum class Strategy { none, all_to_one, consecutive, pairwise };
std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);

struct Alignment {
  std::vector<Permutation> permutations;  // one per time; P_k applied as rows sigma_k
  std::vector<MatchResult> matches;       // the m-1 matchings, in time order
};

Alignment match_all_to_one(const Tsg& tsg, const GmConfig& cfg, Rng& rng);
Alignment match_consecutive(const Tsg& tsg, const GmConfig& cfg, Rng& rng);

DistanceMatrix matched_distance_matrix(const Tsg& tsg, const std::vector<Eigen::MatrixXd>& embeddings,
                                       Strategy strategy, const GmConfig& gm, const MetricConfig& metric, Rng& rng,
                                       Alignment* alignment = nullptr);
DistanceMatrix matched_distance_matrix(const Tsg& tsg, Strategy strategy, const GmConfig& gm,
                                       const MetricConfig& metric, Rng& rng);

}  // namespace netmirror
