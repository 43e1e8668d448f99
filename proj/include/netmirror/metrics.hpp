#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

#include "netmirror/models.hpp"
#include "netmirror/rng.hpp"

namespace netmirror {

enum class MetricTag { dmv, dmv_sq, alpha_dmv, ind_dmv, w1, w2, avg_degree };

std::string to_string(MetricTag tag);
MetricTag metric_from_string(const std::string& name);
bool is_squared(MetricTag tag);

struct DistanceMatrix {
  Eigen::MatrixXd values;
  MetricTag metric = MetricTag::dmv;
  bool squared = false;

  std::size_t size() const { return values.rows(); }
};

// Throws DomainError unless symmetric, hollow and nonnegative.
void check_distance_matrix(const DistanceMatrix& D, double tol = 1e-12);

enum class ProcrustesMode { none, frobenius };

struct MetricConfig {
  MetricTag metric = MetricTag::dmv;
  std::size_t d_ase = 1;
  int p = 2;
  ProcrustesMode procrustes = ProcrustesMode::frobenius;
  bool use_true_latents = false;
};

// Squared d_MV estimate: min over W of (1/n)||(X - Y W)^T (X - Y W)||_2, with W
// the Frobenius Procrustes rotation when d > 1 and the better sign when d = 1.
double dmv_hat_sq(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y);
double dmv_hat(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y);
// (1/sqrt n) ||X - Y W_F||_F
double dmv_hat_frobenius(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y);

double wasserstein_1d(const Eigen::VectorXd& x, const Eigen::VectorXd& y, int p);
double wasserstein_lap(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, int p);

enum class PwMode { joint_alternating, single_procrustes };

struct ProcWassersteinOptions {
  PwMode mode = PwMode::joint_alternating;
  std::size_t restarts = 8;
  std::size_t max_iter = 100;
  double tol = 1e-12;
  std::uint64_t seed = 0x5eed;
};

struct ProcWassersteinResult {
  double value = 0.0;
  Eigen::MatrixXd W;
  Permutation matching;  // row i of X paired with row matching[i] of Y W
  std::size_t iterations = 0;
  bool converged = true;  // false: max_iter reached in some start
  std::vector<double> objective_trace;  // best start, per iteration
};

ProcWassersteinResult proc_wasserstein(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, int p,
                                       const ProcWassersteinOptions& opt = {});

double avg_degree(const Adjacency& A);

// Pairwise dissimilarity between two embeddings (or two graphs for avg_degree,
// which is handled by distance_matrix).
double embedding_distance(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const MetricConfig& cfg);

DistanceMatrix distance_matrix_from_embeddings(const std::vector<Eigen::MatrixXd>& embeddings,
                                               const MetricConfig& cfg);
DistanceMatrix distance_matrix_from_profile(const std::vector<double>& profile, MetricTag tag);

// ASE per time (or the true latent columns, shuffled like the TSG, when
// cfg.use_true_latents) followed by the configured dissimilarity.
DistanceMatrix distance_matrix(const Tsg& tsg, const MetricConfig& cfg, const LatentPaths* truth = nullptr);

std::vector<Eigen::MatrixXd> embed_tsg(const Tsg& tsg, std::size_t d_ase);
std::vector<double> degree_profile(const Tsg& tsg);

}  // namespace netmirror
