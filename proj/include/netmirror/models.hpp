#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <vector>

#include "json.hpp"
#include "netmirror/adjacency.hpp"
#include "netmirror/rng.hpp"

namespace netmirror {

// Index of the last step governed by the pre-change probability.
std::size_t change_index(std::size_t m, double t_star);

struct LondonParams {
  std::size_t n = 100;
  std::size_t m = 20;
  double p = 0.4;
  double q = 0.3;
  double t_star = 0.5;
  double c_L = 0.1;
  double delta_m = 0.9 / 20;

  // c_L = 0.1, delta_m = 0.9/m
  static LondonParams simulation(std::size_t n, std::size_t m, double p, double q, double t_star = 0.5);
  // c_L = 0, delta_m = 1/m
  static LondonParams theoretical(std::size_t n, std::size_t m, double p, double q, double t_star = 0.5);

  std::size_t change_step() const { return change_index(m, t_star); }
};

struct AtlantaParams {
  std::size_t n = 100;
  std::size_t m = 20;
  std::size_t N = 50;
  double p = 0.4;
  double q = 0.2;
  double t_star = 0.5;
  double c_A = 0.8;
  double support_offset = 0.1;

  // grid {0.1, ..., 0.9}
  static AtlantaParams simulation(std::size_t n, std::size_t m, std::size_t N, double p, double q,
                                  double t_star = 0.5);
  // grid {0, ..., c_A}
  static AtlantaParams theoretical(std::size_t n, std::size_t m, std::size_t N, double p, double q,
                                   double c_A, double t_star = 0.5);

  double delta() const { return c_A / static_cast<double>(N - 1); }
  std::size_t change_step() const { return change_index(m, t_star); }
};

void validate(const LondonParams& params);
void validate(const AtlantaParams& params);

nlohmann::json to_json(const LondonParams& params);
nlohmann::json to_json(const AtlantaParams& params);
LondonParams london_from_json(const nlohmann::json& j);
AtlantaParams atlanta_from_json(const nlohmann::json& j);

struct LatentPaths {
  Eigen::MatrixXd values;  // n x (m+1), column 0 is the initial state
  std::vector<double> state_grid;
  double origin = 0.0;
  double step = 0.0;

  std::size_t n() const { return values.rows(); }
  std::size_t m() const { return values.cols() - 1; }
  // Latent positions at time index t (1..m) as an n x 1 matrix.
  Eigen::MatrixXd at(std::size_t t) const { return values.col(t); }
};

struct Tsg {
  std::vector<Adjacency> adjacency;
  std::optional<std::vector<Permutation>> shuffles;
  nlohmann::json params = nlohmann::json::object();

  std::size_t m() const { return adjacency.size(); }
  std::size_t n() const { return adjacency.empty() ? 0 : adjacency.front().size(); }
};

LatentPaths sample_london_lpp(const LondonParams& params, Rng& rng);
LatentPaths sample_atlanta_lpp(const AtlantaParams& params, Rng& rng);

// Bernoulli(<X_i, X_j>) edges for i < j. Probabilities outside [0,1] are an
// error unless clamp is set; clamping is inclusive.
Adjacency sample_rdpg(const Eigen::MatrixXd& X, Rng& rng, bool clamp = false);

// One RDPG per time column 1..m, each from its own stream drawn off rng.
Tsg generate_tsg(const LatentPaths& paths, Rng& rng, bool clamp = false);

// I_{n-k} (+) uniform permutation of the last k = floor(alpha*n) vertices.
Permutation alpha_shuffle_permutation(std::size_t n, double alpha, Rng& rng);
Tsg alpha_shuffle_tsg(const Tsg& tsg, double alpha, Rng& rng);

}  // namespace netmirror
