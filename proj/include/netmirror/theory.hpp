#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

#include "netmirror/metrics.hpp"
#include "netmirror/models.hpp"

namespace netmirror {

struct MirrorTarget {
  Eigen::VectorXd values;
  std::string label;
};

double psi_z(double t, double p, double q, double t_star, double c = 0.0);
// psi_Z(i/m) for i = 1..m
MirrorTarget psi_z_target(std::size_t m, double p, double q, double t_star, double c = 0.0);

// Expected squared gap between independent copies at times i and j, as the
// three-case display with theoretical normalization (c_L = 0, delta_m = 1/m).
double london_ind_dmv_sq(std::size_t i, std::size_t j, const LondonParams& params);
// Same quantity from exact binomial moments; any c_L, delta_m.
double london_ind_dmv_sq_moments(std::size_t i, std::size_t j, const LondonParams& params);
double london_w1(std::size_t i, std::size_t j, const LondonParams& params);
DistanceMatrix london_w1_matrix(const LondonParams& params);

Eigen::MatrixXd atlanta_transition_matrix(std::size_t N, double p);
Eigen::VectorXd atlanta_eigenvalues(std::size_t N, double p);
// Orthonormal cosine eigenvectors shared by every T_p (columns k = 1..N).
Eigen::MatrixXd atlanta_eigenvectors(std::size_t N);

// tr(T_p^k M), M_ab = (a-b)^2; requires k < N.
double trace_tpk_m(std::size_t N, std::size_t k, double p);
// tr(T_p^k T_q^l M); requires k + l < N.
double trace_tpk_tql_m(std::size_t N, std::size_t k, std::size_t l, double p, double q);
// Same trace through the spectral decomposition, valid for any k, l.
double trace_power_spectral(std::size_t N, std::size_t k, std::size_t l, double p, double q);

double atlanta_dmv_sq(std::size_t i, std::size_t j, const AtlantaParams& params);
double atlanta_ind_dmv_sq(std::size_t N, double c_A);
double alpha_dmv_sq(double alpha, double dmv_sq, double ind_sq);

// Exact population distance matrices. Entries are distances (square roots of
// the squared quantities) except for the dmv_sq form.
DistanceMatrix atlanta_dmv_matrix(const AtlantaParams& params);
DistanceMatrix atlanta_dmv_sq_matrix(const AtlantaParams& params);
DistanceMatrix atlanta_ind_matrix(const AtlantaParams& params);
DistanceMatrix atlanta_alpha_matrix(const AtlantaParams& params, double alpha);

// Factor relating the first CMDS coordinate of the alpha-mixed Atlanta matrix
// to that of the aligned one; lambda1 is the top eigenvalue of the aligned
// doubly-centered matrix.
double alpha_cmds_scale(double alpha, std::size_t N, double c_A, double lambda1);

double chance_mse(std::size_t m, double t_star);

// Map grid values origin + step*k onto new_origin + new_step*k.
Eigen::MatrixXd rescale_grid(const LatentPaths& paths, double new_origin, double new_step);

}  // namespace netmirror
