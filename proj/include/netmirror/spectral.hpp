#pragma once

#include <Eigen/Dense>
#include <cstddef>

#include "netmirror/adjacency.hpp"
#include "netmirror/rng.hpp"

namespace netmirror {

struct LatentEstimate {
  Eigen::MatrixXd coords;       // n x d
  Eigen::VectorXd eigenvalues;  // decreasing magnitude
};

// Each column's largest-magnitude entry (first on ties) is made positive.
void fix_column_signs(Eigen::MatrixXd& M);

LatentEstimate ase(const Eigen::MatrixXd& A, std::size_t d);
LatentEstimate ase(const Adjacency& A, std::size_t d);

struct ProcrustesResult {
  Eigen::MatrixXd W;
  Eigen::MatrixXd aligned;  // Y * W
};

// W minimizing ||X - Y W||_F over orthogonal matrices.
ProcrustesResult procrustes_align(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y);
Eigen::MatrixXd procrustes_rotation(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y);

// Haar-distributed orthogonal d x d matrix.
Eigen::MatrixXd random_orthogonal(std::size_t d, Rng& rng);

}  // namespace netmirror
