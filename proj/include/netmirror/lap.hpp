#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "netmirror/adjacency.hpp"

namespace netmirror {

struct LapResult {
  Permutation assignment;  // row i -> column assignment[i]
  double total_cost = 0.0;
};

// Exact minimum-cost assignment (Jonker-Volgenant).
LapResult solve_lap(const Eigen::MatrixXd& cost);
// Same, on an n x n row-major buffer.
LapResult solve_lap(const double* cost, std::size_t n);
// Column duals from a similar earlier problem seed the search when duals has
// n entries (otherwise a fresh start); the final duals are written back.
LapResult solve_lap(const double* cost, std::size_t n, std::vector<double>* duals);

}  // namespace netmirror
