#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "netmirror/metrics.hpp"
#include "netmirror/models.hpp"

namespace netmirror {

struct Mirror {
  Eigen::MatrixXd coords;       // m x c
  Eigen::VectorXd eigenvalues;  // top c, before clipping
  Eigen::VectorXd times;
};

// Time stamps i/m, i = 1..m.
Eigen::VectorXd default_times(std::size_t m);

Mirror cmds(const Eigen::MatrixXd& D, std::size_t c);
Mirror cmds(const DistanceMatrix& D, std::size_t c);

struct WeightedEdge {
  std::size_t u, v;
  double weight;
};

struct KnnGraph {
  std::size_t k = 0;
  std::size_t vertices = 0;
  std::vector<WeightedEdge> edges;  // u < v, each pair once
};

// Smallest k whose symmetrized k-nearest-neighbour graph is connected.
KnnGraph knn_graph_min_connected(const Eigen::MatrixXd& points);
KnnGraph knn_graph(const Eigen::MatrixXd& points, std::size_t k);
bool is_connected(const KnnGraph& g);

Eigen::MatrixXd geodesic_distances(const KnnGraph& g);
Eigen::VectorXd isomap_1d(const Eigen::MatrixXd& points);

Eigen::VectorXd iso_mirror(const DistanceMatrix& D, std::size_t d_cmds);
Eigen::VectorXd iso_mirror(const Tsg& tsg, std::size_t d_ase, std::size_t d_cmds);

}  // namespace netmirror
