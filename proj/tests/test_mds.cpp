#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "netmirror/errors.hpp"
#include "netmirror/mds.hpp"

using namespace netmirror;

namespace {

DistanceMatrix line_distances(const Eigen::VectorXd& y) {
  DistanceMatrix D;
  D.values = (y.replicate(1, y.size()) - y.transpose().replicate(y.size(), 1)).cwiseAbs();
  return D;
}

double sign_gap(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::min((a - b).cwiseAbs().maxCoeff(), (a + b).cwiseAbs().maxCoeff());
}

Eigen::VectorXd centered(Eigen::VectorXd v) {
  v.array() -= v.mean();
  return v;
}

}  // namespace

TEST_CASE("three collinear points") {
  Eigen::VectorXd y(3);
  y << 0, 1, 2;
  const Mirror mir = cmds(line_distances(y), 1);
  Eigen::VectorXd want(3);
  want << -1, 0, 1;
  CHECK(sign_gap(mir.coords.col(0), want) < 1e-12);
  CHECK(mir.eigenvalues(0) == doctest::Approx(2.0));
  CHECK(mir.times.size() == 3);
  CHECK(mir.times(2) == 1.0);
}

TEST_CASE("zero distances give a zero mirror") {
  DistanceMatrix D;
  D.values = Eigen::MatrixXd::Zero(5, 5);
  CHECK(cmds(D, 3).coords.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("negative directions are clipped to zero") {
  DistanceMatrix D;
  D.values.resize(4, 4);
  D.values << 0, 1, 1, 5, 1, 0, 1, 1, 1, 1, 0, 1, 5, 1, 1, 0;  // violates the triangle inequality
  const Mirror mir = cmds(D, 3);
  CHECK(mir.eigenvalues(0) == doctest::Approx(12.5));
  CHECK(mir.eigenvalues(1) == doctest::Approx(0.5));
  CHECK(std::abs(mir.eigenvalues(2)) < 1e-12);
  CHECK(mir.coords.col(0).squaredNorm() == doctest::Approx(12.5));
  CHECK(mir.coords.col(2).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("target dimension is validated") {
  DistanceMatrix D;
  D.values = Eigen::MatrixXd::Zero(4, 4);
  CHECK_THROWS_AS(cmds(D, 0), ParameterError);
  CHECK_THROWS_AS(cmds(D, 4), ParameterError);
  CHECK_NOTHROW(cmds(D, 3));
}

TEST_CASE("realizability of one-dimensional point sets") {
  Rng rng(1);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t m = 2 + uniform_index(rng, 60);
    const Eigen::VectorXd y = testutil::random_matrix(rng, m, 1, -5, 5).col(0);
    const Mirror mir = cmds(line_distances(y), 1);
    CHECK(sign_gap(mir.coords.col(0), centered(y)) < 1e-8);
  }
}

TEST_CASE("double centering properties and time equivariance") {
  Rng rng(2);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t m = 3 + uniform_index(rng, 20);
    const Eigen::MatrixXd pts = testutil::random_matrix(rng, m, 3);
    DistanceMatrix D;
    D.values.resize(m, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) D.values(i, j) = (pts.row(i) - pts.row(j)).norm();
    const Mirror mir = cmds(D, 2);
    CHECK(std::abs(mir.coords.col(0).sum()) < 1e-10);
    CHECK(mir.eigenvalues(0) >= mir.eigenvalues(1));
    // reconstructed Gram matches the centered Gram on the top-2 subspace
    const Permutation sigma = testutil::random_permutation(rng, m);
    DistanceMatrix Dp;
    Dp.values.resize(m, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) Dp.values(i, j) = D.values(sigma[i], sigma[j]);
    const Mirror mp = cmds(Dp, 2);
    const Eigen::MatrixXd moved = permute_rows(mir.coords, sigma);
    for (int c = 0; c < 2; ++c) CHECK(sign_gap(mp.coords.col(c), moved.col(c)) < 1e-9);
  }
}

TEST_CASE("k-nearest-neighbour graph connectivity") {
  Eigen::MatrixXd line(6, 1);
  line << 0, 1, 2, 3, 4, 5;
  CHECK(knn_graph_min_connected(line).k == 1);

  Eigen::MatrixXd two(2, 2);
  two << 0, 0, 3, 4;
  const KnnGraph g2 = knn_graph_min_connected(two);
  CHECK(g2.k == 1);
  REQUIRE(g2.edges.size() == 1);
  CHECK(g2.edges[0].weight == doctest::Approx(5.0));

  Eigen::MatrixXd clusters(6, 2);
  clusters << 0, 0, 0.1, 0, 0, 0.1, 10, 10, 10.1, 10, 10, 10.1;
  CHECK_FALSE(is_connected(knn_graph(clusters, 2)));
  const KnnGraph g = knn_graph_min_connected(clusters);
  CHECK(g.k == 3);
  CHECK(is_connected(g));

  Eigen::MatrixXd dup = Eigen::MatrixXd::Zero(4, 1);
  const KnnGraph gd = knn_graph_min_connected(dup);
  CHECK(is_connected(gd));
  for (const WeightedEdge& e : gd.edges) CHECK(e.weight == 0.0);
}

TEST_CASE("symmetrized graph uses the union of neighbour lists") {
  // 0 lists 1, 1 lists 2, 2 lists 1, 3 lists 2: union gives edges 01,12,23
  Eigen::MatrixXd pts(4, 1);
  pts << 0, 2, 3, 5.5;
  const KnnGraph g = knn_graph(pts, 1);
  CHECK(g.edges.size() == 3);
  CHECK(is_connected(g));
}

TEST_CASE("Isomap on a line returns the centered input") {
  Rng rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t m = 2 + uniform_index(rng, 30);
    Eigen::MatrixXd pts = testutil::random_matrix(rng, m, 1, 0, 10);
    CHECK(sign_gap(isomap_1d(pts), centered(pts.col(0))) < 1e-8);
    // the same line embedded diagonally in the plane
    Eigen::MatrixXd plane(m, 2);
    plane.col(0) = pts.col(0) * 0.6;
    plane.col(1) = pts.col(0) * 0.8;
    CHECK(sign_gap(isomap_1d(plane), centered(pts.col(0))) < 1e-8);
  }
  Eigen::MatrixXd pair(2, 1);
  pair << 1, 4;
  Eigen::VectorXd want(2);
  want << -1.5, 1.5;
  CHECK(sign_gap(isomap_1d(pair), want) < 1e-12);
}

TEST_CASE("Isomap unrolls a quarter circle") {
  const std::size_t m = 20;
  Eigen::MatrixXd arc(m, 2);
  for (std::size_t i = 0; i < m; ++i) {
    const double th = std::numbers::pi / 2 * i / (m - 1.0);
    arc(i, 0) = std::cos(th);
    arc(i, 1) = std::sin(th);
  }
  const Eigen::VectorXd out = isomap_1d(arc);
  const double arc_step = std::numbers::pi / 2 / (m - 1.0);
  for (std::size_t i = 1; i < m; ++i) {
    const double gap = std::abs(out(i) - out(i - 1));
    CHECK(std::abs(gap / arc_step - 1.0) < 0.02);
  }
}

TEST_CASE("iso-mirror of a repeated graph is flat") {
  Rng rng(4);
  LatentPaths paths;
  paths.values = testutil::random_matrix(rng, 50, 2, 0.3, 0.7);
  const Tsg once = generate_tsg(paths, rng);
  Tsg tsg;
  for (int t = 0; t < 8; ++t) tsg.adjacency.push_back(once.adjacency[0]);
  CHECK(iso_mirror(tsg, 2, 2).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("iso-mirror follows a latent trend") {
  Rng rng(5);
  const std::size_t n = 300, m = 12;
  LatentPaths paths;
  paths.values.resize(n, m + 1);
  for (std::size_t t = 0; t <= m; ++t) paths.values.col(t).setConstant(0.2 + 0.05 * t);
  const Tsg tsg = generate_tsg(paths, rng);
  const Eigen::VectorXd psi = iso_mirror(tsg, 1, 2);
  // monotone up to sign
  const double s = psi(m - 1) > psi(0) ? 1.0 : -1.0;
  int violations = 0;
  for (std::size_t i = 1; i < m; ++i) violations += s * (psi(i) - psi(i - 1)) < 0;
  CHECK(violations <= 1);
}
