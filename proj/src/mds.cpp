#include "netmirror/mds.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>

#include "netmirror/errors.hpp"
#include "netmirror/spectral.hpp"

namespace netmirror {

Eigen::VectorXd default_times(std::size_t m) {
  Eigen::VectorXd t(m);
  for (std::size_t i = 0; i < m; ++i) t(i) = static_cast<double>(i + 1) / static_cast<double>(m);
  return t;
}

Mirror cmds(const Eigen::MatrixXd& D, std::size_t c) {
  const auto m = static_cast<std::size_t>(D.rows());
  if (D.rows() != D.cols()) throw DomainError("cmds: distance matrix must be square");
  if (m < 2 || c < 1 || c > m - 1) throw ParameterError("cmds: need 1 <= c <= m-1");
  const Eigen::MatrixXd D2 = D.array().square().matrix();
  // -1/2 P D2 P, P = I - J/m, via row/column means.
  const Eigen::VectorXd row_mean = D2.rowwise().mean();
  const Eigen::RowVectorXd col_mean = D2.colwise().mean();
  const double grand = D2.mean();
  Eigen::MatrixXd B(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) B(i, j) = -0.5 * (D2(i, j) - row_mean(i) - col_mean(j) + grand);
  B = 0.5 * (B + B.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
  if (es.info() != Eigen::Success) throw DomainError("cmds: eigendecomposition failed");
  Mirror out;
  out.coords.resize(m, c);
  out.eigenvalues.resize(c);
  for (std::size_t k = 0; k < c; ++k) {
    const Eigen::Index idx = static_cast<Eigen::Index>(m - 1 - k);
    const double lam = es.eigenvalues()(idx);
    out.eigenvalues(k) = lam;
    out.coords.col(k) = es.eigenvectors().col(idx) * std::sqrt(std::max(lam, 0.0));
  }
  fix_column_signs(out.coords);
  out.times = default_times(m);
  return out;
}

Mirror cmds(const DistanceMatrix& D, std::size_t c) { return cmds(D.values, c); }

KnnGraph knn_graph(const Eigen::MatrixXd& points, std::size_t k) {
  const auto m = static_cast<std::size_t>(points.rows());
  KnnGraph g;
  g.k = k;
  g.vertices = m;
  std::vector<std::vector<char>> adj(m, std::vector<char>(m, 0));
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> dist(m);
    for (std::size_t j = 0; j < m; ++j) dist[j] = (points.row(i) - points.row(j)).norm();
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
    std::size_t taken = 0;
    for (std::size_t j : order) {
      if (j == i) continue;
      if (taken++ == k) break;
      adj[i][j] = adj[j][i] = 1;
    }
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (adj[i][j]) g.edges.push_back({i, j, (points.row(i) - points.row(j)).norm()});
  return g;
}

bool is_connected(const KnnGraph& g) {
  if (g.vertices == 0) return true;
  std::vector<std::size_t> parent(g.vertices);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = g.vertices;
  for (const WeightedEdge& e : g.edges) {
    const std::size_t a = find(e.u), b = find(e.v);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

KnnGraph knn_graph_min_connected(const Eigen::MatrixXd& points) {
  const auto m = static_cast<std::size_t>(points.rows());
  if (m < 2) throw ParameterError("knn graph needs at least two points");
  for (std::size_t k = 1; k < m; ++k) {
    KnnGraph g = knn_graph(points, k);
    if (is_connected(g)) return g;
  }
  return knn_graph(points, m - 1);
}

Eigen::MatrixXd geodesic_distances(const KnnGraph& g) {
  const std::size_t m = g.vertices;
  std::vector<std::vector<std::pair<std::size_t, double>>> nbrs(m);
  for (const WeightedEdge& e : g.edges) {
    nbrs[e.u].push_back({e.v, e.weight});
    nbrs[e.v].push_back({e.u, e.weight});
  }
  Eigen::MatrixXd G(m, m);
  using Item = std::pair<double, std::size_t>;
  for (std::size_t src = 0; src < m; ++src) {
    std::vector<double> dist(m, std::numeric_limits<double>::infinity());
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[src] = 0.0;
    pq.push({0.0, src});
    while (!pq.empty()) {
      const auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[u]) continue;
      for (const auto& [v, w] : nbrs[u])
        if (d + w < dist[v]) {
          dist[v] = d + w;
          pq.push({dist[v], v});
        }
    }
    for (std::size_t j = 0; j < m; ++j) G(src, j) = dist[j];
  }
  return 0.5 * (G + G.transpose());
}

Eigen::VectorXd isomap_1d(const Eigen::MatrixXd& points) {
  const KnnGraph g = knn_graph_min_connected(points);
  return cmds(geodesic_distances(g), 1).coords.col(0);
}

Eigen::VectorXd iso_mirror(const DistanceMatrix& D, std::size_t d_cmds) {
  return isomap_1d(cmds(D, d_cmds).coords);
}

Eigen::VectorXd iso_mirror(const Tsg& tsg, std::size_t d_ase, std::size_t d_cmds) {
  MetricConfig cfg;
  cfg.metric = MetricTag::dmv;
  cfg.d_ase = d_ase;
  return iso_mirror(distance_matrix(tsg, cfg), d_cmds);
}

}  // namespace netmirror
