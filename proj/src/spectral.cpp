#include "netmirror/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "netmirror/errors.hpp"

namespace netmirror {

void fix_column_signs(Eigen::MatrixXd& M) {
  for (Eigen::Index c = 0; c < M.cols(); ++c) {
    Eigen::Index best = 0;
    double mag = -1.0;
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
      if (std::abs(M(r, c)) > mag) {
        mag = std::abs(M(r, c));
        best = r;
      }
    }
    if (M.rows() > 0 && M(best, c) < 0.0) M.col(c) *= -1.0;
  }
}

LatentEstimate ase(const Eigen::MatrixXd& A, std::size_t d) {
  const auto n = static_cast<std::size_t>(A.rows());
  if (A.rows() != A.cols()) throw DomainError("ase: adjacency must be square");
  if (d < 1 || d > n) throw ParameterError("ase: need 1 <= d <= n");
  const double scale = A.cwiseAbs().maxCoeff();
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + scale))
    throw DomainError("ase: adjacency must be symmetric");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success) throw DomainError("ase: eigendecomposition failed");
  const Eigen::VectorXd& lam = es.eigenvalues();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  // Ascending eigenvalues; larger index first among equal magnitudes keeps
  // positive eigenvalues ahead of negative ones.
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double ma = std::abs(lam(a)), mb = std::abs(lam(b));
    if (ma != mb) return ma > mb;
    return a > b;
  });

  LatentEstimate out;
  out.coords.resize(n, d);
  out.eigenvalues.resize(d);
  for (std::size_t c = 0; c < d; ++c) {
    const Eigen::Index k = order[c];
    out.eigenvalues(c) = lam(k);
    out.coords.col(c) = es.eigenvectors().col(k) * std::sqrt(std::abs(lam(k)));
  }
  fix_column_signs(out.coords);
  return out;
}

LatentEstimate ase(const Adjacency& A, std::size_t d) { return ase(A.to_dense(), d); }

Eigen::MatrixXd procrustes_rotation(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
  if (X.rows() != Y.rows() || X.cols() != Y.cols()) throw DomainError("procrustes: shape mismatch");
  if (X.cols() == 1) {
    Eigen::MatrixXd W(1, 1);
    W(0, 0) = Y.col(0).dot(X.col(0)) >= 0.0 ? 1.0 : -1.0;
    return W;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Y.transpose() * X, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

ProcrustesResult procrustes_align(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
  ProcrustesResult r;
  r.W = procrustes_rotation(X, Y);
  r.aligned = Y * r.W;
  return r;
}

Eigen::MatrixXd random_orthogonal(std::size_t d, Rng& rng) {
  Eigen::MatrixXd G(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) G(i, j) = standard_normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  Eigen::MatrixXd Q = qr.householderQ();
  Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (std::size_t j = 0; j < d; ++j)
    if (R(j, j) < 0.0) Q.col(j) *= -1.0;
  return Q;
}

}  // namespace netmirror
