#include "netmirror/adjacency.hpp"

#include <bit>
#include <numeric>
#include <string>

#include "netmirror/errors.hpp"

namespace netmirror {

Permutation identity_permutation(std::size_t n) {
  Permutation p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  return p;
}

bool is_permutation(const Permutation& sigma, std::size_t n) {
  if (sigma.size() != n) return false;
  std::vector<bool> seen(n, false);
  for (std::size_t v : sigma) {
    if (v >= n || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

Permutation inverse_permutation(const Permutation& sigma) {
  Permutation inv(sigma.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) inv[sigma[i]] = i;
  return inv;
}

Eigen::MatrixXd permute_rows(const Eigen::MatrixXd& X, const Permutation& sigma) {
  if (static_cast<std::size_t>(X.rows()) != sigma.size())
    throw DomainError("permute_rows: size mismatch");
  Eigen::MatrixXd out(X.rows(), X.cols());
  for (std::size_t i = 0; i < sigma.size(); ++i) out.row(i) = X.row(sigma[i]);
  return out;
}

Adjacency::Adjacency(std::size_t n) : n_(n), words_((n + 63) / 64), bits_(n * words_, 0) {}

void Adjacency::set_edge(std::size_t i, std::size_t j, bool on) {
  if (i == j) throw DomainError("adjacency must be hollow");
  const std::uint64_t mi = 1ULL << (j & 63), mj = 1ULL << (i & 63);
  if (on) {
    bits_[i * words_ + (j >> 6)] |= mi;
    bits_[j * words_ + (i >> 6)] |= mj;
  } else {
    bits_[i * words_ + (j >> 6)] &= ~mi;
    bits_[j * words_ + (i >> 6)] &= ~mj;
  }
}

std::size_t Adjacency::degree(std::size_t i) const {
  std::size_t d = 0;
  for (std::uint64_t w : row(i)) d += std::popcount(w);
  return d;
}

std::size_t Adjacency::edge_count() const {
  std::size_t total = 0;
  for (std::uint64_t w : bits_) total += std::popcount(w);
  return total / 2;
}

double Adjacency::average_degree() const {
  if (n_ == 0) return 0.0;
  return 2.0 * static_cast<double>(edge_count()) / static_cast<double>(n_);
}

Eigen::MatrixXd Adjacency::to_dense() const {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (edge(i, j)) A(i, j) = 1.0;
  return A;
}

Adjacency Adjacency::from_dense(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) throw DomainError("adjacency must be square");
  const std::size_t n = A.rows();
  Adjacency out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (A(i, i) != 0.0) throw DomainError("adjacency must be hollow");
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = A(i, j);
      if (a != A(j, i)) throw DomainError("adjacency must be symmetric");
      if (a != 0.0 && a != 1.0)
        throw DomainError("adjacency entries must be 0 or 1, got " + std::to_string(a));
      if (a == 1.0) out.set_edge(i, j);
    }
  }
  return out;
}

Adjacency Adjacency::permuted(const Permutation& sigma) const {
  if (!is_permutation(sigma, n_)) throw DomainError("not a permutation of the vertex set");
  Adjacency out(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if (edge(sigma[i], sigma[j])) out.set_edge(i, j);
  return out;
}

}  // namespace netmirror
