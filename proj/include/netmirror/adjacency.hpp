#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace netmirror {

// sigma[i] is the old label of new vertex i: (P A P^T)(i,j) = A(sigma[i], sigma[j]).
using Permutation = std::vector<std::size_t>;

Permutation identity_permutation(std::size_t n);
bool is_permutation(const Permutation& sigma, std::size_t n);
Permutation inverse_permutation(const Permutation& sigma);
// Rows of the result: out.row(i) = X.row(sigma[i]).
Eigen::MatrixXd permute_rows(const Eigen::MatrixXd& X, const Permutation& sigma);

// Symmetric hollow 0/1 matrix stored as packed row bitsets.
class Adjacency {
 public:
  explicit Adjacency(std::size_t n = 0);

  std::size_t size() const { return n_; }
  std::size_t words_per_row() const { return words_; }

  bool edge(std::size_t i, std::size_t j) const {
    return (bits_[i * words_ + (j >> 6)] >> (j & 63)) & 1ULL;
  }
  void set_edge(std::size_t i, std::size_t j, bool on = true);

  std::span<const std::uint64_t> row(std::size_t i) const {
    return {bits_.data() + i * words_, words_};
  }

  std::size_t degree(std::size_t i) const;
  std::size_t edge_count() const;
  double average_degree() const;

  Eigen::MatrixXd to_dense() const;
  static Adjacency from_dense(const Eigen::MatrixXd& A);

  Adjacency permuted(const Permutation& sigma) const;

  bool operator==(const Adjacency& other) const = default;

 private:
  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
};

}  // namespace netmirror
