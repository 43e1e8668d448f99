#include "netmirror/lap.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "netmirror/errors.hpp"

namespace netmirror {

namespace {

constexpr double kLarge = std::numeric_limits<double>::max();

struct Jv {
  const double* c;
  std::size_t n;
  std::vector<long> x, y;  // row -> col, col -> row
  std::vector<double> v;   // column duals

  double cost(std::size_t i, std::size_t j) const { return c[i * n + j]; }

  // Column reduction and reduction transfer; returns the free rows.
  std::vector<long> reduce() {
    x.assign(n, -1);
    y.assign(n, 0);
    v.assign(n, kLarge);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (cost(i, j) < v[j]) {
          v[j] = cost(i, j);
          y[j] = static_cast<long>(i);
        }
    std::vector<char> unique(n, 1);
    for (std::size_t jj = n; jj-- > 0;) {
      const long i = y[jj];
      if (x[i] < 0) {
        x[i] = static_cast<long>(jj);
      } else {
        unique[i] = 0;
        y[jj] = -1;
      }
    }
    std::vector<long> free_rows;
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i] < 0) {
        free_rows.push_back(static_cast<long>(i));
      } else if (unique[i]) {
        const long j = x[i];
        double mn = kLarge;
        for (std::size_t j2 = 0; j2 < n; ++j2) {
          if (static_cast<long>(j2) == j) continue;
          mn = std::min(mn, cost(i, j2) - v[j2]);
        }
        v[j] -= mn;
      }
    }
    return free_rows;
  }

  // Augmenting row reduction.
  std::vector<long> augment_rows(const std::vector<long>& free_in) {
    std::vector<long> free_rows = free_in;
    const std::size_t n_free = free_rows.size();
    std::size_t current = 0;
    std::size_t new_free = 0;
    std::size_t rr_cnt = 0;
    while (current < n_free) {
      ++rr_cnt;
      const long free_i = free_rows[current++];
      long j1 = 0, j2 = -1;
      double v1 = cost(free_i, 0) - v[0], v2 = kLarge;
      for (std::size_t j = 1; j < n; ++j) {
        const double h = cost(free_i, j) - v[j];
        if (h < v2) {
          if (h >= v1) {
            v2 = h;
            j2 = static_cast<long>(j);
          } else {
            v2 = v1;
            v1 = h;
            j2 = j1;
            j1 = static_cast<long>(j);
          }
        }
      }
      long i0 = y[j1];
      const double v1_new = v[j1] - (v2 - v1);
      const bool v1_lowers = v1_new < v[j1];
      if (rr_cnt < current * n) {
        if (v1_lowers) {
          v[j1] = v1_new;
        } else if (i0 >= 0 && j2 >= 0) {
          j1 = j2;
          i0 = y[j2];
        }
        if (i0 >= 0) {
          if (v1_lowers)
            free_rows[--current] = i0;
          else
            free_rows[new_free++] = i0;
        }
      } else if (i0 >= 0) {
        free_rows[new_free++] = i0;
      }
      x[free_i] = j1;
      y[j1] = free_i;
    }
    free_rows.resize(new_free);
    return free_rows;
  }

  // Shortest augmenting path from start_i; returns the free column reached.
  long find_path(long start_i, std::vector<long>& pred, std::vector<long>& cols, std::vector<double>& d) {
    std::size_t lo = 0, hi = 0, n_ready = 0;
    long final_j = -1;
    for (std::size_t j = 0; j < n; ++j) {
      cols[j] = static_cast<long>(j);
      pred[j] = start_i;
      d[j] = cost(start_i, j) - v[j];
    }
    while (final_j == -1) {
      if (lo == hi) {
        n_ready = lo;
        // Collect the columns at minimum distance into [lo, hi).
        hi = lo + 1;
        double mind = d[cols[lo]];
        for (std::size_t k = hi; k < n; ++k) {
          const long j = cols[k];
          if (d[j] <= mind) {
            if (d[j] < mind) {
              hi = lo;
              mind = d[j];
            }
            cols[k] = cols[hi];
            cols[hi++] = j;
          }
        }
        for (std::size_t k = lo; k < hi; ++k)
          if (y[cols[k]] < 0) final_j = cols[k];
      }
      if (final_j == -1) final_j = scan(lo, hi, pred, cols, d);
    }
    const double mind = d[cols[lo]];
    for (std::size_t k = 0; k < n_ready; ++k) {
      const long j = cols[k];
      v[j] += d[j] - mind;
    }
    return final_j;
  }

  long scan(std::size_t& plo, std::size_t& phi, std::vector<long>& pred, std::vector<long>& cols,
            std::vector<double>& d) {
    std::size_t lo = plo, hi = phi;
    while (lo != hi) {
      long j = cols[lo++];
      const long i = y[j];
      const double mind = d[j];
      const double h = cost(i, j) - v[j] - mind;
      for (std::size_t k = hi; k < n; ++k) {
        j = cols[k];
        const double cred = cost(i, j) - v[j] - h;
        if (cred < d[j]) {
          d[j] = cred;
          pred[j] = i;
          if (cred == mind) {
            if (y[j] < 0) return j;
            cols[k] = cols[hi];
            cols[hi++] = j;
          }
        }
      }
    }
    plo = lo;
    phi = hi;
    return -1;
  }

  void augment(const std::vector<long>& free_rows) {
    std::vector<long> pred(n), cols(n);
    std::vector<double> d(n);
    for (long start : free_rows) {
      long j = find_path(start, pred, cols, d);
      long i = -1;
      while (i != start) {
        i = pred[j];
        y[j] = i;
        std::swap(j, x[i]);
      }
    }
  }
};

}  // namespace

LapResult solve_lap(const double* cost, std::size_t n) { return solve_lap(cost, n, nullptr); }

LapResult solve_lap(const double* cost, std::size_t n, std::vector<double>* duals) {
  LapResult r;
  if (n == 0) return r;
  for (std::size_t k = 0; k < n * n; ++k)
    if (!std::isfinite(cost[k])) throw DomainError("solve_lap: non-finite cost");
  r.assignment.resize(n);
  if (n == 1) {
    r.assignment[0] = 0;
    r.total_cost = cost[0];
    return r;
  }
  Jv jv{cost, n, {}, {}, {}};
  std::vector<long> free_rows;
  if (duals && duals->size() == n) {
    jv.x.assign(n, -1);
    jv.y.assign(n, -1);
    jv.v = *duals;
    free_rows.resize(n);
    for (std::size_t i = 0; i < n; ++i) free_rows[i] = static_cast<long>(i);
  } else {
    free_rows = jv.reduce();
  }
  for (int pass = 0; pass < 2 && !free_rows.empty(); ++pass) free_rows = jv.augment_rows(free_rows);
  if (!free_rows.empty()) jv.augment(free_rows);
  if (duals) *duals = jv.v;
  for (std::size_t i = 0; i < n; ++i) {
    r.assignment[i] = static_cast<std::size_t>(jv.x[i]);
    r.total_cost += cost[i * n + r.assignment[i]];
  }
  return r;
}

LapResult solve_lap(const Eigen::MatrixXd& cost) {
  if (cost.rows() != cost.cols()) throw DomainError("solve_lap: cost must be square");
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = cost;
  return solve_lap(rm.data(), static_cast<std::size_t>(rm.rows()));
}

}  // namespace netmirror
