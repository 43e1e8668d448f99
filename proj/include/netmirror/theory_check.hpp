#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

namespace netmirror {

struct OracleCheck {
  std::string name;
  std::size_t cases = 0;
  double max_error = 0.0;  // relative or absolute, see error_kind
  std::string error_kind = "relative";
  double tolerance = 0.0;
  bool passed = true;
  bool informational = false;  // reported, never fails the run
  std::vector<std::string> failures;
};

struct TheoryCheckOptions {
  bool wide = false;
};

std::vector<OracleCheck> run_theory_checks(const TheoryCheckOptions& opt = {});
nlohmann::json to_json(const std::vector<OracleCheck>& checks);
bool all_passed(const std::vector<OracleCheck>& checks);

// tr(T_p^k T_q^l M) by explicit matrix products.
double trace_by_matrix_powers(std::size_t N, std::size_t k, std::size_t l, double p, double q);

// max_i |s * mirror_i - w * (psi_Z(t_i) - mean)| for the exact Atlanta matrix
// on the grid {0..c_A}, with s = N(N-1)/(2 c_A^2 m) and the better sign w.
double atlanta_mirror_deviation(std::size_t N, std::size_t m, double p, double q, double c_A, double t_star);

}  // namespace netmirror
