#include "netmirror/models.hpp"

#include <cmath>
#include <string>

#include "netmirror/errors.hpp"

namespace netmirror {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ParameterError(what);
}

bool is_prob(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

}  // namespace

std::size_t change_index(std::size_t m, double t_star) {
  return static_cast<std::size_t>(std::floor(t_star * static_cast<double>(m) + 1e-9));
}

LondonParams LondonParams::simulation(std::size_t n, std::size_t m, double p, double q, double t_star) {
  return LondonParams{n, m, p, q, t_star, 0.1, 0.9 / static_cast<double>(m)};
}

LondonParams LondonParams::theoretical(std::size_t n, std::size_t m, double p, double q, double t_star) {
  return LondonParams{n, m, p, q, t_star, 0.0, 1.0 / static_cast<double>(m)};
}

AtlantaParams AtlantaParams::simulation(std::size_t n, std::size_t m, std::size_t N, double p, double q,
                                        double t_star) {
  return AtlantaParams{n, m, N, p, q, t_star, 0.8, 0.1};
}

AtlantaParams AtlantaParams::theoretical(std::size_t n, std::size_t m, std::size_t N, double p, double q,
                                         double c_A, double t_star) {
  return AtlantaParams{n, m, N, p, q, t_star, c_A, 0.0};
}

void validate(const LondonParams& s) {
  require(s.n >= 1, "London: n must be >= 1");
  require(s.m >= 2, "London: m must be >= 2");
  require(is_prob(s.p) && is_prob(s.q), "London: p and q must lie in [0,1]");
  require(s.t_star > 0.0 && s.t_star < 1.0, "London: t_star must lie in (0,1)");
  require(std::isfinite(s.c_L) && s.c_L >= 0.0, "London: c_L must be >= 0");
  require(std::isfinite(s.delta_m) && s.delta_m > 0.0, "London: delta_m must be > 0");
  require(s.c_L + s.delta_m * static_cast<double>(s.m) <= 1.0 + 1e-12,
          "London: c_L + delta_m*m must not exceed 1");
}

void validate(const AtlantaParams& s) {
  require(s.n >= 1, "Atlanta: n must be >= 1");
  require(s.m >= 2, "Atlanta: m must be >= 2");
  require(s.N >= 2, "Atlanta: N must be >= 2");
  require(std::isfinite(s.p) && s.p >= 0.0 && s.p <= 0.5, "Atlanta: p must lie in [0,0.5]");
  require(std::isfinite(s.q) && s.q >= 0.0 && s.q <= 0.5, "Atlanta: q must lie in [0,0.5]");
  require(s.t_star > 0.0 && s.t_star < 1.0, "Atlanta: t_star must lie in (0,1)");
  require(s.c_A > 0.0 && s.c_A < 1.0, "Atlanta: c_A must lie in (0,1)");
  require(s.support_offset >= 0.0, "Atlanta: support_offset must be >= 0");
  require(s.support_offset + s.c_A <= 1.0 + 1e-12, "Atlanta: support must lie in [0,1]");
}

nlohmann::json to_json(const LondonParams& s) {
  return {{"model", "london"}, {"n", s.n}, {"m", s.m}, {"p", s.p}, {"q", s.q},
          {"t_star", s.t_star}, {"c_L", s.c_L}, {"delta_m", s.delta_m}};
}

nlohmann::json to_json(const AtlantaParams& s) {
  return {{"model", "atlanta"}, {"n", s.n}, {"m", s.m}, {"N", s.N}, {"p", s.p}, {"q", s.q},
          {"t_star", s.t_star}, {"c_A", s.c_A}, {"support_offset", s.support_offset}};
}

LondonParams london_from_json(const nlohmann::json& j) {
  LondonParams s = LondonParams::simulation(j.at("n").get<std::size_t>(), j.at("m").get<std::size_t>(),
                                            j.at("p").get<double>(), j.at("q").get<double>(),
                                            j.value("t_star", 0.5));
  s.c_L = j.value("c_L", s.c_L);
  s.delta_m = j.value("delta_m", s.delta_m);
  return s;
}

AtlantaParams atlanta_from_json(const nlohmann::json& j) {
  AtlantaParams s = AtlantaParams::simulation(j.at("n").get<std::size_t>(), j.at("m").get<std::size_t>(),
                                              j.value("N", std::size_t{50}), j.at("p").get<double>(),
                                              j.at("q").get<double>(), j.value("t_star", 0.5));
  s.c_A = j.value("c_A", s.c_A);
  s.support_offset = j.value("support_offset", s.support_offset);
  return s;
}

LatentPaths sample_london_lpp(const LondonParams& s, Rng& rng) {
  validate(s);
  const std::size_t tm = s.change_step();
  LatentPaths out;
  out.origin = s.c_L;
  out.step = s.delta_m;
  for (std::size_t k = 0; k <= s.m; ++k) out.state_grid.push_back(s.c_L + s.delta_m * static_cast<double>(k));
  out.values.resize(s.n, s.m + 1);
  for (std::size_t v = 0; v < s.n; ++v) {
    std::size_t level = 0;
    out.values(v, 0) = out.state_grid[0];
    for (std::size_t i = 1; i <= s.m; ++i) {
      const double prob = i <= tm ? s.p : s.q;
      if (uniform01(rng) < prob) ++level;
      out.values(v, i) = out.state_grid[level];
    }
  }
  return out;
}

LatentPaths sample_atlanta_lpp(const AtlantaParams& s, Rng& rng) {
  validate(s);
  const std::size_t tm = s.change_step();
  const std::size_t N = s.N;
  LatentPaths out;
  out.origin = s.support_offset;
  out.step = s.delta();
  for (std::size_t k = 0; k < N; ++k) out.state_grid.push_back(s.support_offset + s.delta() * static_cast<double>(k));
  out.values.resize(s.n, s.m + 1);
  for (std::size_t v = 0; v < s.n; ++v) {
    std::size_t state = uniform_index(rng, N);
    out.values(v, 0) = out.state_grid[state];
    for (std::size_t i = 1; i <= s.m; ++i) {
      const double prob = i <= tm ? s.p : s.q;
      const double u = uniform01(rng);
      if (state == 0) {
        if (u < prob) state = 1;
      } else if (state == N - 1) {
        if (u < prob) state = N - 2;
      } else if (u < prob) {
        ++state;
      } else if (u < 2.0 * prob) {
        --state;
      }
      out.values(v, i) = out.state_grid[state];
    }
  }
  return out;
}

Adjacency sample_rdpg(const Eigen::MatrixXd& X, Rng& rng, bool clamp) {
  const std::size_t n = X.rows();
  Adjacency A(n);
  constexpr double slack = 1e-12;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double prob = X.row(i).dot(X.row(j));
      if (!std::isfinite(prob)) throw DomainError("sample_rdpg: non-finite inner product");
      if (prob < 0.0 || prob > 1.0) {
        if (!clamp && (prob < -slack || prob > 1.0 + slack))
          throw DomainError("sample_rdpg: inner product " + std::to_string(prob) + " outside [0,1] at (" +
                            std::to_string(i) + "," + std::to_string(j) + ")");
        prob = std::clamp(prob, 0.0, 1.0);
      }
      if (uniform01(rng) < prob) A.set_edge(i, j);
    }
  }
  return A;
}

Tsg generate_tsg(const LatentPaths& paths, Rng& rng, bool clamp) {
  Tsg out;
  const std::size_t m = paths.m();
  out.adjacency.reserve(m);
  for (std::size_t t = 1; t <= m; ++t) {
    Rng stream(rng());
    out.adjacency.push_back(sample_rdpg(paths.at(t), stream, clamp));
  }
  return out;
}

Permutation alpha_shuffle_permutation(std::size_t n, double alpha, Rng& rng) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in [0,1]");
  const auto k = static_cast<std::size_t>(std::floor(alpha * static_cast<double>(n) + 1e-9));
  Permutation sigma = identity_permutation(n);
  const std::size_t start = n - std::min(k, n);
  for (std::size_t i = n; i > start + 1; --i) {
    const std::size_t j = start + uniform_index(rng, i - start);
    std::swap(sigma[i - 1], sigma[j]);
  }
  return sigma;
}

Tsg alpha_shuffle_tsg(const Tsg& tsg, double alpha, Rng& rng) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in [0,1]");
  if (tsg.shuffles) throw ParameterError("TSG is already shuffled");
  Tsg out;
  out.params = tsg.params;
  out.params["alpha"] = alpha;
  std::vector<Permutation> perms;
  for (const Adjacency& A : tsg.adjacency) {
    Permutation sigma = alpha_shuffle_permutation(A.size(), alpha, rng);
    out.adjacency.push_back(A.permuted(sigma));
    perms.push_back(std::move(sigma));
  }
  out.shuffles = std::move(perms);
  return out;
}

}  // namespace netmirror
