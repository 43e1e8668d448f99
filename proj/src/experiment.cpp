#include "netmirror/experiment.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <thread>

#include "netmirror/changepoint.hpp"
#include "netmirror/errors.hpp"
#include "netmirror/mds.hpp"
#include "netmirror/theory.hpp"

namespace netmirror {

std::string to_string(ModelKind k) { return k == ModelKind::london ? "london" : "atlanta"; }
std::string to_string(LocalizerKind k) { return k == LocalizerKind::l2 ? "l2" : "linf"; }
std::string to_string(MirrorTransform k) {
  switch (k) {
    case MirrorTransform::automatic: return "auto";
    case MirrorTransform::none: return "none";
    case MirrorTransform::sqrt: return "sqrt";
  }
  return "unknown";
}

ModelKind model_from_string(const std::string& s) {
  if (s == "london") return ModelKind::london;
  if (s == "atlanta") return ModelKind::atlanta;
  throw ParameterError("unknown model '" + s + "'");
}

LocalizerKind localizer_from_string(const std::string& s) {
  if (s == "l2") return LocalizerKind::l2;
  if (s == "linf") return LocalizerKind::linf;
  throw ParameterError("unknown localizer '" + s + "'");
}

MirrorTransform transform_from_string(const std::string& s) {
  if (s == "auto") return MirrorTransform::automatic;
  if (s == "none") return MirrorTransform::none;
  if (s == "sqrt") return MirrorTransform::sqrt;
  throw ParameterError("unknown mirror transform '" + s + "'");
}

double localize(const Eigen::VectorXd& ts, const Eigen::VectorXd& ys, LocalizerKind localizer) {
  return localizer == LocalizerKind::l2 ? localize_l2(ts, ys).t_hat : localize_linf(ts, ys).t_hat;
}

MseReport summarize(const std::vector<double>& estimates, double t_star, std::size_t m) {
  MseReport r;
  r.t_star = t_star;
  r.estimates = estimates;
  r.chance = m >= 4 ? chance_mse(m, t_star) : std::numeric_limits<double>::quiet_NaN();
  std::vector<double> sq;
  for (double e : estimates)
    if (std::isfinite(e)) sq.push_back((e - t_star) * (e - t_star));
  r.nmc = sq.size();
  if (sq.empty()) {
    r.mse = r.std = r.ci_low = r.ci_high = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  double total = 0.0;
  for (double v : sq) total += v;
  r.mse = total / static_cast<double>(sq.size());
  double ss = 0.0;
  for (double v : sq) ss += (v - r.mse) * (v - r.mse);
  r.std = sq.size() > 1 ? std::sqrt(ss / static_cast<double>(sq.size() - 1)) : 0.0;
  const double half = 1.96 * r.std / std::sqrt(static_cast<double>(sq.size()));
  r.ci_low = r.mse - half;
  r.ci_high = r.mse + half;
  return r;
}

MseReport mse_from_mirrors(const std::vector<Eigen::VectorXd>& mirrors, double t_star, LocalizerKind localizer) {
  std::vector<double> est;
  std::size_t m = 0;
  for (const Eigen::VectorXd& y : mirrors) {
    m = y.size();
    est.push_back(localize(default_times(m), y, localizer));
  }
  return summarize(est, t_star, m);
}

namespace {

struct ReplicateData {
  LatentPaths paths;
  Tsg tsg;
  std::vector<Eigen::MatrixXd> embeddings;
  std::vector<double> degrees;
};

std::uint64_t alpha_key(double alpha) { return std::bit_cast<std::uint64_t>(alpha); }

ReplicateData simulate(const ExperimentSpec& spec, std::size_t rep, bool need_embeddings) {
  ReplicateData d;
  Rng path_rng = make_rng(spec.seed, {rep, 0});
  d.paths = spec.model == ModelKind::london ? sample_london_lpp(spec.london, path_rng)
                                            : sample_atlanta_lpp(spec.atlanta, path_rng);
  Rng graph_rng = make_rng(spec.seed, {rep, 1});
  d.tsg = generate_tsg(d.paths, graph_rng);
  d.degrees = degree_profile(d.tsg);
  if (need_embeddings) d.embeddings = embed_tsg(d.tsg, spec.d_ase);
  return d;
}

double evaluate_row(const ExperimentSpec& spec, const ExperimentRow& row, std::size_t rep, const ReplicateData& d) {
  const std::size_t m = d.tsg.m(), n = d.tsg.n();
  Eigen::VectorXd ys;
  if (row.metric == MetricTag::avg_degree) {
    ys = Eigen::Map<const Eigen::VectorXd>(d.degrees.data(), static_cast<Eigen::Index>(m));
    const bool take_sqrt = row.transform == MirrorTransform::sqrt ||
                           (row.transform == MirrorTransform::automatic && spec.model == ModelKind::london);
    if (take_sqrt) ys = ys.array().sqrt().matrix();
  } else {
    if (row.transform == MirrorTransform::sqrt)
      throw ParameterError("the square-root transform applies to the degree profile only");
    std::vector<Permutation> perms;
    if (row.alpha > 0.0) {
      Rng shuffle_rng = make_rng(spec.seed, {rep, 2, alpha_key(row.alpha)});
      for (std::size_t t = 0; t < m; ++t) perms.push_back(alpha_shuffle_permutation(n, row.alpha, shuffle_rng));
    }
    std::vector<Eigen::MatrixXd> emb;
    for (std::size_t t = 0; t < m; ++t) {
      Eigen::MatrixXd X = row.use_true_latents ? d.paths.at(t + 1) : d.embeddings[t];
      if (!perms.empty()) X = permute_rows(X, perms[t]);
      emb.push_back(std::move(X));
    }
    MetricConfig mc;
    mc.metric = row.metric;
    mc.d_ase = spec.d_ase;
    DistanceMatrix D;
    if (row.strategy == Strategy::none) {
      D = distance_matrix_from_embeddings(emb, mc);
    } else {
      Tsg shuffled;
      for (std::size_t t = 0; t < m; ++t)
        shuffled.adjacency.push_back(perms.empty() ? d.tsg.adjacency[t] : d.tsg.adjacency[t].permuted(perms[t]));
      Rng gm_rng = make_rng(spec.seed, {rep, 3, static_cast<std::uint64_t>(row.strategy), alpha_key(row.alpha)});
      D = matched_distance_matrix(shuffled, emb, row.strategy, spec.gm, mc, gm_rng);
    }
    ys = row.iso ? iso_mirror(D, row.d_cmds) : Eigen::VectorXd(cmds(D, row.d_cmds).coords.col(0));
  }
  return localize(default_times(m), ys, row.localizer);
}

}  // namespace

std::vector<MseReport> mse_table(const ExperimentSpec& base, const std::vector<ExperimentRow>& rows) {
  if (base.model == ModelKind::london)
    validate(base.london);
  else
    validate(base.atlanta);
  if (base.nmc < 1) throw ParameterError("nmc must be >= 1");
  for (const ExperimentRow& row : rows)
    if (!(row.alpha >= 0.0 && row.alpha <= 1.0)) throw ParameterError("alpha must lie in [0,1]");

  bool need_embeddings = false;
  for (const ExperimentRow& row : rows)
    need_embeddings = need_embeddings || (row.metric != MetricTag::avg_degree && !row.use_true_latents);

  const std::size_t R = rows.size(), nmc = base.nmc;
  std::vector<std::vector<double>> est(R, std::vector<double>(nmc, std::numeric_limits<double>::quiet_NaN()));
  std::vector<std::vector<std::string>> errors(nmc * R);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t rep = next++; rep < nmc; rep = next++) {
      std::optional<ReplicateData> data;
      try {
        data = simulate(base, rep, need_embeddings);
      } catch (const std::exception& e) {
        for (std::size_t r = 0; r < R; ++r)
          errors[rep * R + r].push_back("replicate " + std::to_string(rep) + ": " + e.what());
        continue;
      }
      for (std::size_t r = 0; r < R; ++r) {
        try {
          est[r][rep] = evaluate_row(base, rows[r], rep, *data);
        } catch (const std::exception& e) {
          errors[rep * R + r].push_back("replicate " + std::to_string(rep) + ": " + e.what());
        }
      }
    }
  };
  std::size_t threads = base.threads ? base.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, nmc);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  std::vector<MseReport> out;
  for (std::size_t r = 0; r < R; ++r) {
    MseReport rep = summarize(est[r], base.t_star(), base.m());
    rep.label = rows[r].label;
    for (std::size_t i = 0; i < nmc; ++i)
      for (const std::string& msg : errors[i * R + r]) rep.failures.push_back(msg);
    out.push_back(std::move(rep));
  }
  return out;
}

MseReport mse_experiment(const ExperimentSpec& spec) { return mse_table(spec, {spec.row}).front(); }

nlohmann::json to_json(const MseReport& r) {
  nlohmann::json est = nlohmann::json::array();
  for (double e : r.estimates) est.push_back(std::isfinite(e) ? nlohmann::json(e) : nlohmann::json(nullptr));
  return {{"label", r.label},   {"mse", r.mse},         {"std", r.std},         {"ci_low", r.ci_low},
          {"ci_high", r.ci_high}, {"chance", r.chance}, {"t_star", r.t_star},   {"nmc", r.nmc},
          {"estimates", est},   {"failures", r.failures}};
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string csv_header() { return "label,q,alpha,mse,std,ci_low,ci_high,chance,nmc,failures"; }

std::string csv_row(const MseReport& r, double q, double alpha) {
  return r.label + "," + num(q) + "," + num(alpha) + "," + num(r.mse) + "," + num(r.std) + "," + num(r.ci_low) + "," +
         num(r.ci_high) + "," + num(r.chance) + "," + std::to_string(r.nmc) + "," + std::to_string(r.failures.size());
}

nlohmann::json to_json(const ExperimentSpec& s) {
  nlohmann::json j;
  j["model"] = to_string(s.model);
  j["params"] = s.model == ModelKind::london ? to_json(s.london) : to_json(s.atlanta);
  j["params"].erase("model");
  j["metric"] = to_string(s.row.metric);
  j["strategy"] = to_string(s.row.strategy);
  j["localizer"] = to_string(s.row.localizer);
  j["transform"] = to_string(s.row.transform);
  j["alpha"] = s.row.alpha;
  j["d_cmds"] = s.row.d_cmds;
  j["iso"] = s.row.iso;
  j["d_ase"] = s.d_ase;
  j["nmc"] = s.nmc;
  j["seed"] = s.seed;
  j["gm"] = {{"max_iter", s.gm.max_iter}, {"restarts", s.gm.restarts}, {"tol", s.gm.tol}};
  return j;
}

void apply_json(ExperimentSpec& s, const nlohmann::json& j) {
  if (j.contains("model")) s.model = model_from_string(j.at("model").get<std::string>());
  if (j.contains("params")) {
    const nlohmann::json& p = j.at("params");
    if (s.model == ModelKind::london) {
      LondonParams& l = s.london;
      l.n = p.value("n", l.n);
      const std::size_t old_m = l.m;
      l.m = p.value("m", l.m);
      if (l.m != old_m && l.m > 0) l.delta_m *= static_cast<double>(old_m) / static_cast<double>(l.m);
      l.p = p.value("p", l.p);
      l.q = p.value("q", l.q);
      l.t_star = p.value("t_star", l.t_star);
      l.c_L = p.value("c_L", l.c_L);
      l.delta_m = p.value("delta_m", l.delta_m);
    } else {
      AtlantaParams& a = s.atlanta;
      a.n = p.value("n", a.n);
      a.m = p.value("m", a.m);
      a.N = p.value("N", a.N);
      a.p = p.value("p", a.p);
      a.q = p.value("q", a.q);
      a.t_star = p.value("t_star", a.t_star);
      a.c_A = p.value("c_A", a.c_A);
      a.support_offset = p.value("support_offset", a.support_offset);
    }
  }
  if (j.contains("metric")) s.row.metric = metric_from_string(j.at("metric").get<std::string>());
  if (j.contains("strategy")) s.row.strategy = strategy_from_string(j.at("strategy").get<std::string>());
  if (j.contains("localizer")) s.row.localizer = localizer_from_string(j.at("localizer").get<std::string>());
  if (j.contains("transform")) s.row.transform = transform_from_string(j.at("transform").get<std::string>());
  s.row.alpha = j.value("alpha", s.row.alpha);
  s.row.d_cmds = j.value("d_cmds", s.row.d_cmds);
  s.row.iso = j.value("iso", s.row.iso);
  s.d_ase = j.value("d_ase", s.d_ase);
  s.nmc = j.value("nmc", s.nmc);
  s.seed = j.value("seed", s.seed);
  if (j.contains("gm")) {
    const nlohmann::json& g = j.at("gm");
    s.gm.max_iter = g.value("max_iter", s.gm.max_iter);
    s.gm.restarts = g.value("restarts", s.gm.restarts);
    s.gm.tol = g.value("tol", s.gm.tol);
  }
}

}  // namespace netmirror
