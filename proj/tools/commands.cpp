#include "commands.hpp"

#include <cmath>
#include <optional>

#include "CLI11.hpp"
#include "netmirror/changepoint.hpp"
#include "netmirror/errors.hpp"
#include "netmirror/experiment.hpp"
#include "netmirror/io.hpp"
#include "netmirror/mds.hpp"
#include "netmirror/svg.hpp"
#include "netmirror/swarm.hpp"
#include "netmirror/theory.hpp"
#include "netmirror/theory_check.hpp"

namespace netmirror::cli {

namespace {

class OracleFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Model and experiment flags shared by simulate and mse-sweep.
struct ModelFlags {
  std::optional<std::string> model;
  std::optional<std::size_t> n, m, N;
  std::optional<double> p, q, tstar, c_l, delta, c_a, offset;
  bool theoretical = false;
  std::optional<std::string> spec_file;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* app) {
    app->add_option("--model", model, "london or atlanta")->check(CLI::IsMember({"london", "atlanta"}));
    app->add_option("--n", n, "vertex count");
    app->add_option("--m", m, "number of time points");
    app->add_option("--N", N, "Atlanta state count");
    app->add_option("--p", p, "step probability before the change");
    app->add_option("--q", q, "step probability after the change");
    app->add_option("--tstar", tstar, "changepoint fraction");
    app->add_option("--c-l", c_l, "London start value");
    app->add_option("--delta", delta, "London step size");
    app->add_option("--c-a", c_a, "Atlanta grid range");
    app->add_option("--offset", offset, "Atlanta grid origin");
    app->add_flag("--theoretical", theoretical, "closed-form normalization (London c_L=0, delta=1/m; Atlanta origin 0)");
    app->add_option("--spec", spec_file, "JSON experiment spec; flags override it");
    app->add_option("--seed", seed, "master seed");
  }

  ExperimentSpec resolve() const {
    ExperimentSpec spec;
    spec.london = LondonParams::simulation(100, 20, 0.4, 0.3, 0.5);
    spec.atlanta = AtlantaParams::simulation(100, 20, 50, 0.4, 0.2, 0.5);
    if (spec_file) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(read_text(*spec_file));
      } catch (const nlohmann::json::exception& e) {
        throw DataError(*spec_file + ": " + e.what());
      }
      apply_json(spec, j);
    }
    nlohmann::json patch = nlohmann::json::object(), params = nlohmann::json::object();
    if (model) patch["model"] = *model;
    if (n) params["n"] = *n;
    if (m) params["m"] = *m;
    if (N) params["N"] = *N;
    if (p) params["p"] = *p;
    if (q) params["q"] = *q;
    if (tstar) params["t_star"] = *tstar;
    if (c_l) params["c_L"] = *c_l;
    if (delta) params["delta_m"] = *delta;
    if (c_a) params["c_A"] = *c_a;
    if (offset) params["support_offset"] = *offset;
    if (!params.empty()) patch["params"] = params;
    if (seed) patch["seed"] = *seed;
    apply_json(spec, patch);
    if (theoretical) {
      spec.london.c_L = 0.0;
      spec.london.delta_m = 1.0 / static_cast<double>(spec.london.m);
      spec.atlanta.support_offset = 0.0;
    }
    if (spec.model == ModelKind::london)
      validate(spec.london);
    else
      validate(spec.atlanta);
    return spec;
  }
};

nlohmann::json model_params_json(const ExperimentSpec& spec) {
  return spec.model == ModelKind::london ? to_json(spec.london) : to_json(spec.atlanta);
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// Reference psi_Z overlay, when the manifest records a model with a known mirror.
std::optional<Eigen::VectorXd> reference_mirror(const nlohmann::json& params, std::size_t m) {
  if (!params.is_object() || !params.contains("model") || params.value("model", "") != "london") return std::nullopt;
  const LondonParams lp = london_from_json(params);
  if (lp.m != m) return std::nullopt;
  const double scale = lp.delta_m * static_cast<double>(lp.m);
  Eigen::VectorXd ref = psi_z_target(m, lp.p, lp.q, lp.t_star).values * scale;
  ref.array() += lp.c_L;
  return ref;
}

int cmd_simulate(const ModelFlags& flags, std::optional<double> alpha, const std::string& out_dir, bool edge_lists,
                 std::ostream& out) {
  const ExperimentSpec spec = flags.resolve();
  Rng path_rng = make_rng(spec.seed, {0, 0});
  const LatentPaths paths = spec.model == ModelKind::london ? sample_london_lpp(spec.london, path_rng)
                                                            : sample_atlanta_lpp(spec.atlanta, path_rng);
  Rng graph_rng = make_rng(spec.seed, {0, 1});
  Tsg tsg = generate_tsg(paths, graph_rng);
  tsg.params = model_params_json(spec);
  if (alpha) {
    if (!(*alpha >= 0.0 && *alpha <= 1.0)) throw ParameterError("--alpha must lie in [0,1]");
    Rng shuffle_rng = make_rng(spec.seed, {0, 2});
    tsg = alpha_shuffle_tsg(tsg, *alpha, shuffle_rng);
    tsg.params["alpha"] = *alpha;
  }
  TsgWriteOptions opt;
  opt.edge_lists = edge_lists;
  opt.seed = spec.seed;
  write_tsg(tsg, out_dir, opt);
  out << "wrote " << tsg.m() << " graphs on " << tsg.n() << " vertices to " << out_dir << "\n";
  return ok;
}

struct MirrorFlags {
  std::string in, out_dir;
  std::string metric = "dmv", strategy = "none";
  std::size_t d_ase = 1, d_cmds = 1;
  bool iso = false, svg = false;
  std::uint64_t seed = 1;
  std::size_t gm_restarts = 1, gm_max_iter = 100;
};

int cmd_mirror(const MirrorFlags& f, std::ostream& out) {
  const Tsg tsg = read_tsg(f.in);
  const std::size_t m = tsg.m();
  if (m == 0) throw DataError("no graphs in " + f.in);
  MetricConfig mc;
  mc.metric = metric_from_string(f.metric);
  mc.d_ase = f.d_ase;
  const Strategy strategy = strategy_from_string(f.strategy);
  const fs::path dir(f.out_dir);
  fs::create_directories(dir);
  const Eigen::VectorXd times = default_times(m);

  DistanceMatrix D;
  if (mc.metric == MetricTag::avg_degree) {
    const std::vector<double> profile = degree_profile(tsg);
    std::string csv = "t,avg_degree,sqrt_avg_degree\n";
    for (std::size_t i = 0; i < m; ++i)
      csv += format_double(times(i)) + "," + format_double(profile[i]) + "," + format_double(std::sqrt(profile[i])) + "\n";
    write_text(dir / "degree.csv", csv);
    D = distance_matrix_from_profile(profile, MetricTag::avg_degree);
  } else if (strategy == Strategy::none) {
    D = distance_matrix(tsg, mc);
  } else {
    GmConfig gm;
    gm.restarts = f.gm_restarts;
    gm.max_iter = f.gm_max_iter;
    Rng rng = make_rng(f.seed, {3});
    Alignment al;
    D = matched_distance_matrix(tsg, embed_tsg(tsg, f.d_ase), strategy, gm, mc, rng, &al);
    if (!al.permutations.empty()) write_text(dir / "permutations.json", permutations_to_json(al.permutations).dump() + "\n");
    write_matching_trace_csv(al.matches, dir / "matching_trace.csv");
  }
  write_distance_csv(D, dir / "distance.csv");

  const std::size_t c = std::min(f.d_cmds, m > 1 ? m - 1 : 1);
  Eigen::VectorXd shown;
  if (m > 1) {
    const Mirror mir = cmds(D, c);
    write_mirror_csv(mir, dir / "mirror.csv");
    shown = mir.coords.col(0);
    if (f.iso) {
      shown = iso_mirror(D, c);
      write_iso_csv(times, shown, dir / "iso.csv");
    }
  } else {
    Mirror mir;
    mir.coords = Eigen::MatrixXd::Zero(1, 1);
    mir.times = times;
    write_mirror_csv(mir, dir / "mirror.csv");
    shown = mir.coords.col(0);
  }
  if (f.svg) {
    std::vector<PlotSeries> series;
    PlotSeries pts;
    pts.x = to_std(times);
    pts.y = to_std(shown);
    pts.label = f.iso ? "iso-mirror" : "mirror";
    series.push_back(pts);
    if (auto ref = reference_mirror(tsg.params, m); ref && mc.metric != MetricTag::avg_degree) {
      // align the reference to the centered mirror by least squares on sign and scale
      Eigen::VectorXd r = ref->array() - ref->mean();
      const double denom = r.squaredNorm();
      const double k = denom > 0 ? r.dot(shown) / denom : 0.0;
      PlotSeries line;
      line.x = to_std(times);
      line.y = to_std(k * r + Eigen::VectorXd::Constant(m, shown.mean()));
      line.label = "psi_Z (fitted scale)";
      line.color = "#ff7f0e";
      line.line = true;
      series.push_back(line);
    }
    PlotOptions po;
    po.title = f.metric + " mirror";
    write_text(dir / "mirror.svg", svg_plot(series, po));
  }
  out << "wrote mirror for " << m << " time points to " << f.out_dir << "\n";
  return ok;
}

struct LocalizeFlags {
  std::string in;
  std::string localizer = "l2";
  std::size_t column = 1;
  std::size_t max_breaks = 20;
  std::optional<std::string> out_file;
};

int cmd_localize(const LocalizeFlags& f, std::ostream& out) {
  const Mirror mir = read_mirror_csv(f.in);
  if (mir.times.size() < 4) throw ParameterError("localization needs at least 4 time points");
  if (f.column < 1 || f.column > static_cast<std::size_t>(mir.coords.cols()))
    throw ParameterError("--column out of range");
  const Eigen::VectorXd ys = mir.coords.col(f.column - 1);
  nlohmann::json report;
  report["localizer"] = f.localizer;
  if (f.localizer == "segmented-bic") {
    const SegmentedFit fit = segmented_bic(mir.times, ys, f.max_breaks);
    report["breaks"] = fit.breaks;
    report["rss_by_breaks"] = fit.rss_by_breaks;
    report["bic_by_breaks"] = fit.bic_by_breaks;
    report["bic"] = fit.bic;
    report["exact"] = fit.exact;
    out << "breaks:";
    for (double b : fit.breaks) out << " " << format_double(b);
    out << "\n";
  } else {
    const LocalizerKind kind = localizer_from_string(f.localizer);
    const LocalizeResult r = kind == LocalizerKind::l2 ? localize_l2(mir.times, ys) : localize_linf(mir.times, ys);
    report["t_hat"] = r.t_hat;
    report["index"] = r.index;
    report["S_k"] = r.scores;
    out << "t_hat " << format_double(r.t_hat) << "\n";
  }
  if (f.out_file) write_text(*f.out_file, report.dump(2) + "\n");
  return ok;
}

struct SweepFlags {
  ModelFlags model;
  std::optional<std::string> metric, strategy, localizer, transform;
  std::optional<double> alpha;
  std::optional<std::size_t> d_ase, d_cmds, nmc, threads;
  std::optional<std::string> out_file, json_file;
};

ExperimentRow row_from_json(const ExperimentRow& base, const nlohmann::json& j) {
  ExperimentSpec tmp;
  tmp.row = base;
  apply_json(tmp, j);
  ExperimentRow r = tmp.row;
  r.label = j.value("label", r.label);
  r.use_true_latents = j.value("use_true_latents", r.use_true_latents);
  return r;
}

std::string default_label(const ExperimentRow& r) {
  std::string s = to_string(r.metric);
  if (r.strategy != Strategy::none) s += "+" + to_string(r.strategy);
  if (r.iso) s += "+iso";
  return s;
}

int cmd_mse_sweep(const SweepFlags& f, std::ostream& out) {
  ExperimentSpec base = f.model.resolve();
  nlohmann::json file_spec = nlohmann::json::object();
  if (f.model.spec_file) file_spec = nlohmann::json::parse(read_text(*f.model.spec_file));
  nlohmann::json patch = nlohmann::json::object();
  if (f.metric) patch["metric"] = *f.metric;
  if (f.strategy) patch["strategy"] = *f.strategy;
  if (f.localizer) patch["localizer"] = *f.localizer;
  if (f.transform) patch["transform"] = *f.transform;
  if (f.d_cmds) patch["d_cmds"] = *f.d_cmds;
  if (f.d_ase) patch["d_ase"] = *f.d_ase;
  if (f.nmc) patch["nmc"] = *f.nmc;
  apply_json(base, patch);
  if (f.threads) base.threads = *f.threads;

  std::vector<double> qs, alphas;
  const nlohmann::json sweep = file_spec.value("sweep", nlohmann::json::object());
  if (sweep.contains("q")) qs = sweep["q"].get<std::vector<double>>();
  if (sweep.contains("alpha")) alphas = sweep["alpha"].get<std::vector<double>>();
  const double base_q = base.model == ModelKind::london ? base.london.q : base.atlanta.q;
  if (qs.empty() || f.model.q) qs = {base_q};
  if (alphas.empty() || f.alpha) alphas = {f.alpha.value_or(base.row.alpha)};

  std::vector<ExperimentRow> templates;
  if (file_spec.contains("rows") && !f.metric && !f.strategy)
    for (const auto& j : file_spec["rows"]) templates.push_back(row_from_json(base.row, j));
  else
    templates.push_back(base.row);
  for (ExperimentRow& r : templates)
    if (r.label.empty()) r.label = default_label(r);

  std::string csv = csv_header() + "\n";
  nlohmann::json reports = nlohmann::json::array();
  for (double q : qs) {
    ExperimentSpec cell = base;
    cell.london.q = q;
    cell.atlanta.q = q;
    std::vector<ExperimentRow> rows;
    for (double a : alphas)
      for (ExperimentRow r : templates) {
        r.alpha = a;
        rows.push_back(r);
      }
    const std::vector<MseReport> table = mse_table(cell, rows);
    for (std::size_t k = 0; k < table.size(); ++k) {
      csv += csv_row(table[k], q, rows[k].alpha) + "\n";
      nlohmann::json j = to_json(table[k]);
      j["q"] = q;
      j["alpha"] = rows[k].alpha;
      reports.push_back(j);
    }
  }
  if (f.out_file)
    write_text(*f.out_file, csv);
  else
    out << csv;
  if (f.json_file) write_text(*f.json_file, reports.dump(2) + "\n");
  return ok;
}

struct SwarmFlags {
  std::string in, out_dir;
  std::optional<std::string> frames;
  std::uint64_t seed = 1;
  std::size_t d_ase = 2, d_cmds = 2, max_breaks = 20;
  bool svg = false;
};

std::optional<FrameWindow> parse_window(const std::optional<std::string>& s) {
  if (!s) return std::nullopt;
  const auto colon = s->find(':');
  if (colon == std::string::npos) throw ParameterError("--frames expects first:last");
  try {
    return FrameWindow{std::stoll(s->substr(0, colon)), std::stoll(s->substr(colon + 1))};
  } catch (const std::exception&) {
    throw ParameterError("--frames expects integers first:last");
  }
}

int cmd_swarm(const SwarmFlags& f, std::ostream& out) {
  const SwarmFrames frames = read_swarm_csv(f.in, parse_window(f.frames));
  Rng rng = make_rng(f.seed, {4});
  SwarmConfig cfg;
  cfg.d_ase = f.d_ase;
  cfg.d_cmds = f.d_cmds;
  cfg.max_breaks = f.max_breaks;
  const SwarmResult res = swarm_pipeline(frames, rng, cfg);
  const fs::path dir(f.out_dir);
  fs::create_directories(dir);
  write_distance_csv(res.distances, dir / "distance.csv");
  write_iso_csv(res.times, res.mirror, dir / "iso.csv");
  nlohmann::json report = {{"frames", res.times.size()},
                           {"agents", frames.agents.size()},
                           {"breaks", res.breakpoints},
                           {"bic_by_breaks", res.fit.bic_by_breaks},
                           {"exact", res.fit.exact}};
  write_text(dir / "breaks.json", report.dump(2) + "\n");
  if (f.svg) {
    PlotSeries s;
    s.x = to_std(res.times);
    s.y = to_std(res.mirror);
    s.label = "iso-mirror";
    PlotOptions po;
    po.title = "swarm iso-mirror";
    po.x_label = "frame";
    po.vertical_marks = res.breakpoints;
    write_text(dir / "iso.svg", svg_plot({s}, po));
  }
  out << "breaks:";
  for (double b : res.breakpoints) out << " " << format_double(b);
  out << "\n";
  return ok;
}

int cmd_theory_check(const std::string& grid, const std::optional<std::string>& out_file, std::ostream& out) {
  TheoryCheckOptions opt;
  opt.wide = grid == "wide";
  const std::vector<OracleCheck> checks = run_theory_checks(opt);
  const nlohmann::json report = to_json(checks);
  if (out_file) write_text(*out_file, report.dump(2) + "\n");
  out << report.dump(2) << "\n";
  if (!all_passed(checks)) throw OracleFailure("theory oracle mismatch");
  return ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Changepoint localization in time series of random dot product graphs", "netmirror"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  ModelFlags sim_flags;
  std::optional<double> sim_alpha;
  std::string sim_out;
  bool sim_edges = false;
  CLI::App* sim = app.add_subcommand("simulate", "sample a time series of graphs");
  sim_flags.attach(sim);
  sim->add_option("--alpha", sim_alpha, "shuffle fraction applied per time");
  sim->add_option("--out", sim_out, "output directory")->required();
  sim->add_flag("--edge-lists", sim_edges, "also write one i,j CSV per time");

  MirrorFlags mf;
  CLI::App* mir = app.add_subcommand("mirror", "distance matrix and Euclidean mirror of a stored series");
  mir->add_option("--in", mf.in, "series directory, manifest or container")->required();
  mir->add_option("--out", mf.out_dir, "output directory")->required();
  mir->add_option("--metric", mf.metric)->check(CLI::IsMember({"dmv", "dmv_sq", "w1", "w2", "avg_degree"}));
  mir->add_option("--strategy", mf.strategy)->check(CLI::IsMember({"none", "all_to_one", "consecutive", "pairwise"}));
  mir->add_option("--d-ase", mf.d_ase)->check(CLI::PositiveNumber);
  mir->add_option("--d-cmds", mf.d_cmds)->check(CLI::PositiveNumber);
  mir->add_flag("--iso", mf.iso, "also run Isomap on the CMDS output");
  mir->add_flag("--svg", mf.svg, "write mirror.svg");
  mir->add_option("--seed", mf.seed);
  mir->add_option("--gm-restarts", mf.gm_restarts)->check(CLI::PositiveNumber);
  mir->add_option("--gm-max-iter", mf.gm_max_iter)->check(CLI::PositiveNumber);

  LocalizeFlags lf;
  CLI::App* loc = app.add_subcommand("localize", "changepoint estimate from a mirror CSV");
  loc->add_option("--in", lf.in, "mirror CSV (t, psi...)")->required();
  loc->add_option("--localizer", lf.localizer)->check(CLI::IsMember({"l2", "linf", "segmented-bic"}));
  loc->add_option("--column", lf.column, "mirror column, 1-based");
  loc->add_option("--max-breaks", lf.max_breaks);
  loc->add_option("--out", lf.out_file, "JSON report");

  SweepFlags sf;
  CLI::App* sweep = app.add_subcommand("mse-sweep", "Monte Carlo MSE table over q and alpha");
  sf.model.attach(sweep);
  sweep->add_option("--metric", sf.metric)->check(CLI::IsMember({"dmv", "dmv_sq", "w1", "w2", "avg_degree"}));
  sweep->add_option("--strategy", sf.strategy)->check(CLI::IsMember({"none", "all_to_one", "consecutive", "pairwise"}));
  sweep->add_option("--localizer", sf.localizer)->check(CLI::IsMember({"l2", "linf"}));
  sweep->add_option("--transform", sf.transform)->check(CLI::IsMember({"auto", "none", "sqrt"}));
  sweep->add_option("--alpha", sf.alpha);
  sweep->add_option("--d-ase", sf.d_ase)->check(CLI::PositiveNumber);
  sweep->add_option("--d-cmds", sf.d_cmds)->check(CLI::PositiveNumber);
  sweep->add_option("--nmc", sf.nmc)->check(CLI::PositiveNumber);
  sweep->add_option("--threads", sf.threads);
  sweep->add_option("--out", sf.out_file, "CSV table (stdout otherwise)");
  sweep->add_option("--json", sf.json_file, "per-cell reports");

  SwarmFlags wf;
  CLI::App* swarm = app.add_subcommand("swarm", "iso-mirror and segmented fit of swarm trajectories");
  swarm->add_option("--in", wf.in, "CSV with header frame,agent,x,y")->required();
  swarm->add_option("--out", wf.out_dir, "output directory")->required();
  swarm->add_option("--frames", wf.frames, "inclusive window first:last");
  swarm->add_option("--seed", wf.seed);
  swarm->add_option("--d-ase", wf.d_ase)->check(CLI::PositiveNumber);
  swarm->add_option("--d-cmds", wf.d_cmds)->check(CLI::PositiveNumber);
  swarm->add_option("--max-breaks", wf.max_breaks);
  swarm->add_flag("--svg", wf.svg);

  std::string grid = "default";
  std::optional<std::string> theory_out;
  CLI::App* theory = app.add_subcommand("theory-check", "compare closed forms against direct computation");
  theory->add_option("--grid", grid)->check(CLI::IsMember({"default", "wide"}));
  theory->add_option("--out", theory_out, "JSON report file");

  std::vector<const char*> argv{"netmirror"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_flags, sim_alpha, sim_out, sim_edges, out);
    if (mir->parsed()) return cmd_mirror(mf, out);
    if (loc->parsed()) return cmd_localize(lf, out);
    if (sweep->parsed()) return cmd_mse_sweep(sf, out);
    if (swarm->parsed()) return cmd_swarm(wf, out);
    if (theory->parsed()) return cmd_theory_check(grid, theory_out, out);
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << "\n";
    return usage;
  } catch (const OracleFailure& e) {
    err << "error: " << e.what() << "\n";
    return oracle;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return data;
  }
  return usage;
}

}  // namespace netmirror::cli
