#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "netmirror/matching.hpp"
#include "netmirror/metrics.hpp"
#include "netmirror/models.hpp"

namespace netmirror {

enum class ModelKind { london, atlanta };
enum class LocalizerKind { l2, linf };
// automatic: square root for the London degree profile, identity otherwise
enum class MirrorTransform { automatic, none, sqrt };

std::string to_string(ModelKind k);
std::string to_string(LocalizerKind k);
std::string to_string(MirrorTransform k);
ModelKind model_from_string(const std::string& s);
LocalizerKind localizer_from_string(const std::string& s);
MirrorTransform transform_from_string(const std::string& s);

// One analysis applied to each simulated replicate.
struct ExperimentRow {
  std::string label;
  MetricTag metric = MetricTag::dmv;
  Strategy strategy = Strategy::none;
  LocalizerKind localizer = LocalizerKind::l2;
  MirrorTransform transform = MirrorTransform::automatic;
  double alpha = 0.0;
  std::size_t d_cmds = 1;
  bool iso = false;  // Isomap on the d_cmds-dimensional CMDS output
  bool use_true_latents = false;
};

struct ExperimentSpec {
  ModelKind model = ModelKind::london;
  LondonParams london;
  AtlantaParams atlanta;
  ExperimentRow row;
  std::size_t d_ase = 1;
  std::size_t nmc = 100;
  std::uint64_t seed = 1;
  GmConfig gm;
  std::size_t threads = 0;  // 0: hardware concurrency

  std::size_t m() const { return model == ModelKind::london ? london.m : atlanta.m; }
  double t_star() const { return model == ModelKind::london ? london.t_star : atlanta.t_star; }
};

struct MseReport {
  std::string label;
  double mse = 0.0;
  double std = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double chance = 0.0;
  double t_star = 0.5;
  std::size_t nmc = 0;
  std::vector<double> estimates;  // NaN for failed replicates
  std::vector<std::string> failures;
};

// Summary statistics of (estimate - t_star)^2 over the finite estimates.
MseReport summarize(const std::vector<double>& estimates, double t_star, std::size_t m);

MseReport mse_experiment(const ExperimentSpec& spec);
// Every row is evaluated on the same simulated replicates.
std::vector<MseReport> mse_table(const ExperimentSpec& base, const std::vector<ExperimentRow>& rows);

// Localize each supplied mirror and summarize.
MseReport mse_from_mirrors(const std::vector<Eigen::VectorXd>& mirrors, double t_star, LocalizerKind localizer);

double localize(const Eigen::VectorXd& ts, const Eigen::VectorXd& ys, LocalizerKind localizer);

nlohmann::json to_json(const MseReport& r);
std::string csv_header();
std::string csv_row(const MseReport& r, double q, double alpha);

nlohmann::json to_json(const ExperimentSpec& spec);
// Fields missing from j keep the values already in spec.
void apply_json(ExperimentSpec& spec, const nlohmann::json& j);

}  // namespace netmirror
