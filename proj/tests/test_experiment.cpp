#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "netmirror/errors.hpp"
#include "netmirror/experiment.hpp"
#include "netmirror/mds.hpp"
#include "netmirror/theory.hpp"

using namespace netmirror;

TEST_CASE("name conversions") {
  for (ModelKind k : {ModelKind::london, ModelKind::atlanta}) CHECK(model_from_string(to_string(k)) == k);
  for (LocalizerKind k : {LocalizerKind::l2, LocalizerKind::linf}) CHECK(localizer_from_string(to_string(k)) == k);
  for (MirrorTransform k : {MirrorTransform::automatic, MirrorTransform::none, MirrorTransform::sqrt})
    CHECK(transform_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(model_from_string("paris"), ParameterError);
  CHECK_THROWS_AS(localizer_from_string("l3"), ParameterError);
  CHECK_THROWS_AS(transform_from_string("log"), ParameterError);
}

TEST_CASE("summary statistics by hand") {
  const MseReport r = summarize({0.4, 0.5, 0.7, std::nan("")}, 0.5, 10);
  // squared errors 0.01, 0, 0.04
  CHECK(r.nmc == 3);
  CHECK(r.mse == doctest::Approx(0.05 / 3));
  const double mean = 0.05 / 3;
  const double var = ((0.01 - mean) * (0.01 - mean) + mean * mean + (0.04 - mean) * (0.04 - mean)) / 2.0;
  CHECK(r.std == doctest::Approx(std::sqrt(var)));
  CHECK(r.ci_high - r.mse == doctest::Approx(1.96 * r.std / std::sqrt(3.0)));
  CHECK(r.mse - r.ci_low == doctest::Approx(1.96 * r.std / std::sqrt(3.0)));
  CHECK(r.chance == doctest::Approx(chance_mse(10, 0.5)));
  CHECK(r.estimates.size() == 4);

  CHECK(std::isnan(summarize({0.5}, 0.5, 3).chance));
  const MseReport one = summarize({0.5}, 0.5, 20);
  CHECK(one.mse == 0.0);
  CHECK(one.std == 0.0);
  CHECK(std::isnan(summarize({std::nan("")}, 0.5, 20).mse));
}

TEST_CASE("confidence interval brackets the mse") {
  Rng rng(21);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> est;
    const std::size_t k = 1 + uniform_index(rng, 30);
    for (std::size_t i = 0; i < k; ++i) est.push_back((2.0 + uniform_index(rng, 18)) / 20.0);
    const MseReport r = summarize(est, 0.5, 20);
    CHECK(r.ci_low <= r.mse);
    CHECK(r.mse <= r.ci_high);
  }
}

TEST_CASE("analytic mirrors give zero error") {
  const Eigen::VectorXd psi = psi_z_target(20, 0.2, 0.8, 0.5).values;
  const MseReport r = mse_from_mirrors({psi}, 0.5, LocalizerKind::l2);
  CHECK(r.mse == 0.0);
  CHECK(mse_from_mirrors({psi, -psi}, 0.5, LocalizerKind::linf).mse == 0.0);
}

namespace {

ExperimentSpec small_london() {
  ExperimentSpec s;
  s.model = ModelKind::london;
  s.london = LondonParams::simulation(60, 12, 0.4, 0.1);
  s.nmc = 6;
  s.seed = 99;
  s.threads = 1;
  return s;
}

}  // namespace

TEST_CASE("rows are independent of their company and of the thread count") {
  ExperimentSpec base = small_london();
  std::vector<ExperimentRow> rows(3);
  rows[0].label = "deg";
  rows[0].metric = MetricTag::avg_degree;
  rows[1].label = "dmv shuffled";
  rows[1].metric = MetricTag::dmv;
  rows[1].alpha = 0.5;
  rows[2].label = "w1 matched";
  rows[2].metric = MetricTag::w1;
  rows[2].alpha = 0.5;
  rows[2].strategy = Strategy::consecutive;
  const std::vector<MseReport> table = mse_table(base, rows);
  REQUIRE(table.size() == 3);

  for (std::size_t r = 0; r < rows.size(); ++r) {
    ExperimentSpec alone = base;
    alone.row = rows[r];
    const MseReport single = mse_experiment(alone);
    CHECK(single.label == rows[r].label);
    CHECK(single.estimates == table[r].estimates);
  }

  base.threads = 3;
  const std::vector<MseReport> threaded = mse_table(base, rows);
  for (std::size_t r = 0; r < rows.size(); ++r) CHECK(threaded[r].estimates == table[r].estimates);

  for (const MseReport& rep : table) {
    CHECK(rep.failures.empty());
    for (double e : rep.estimates) {
      const double k = e * 12.0;
      CHECK(std::abs(k - std::round(k)) < 1e-12);
      CHECK(k >= 2.0 - 1e-12);
      CHECK(k <= 11.0 + 1e-12);
    }
  }
}

TEST_CASE("replicate failures are recorded") {
  ExperimentSpec s = small_london();
  s.row.metric = MetricTag::dmv;
  s.row.transform = MirrorTransform::sqrt;
  const MseReport r = mse_experiment(s);
  CHECK(r.nmc == 0);
  CHECK(std::isnan(r.mse));
  REQUIRE(r.failures.size() == s.nmc);
  CHECK(r.failures[0].rfind("replicate 0:", 0) == 0);

  ExperimentSpec bad = small_london();
  bad.row.alpha = 1.5;
  CHECK_THROWS_AS(mse_experiment(bad), ParameterError);
  bad = small_london();
  bad.nmc = 0;
  CHECK_THROWS_AS(mse_experiment(bad), ParameterError);
}

TEST_CASE("degree mirror beats chance on an easy London model") {
  ExperimentSpec s;
  s.model = ModelKind::london;
  s.london = LondonParams::simulation(200, 20, 0.5, 0.05);
  s.row.metric = MetricTag::avg_degree;
  s.nmc = 30;
  s.seed = 5;
  const MseReport r = mse_experiment(s);
  CHECK(r.mse < r.chance);
  CHECK(r.chance == doctest::Approx(0.0679167).epsilon(1e-5));
}

TEST_CASE("spec json") {
  ExperimentSpec s = small_london();
  s.row.metric = MetricTag::w2;
  s.row.strategy = Strategy::pairwise;
  s.row.localizer = LocalizerKind::linf;
  s.row.alpha = 0.25;
  s.gm.restarts = 4;
  ExperimentSpec back;
  apply_json(back, to_json(s));
  CHECK(to_json(back) == to_json(s));
  CHECK(back.london.m == 12);
  CHECK(back.row.strategy == Strategy::pairwise);
  CHECK(back.gm.restarts == 4);

  ExperimentSpec patched = small_london();
  apply_json(patched, nlohmann::json{{"params", {{"m", 24}}}});
  CHECK(patched.london.m == 24);
  CHECK(patched.london.delta_m * 24 == doctest::Approx(0.9));
  CHECK(patched.london.n == 60);

  ExperimentSpec at;
  apply_json(at, nlohmann::json::parse(R"({"model":"atlanta","params":{"N":30,"q":0.1},"nmc":3})"));
  CHECK(at.model == ModelKind::atlanta);
  CHECK(at.atlanta.N == 30);
  CHECK(at.atlanta.q == 0.1);
  CHECK(at.nmc == 3);
  CHECK_THROWS(apply_json(at, nlohmann::json{{"metric", "cosine"}}));
}

TEST_CASE("report serialization") {
  MseReport r = summarize({0.5, std::nan(""), 0.45}, 0.5, 20);
  r.label = "x";
  const nlohmann::json j = to_json(r);
  CHECK(j.at("estimates")[1].is_null());
  CHECK(j.at("label") == "x");
  const std::string row = csv_row(r, 0.3, 0.0);
  const std::string header = csv_header();
  CHECK(std::count(row.begin(), row.end(), ',') == std::count(header.begin(), header.end(), ','));
  CHECK(row.rfind("x,", 0) == 0);
}
