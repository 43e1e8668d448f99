#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "netmirror/errors.hpp"
#include "netmirror/io.hpp"

using namespace netmirror;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("netmirror_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Tsg small_tsg(Rng& rng, std::size_t n, std::size_t m) {
  LatentPaths paths;
  paths.values = testutil::random_matrix(rng, n, m + 1, 0.0, 1.0);
  Tsg tsg = generate_tsg(paths, rng);
  tsg.params = {{"model", "custom"}, {"n", n}};
  return tsg;
}

}  // namespace

TEST_CASE("container round trip, with and without shuffles") {
  Rng rng(1);
  const fs::path dir = scratch("bin");
  for (std::size_t n : {1, 2, 9, 64, 65, 130}) {
    Tsg tsg = small_tsg(rng, n, 4);
    write_tsg_binary(tsg, dir / "a.bin");
    const Tsg back = read_tsg_binary(dir / "a.bin");
    REQUIRE(back.m() == 4);
    for (std::size_t t = 0; t < 4; ++t) CHECK(back.adjacency[t] == tsg.adjacency[t]);
    CHECK_FALSE(back.shuffles.has_value());
    CHECK(back.params == tsg.params);

    const Tsg sh = alpha_shuffle_tsg(tsg, 1.0, rng);
    write_tsg_binary(sh, dir / "b.bin");
    const Tsg back2 = read_tsg_binary(dir / "b.bin");
    REQUIRE(back2.shuffles.has_value());
    CHECK(*back2.shuffles == *sh.shuffles);
  }
}

TEST_CASE("corrupt containers are data errors") {
  Rng rng(2);
  const fs::path dir = scratch("corrupt");
  write_tsg_binary(small_tsg(rng, 10, 3), dir / "ok.bin");
  std::string bytes = read_text(dir / "ok.bin");
  write_text(dir / "short.bin", bytes.substr(0, bytes.size() - 5));
  CHECK_THROWS_AS(read_tsg_binary(dir / "short.bin"), DataError);
  write_text(dir / "magic.bin", "XX" + bytes.substr(2));
  CHECK_THROWS_AS(read_tsg_binary(dir / "magic.bin"), DataError);
  write_text(dir / "long.bin", bytes + "z");
  CHECK_THROWS_AS(read_tsg_binary(dir / "long.bin"), DataError);
  CHECK_THROWS_AS(read_tsg(dir / "missing"), DataError);
}

TEST_CASE("directory layout with edge lists") {
  Rng rng(3);
  const fs::path dir = scratch("dir");
  const Tsg tsg = alpha_shuffle_tsg(small_tsg(rng, 12, 3), 0.5, rng);
  TsgWriteOptions opt;
  opt.edge_lists = true;
  opt.seed = 42;
  write_tsg(tsg, dir, opt);
  const nlohmann::json man = nlohmann::json::parse(read_text(dir / "manifest.json"));
  CHECK(man["n"] == 12);
  CHECK(man["m"] == 3);
  CHECK(man["seed"] == 42);
  CHECK(man["files"].size() == 3);
  CHECK(man.contains("shuffles"));

  const Tsg a = read_tsg(dir), b = read_tsg(dir / "manifest.json"), c = read_tsg(dir / "tsg.bin");
  for (std::size_t t = 0; t < 3; ++t) {
    CHECK(a.adjacency[t] == tsg.adjacency[t]);
    CHECK(b.adjacency[t] == tsg.adjacency[t]);
    CHECK(c.adjacency[t] == tsg.adjacency[t]);
    CHECK(read_edge_list(dir / man["files"][t].get<std::string>(), 12) == tsg.adjacency[t]);
  }

  // the CSV files alone are enough
  fs::remove(dir / "tsg.bin");
  const Tsg d = read_tsg(dir);
  for (std::size_t t = 0; t < 3; ++t) CHECK(d.adjacency[t] == tsg.adjacency[t]);
  CHECK(*d.shuffles == *tsg.shuffles);
}

TEST_CASE("edge list validation") {
  const fs::path dir = scratch("edges");
  write_text(dir / "bad_header.csv", "a,b\n0,1\n");
  CHECK_THROWS_AS(read_edge_list(dir / "bad_header.csv", 3), DataError);
  write_text(dir / "loop.csv", "i,j\n1,1\n");
  CHECK_THROWS_AS(read_edge_list(dir / "loop.csv", 3), DataError);
  write_text(dir / "range.csv", "i,j\n0,3\n");
  CHECK_THROWS_AS(read_edge_list(dir / "range.csv", 3), DataError);
  write_text(dir / "ok.csv", "i,j\r\n0,2\r\n");
  const Adjacency A = read_edge_list(dir / "ok.csv", 3);
  CHECK(A.edge(2, 0));
  CHECK(A.edge_count() == 1);
}

TEST_CASE("distance matrix CSV is lossless") {
  Rng rng(4);
  const fs::path dir = scratch("dist");
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t m = 1 + uniform_index(rng, 12);
    Eigen::MatrixXd V = testutil::random_matrix(rng, m, m, 0.0, 1e3 * uniform01(rng));
    V = (V + V.transpose()).eval();
    V.diagonal().setZero();
    DistanceMatrix D;
    D.values = V;
    D.metric = rep % 2 ? MetricTag::w2 : MetricTag::dmv_sq;
    D.squared = rep % 2 == 0;
    write_distance_csv(D, dir / "d.csv");
    const DistanceMatrix back = read_distance_csv(dir / "d.csv");
    CHECK(back.values == D.values);
    CHECK(back.metric == D.metric);
    CHECK(back.squared == D.squared);
  }
  CHECK(read_csv(dir / "d.csv")[0][0] == "1");
}

TEST_CASE("mirror CSV is lossless") {
  Rng rng(5);
  const fs::path dir = scratch("mirror");
  Mirror mir;
  mir.coords = testutil::random_matrix(rng, 17, 3);
  mir.coords(0, 0) = 1.0 / 3.0;
  mir.coords(1, 1) = -5e-300;
  mir.times = testutil::random_matrix(rng, 17, 1).col(0);
  write_mirror_csv(mir, dir / "m.csv");
  const CsvTable rows = read_csv(dir / "m.csv");
  CHECK(rows[0] == std::vector<std::string>{"t", "psi_1", "psi_2", "psi_3"});
  const Mirror back = read_mirror_csv(dir / "m.csv");
  CHECK(back.coords == mir.coords);
  CHECK(back.times == mir.times);

  write_iso_csv(mir.times, mir.coords.col(2), dir / "iso.csv");
  CHECK(read_csv(dir / "iso.csv")[0] == std::vector<std::string>{"t", "psi"});
  const Mirror iso = read_mirror_csv(dir / "iso.csv");
  CHECK(iso.coords.col(0) == mir.coords.col(2));
}

TEST_CASE("format_double round trips") {
  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    const double v = standard_normal(rng) * std::pow(10.0, static_cast<int>(uniform_index(rng, 40)) - 20);
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK_THROWS_AS(parse_double("1.5x"), DataError);
  CHECK_THROWS_AS(parse_double(""), DataError);
}

TEST_CASE("permutation JSON") {
  const std::vector<Permutation> perms{{2, 0, 1}, {0, 1, 2}};
  const nlohmann::json j = permutations_to_json(perms);
  CHECK(j.dump() == "[[2,0,1],[0,1,2]]");
  CHECK(permutations_from_json(j) == perms);
}

TEST_CASE("matching trace CSV") {
  const fs::path dir = scratch("trace");
  MatchResult a, b;
  a.relaxed_trace = {1.0, 2.5};
  b.relaxed_trace = {3.0};
  write_matching_trace_csv({a, b}, dir / "t.csv");
  const CsvTable rows = read_csv(dir / "t.csv");
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == std::vector<std::string>{"match", "iteration", "objective"});
  CHECK(rows[2] == std::vector<std::string>{"1", "1", "2.5"});
  CHECK(rows[3] == std::vector<std::string>{"2", "0", "3"});
}
