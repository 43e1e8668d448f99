#include <chrono>
#include <cmath>
#include <functional>

#include "doctest.h"
#include "netmirror/errors.hpp"
#include "netmirror/swarm.hpp"

using namespace netmirror;

namespace {

CsvTable table_from(const std::vector<long long>& frames, std::size_t agents,
                    const std::function<std::pair<double, double>(long long, std::size_t)>& pos) {
  CsvTable t{{"frame", "agent", "x", "y"}};
  for (long long f : frames)
    for (std::size_t a = 0; a < agents; ++a) {
      const auto [x, y] = pos(f, a);
      t.push_back({std::to_string(f), "a" + std::to_string(a), format_double(x), format_double(y)});
    }
  return t;
}

std::vector<long long> frame_range(long long a, long long b) {
  std::vector<long long> out;
  for (long long f = a; f <= b; ++f) out.push_back(f);
  return out;
}

}  // namespace

TEST_CASE("parsing swarm tables") {
  CsvTable t{{"frame", "agent", "x", "y"}, {"2", "b", "0.5", "0.1"}, {"1", "a", "1", "2"},
             {"1", "b", "3", "4"},        {"2", "a", "0.25", "0"}};
  const SwarmFrames s = parse_swarm(t);
  CHECK(s.frames == std::vector<long long>{1, 2});
  REQUIRE(s.agents.size() == 2);
  CHECK(s.agents[0] == "a");
  CHECK(s.positions[0](1, 1) == 4.0);
  CHECK(s.positions[1](0, 0) == 0.25);
  CHECK(s.positions[1](1, 0) == 0.5);

  const SwarmFrames w = parse_swarm(t, FrameWindow{2, 5});
  CHECK(w.frames == std::vector<long long>{2});

  CsvTable dup = t;
  dup.push_back({"1", "a", "0", "0"});
  CHECK_THROWS_AS(parse_swarm(dup), DataError);

  CsvTable ragged = t;
  ragged.push_back({"3", "a", "0", "0"});
  try {
    parse_swarm(ragged);
    FAIL("ragged table accepted");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find('3') != std::string::npos);
  }

  CsvTable header = t;
  header[0][2] = "px";
  CHECK_THROWS_AS(parse_swarm(header), DataError);
  CsvTable junk = t;
  junk[2][2] = "one";
  CHECK_THROWS_AS(parse_swarm(junk), DataError);
}

TEST_CASE("graphs use clamped inner products") {
  // inner products 2 (clamped to 1) and -1 (clamped to 0)
  const CsvTable t = table_from({0}, 4, [](long long, std::size_t a) {
    return a < 2 ? std::make_pair(1.0, 1.0) : std::make_pair(-1.0, 0.0);
  });
  Rng rng(31);
  const Tsg g = swarm_tsg(parse_swarm(t), rng);
  REQUIRE(g.m() == 1);
  CHECK(g.adjacency[0].edge(0, 1));
  CHECK(g.adjacency[0].edge(2, 3));
  CHECK(!g.adjacency[0].edge(0, 2));
  CHECK(!g.adjacency[0].edge(1, 3));
}

TEST_CASE("agents at the origin give a flat mirror") {
  const CsvTable t = table_from(frame_range(1, 12), 20, [](long long, std::size_t) { return std::make_pair(0.0, 0.0); });
  Rng rng(32);
  const SwarmResult r = swarm_pipeline(parse_swarm(t), rng);
  for (const Adjacency& A : r.tsg.adjacency) CHECK(A.edge_count() == 0);
  CHECK(r.mirror.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(r.breakpoints.empty());
}

TEST_CASE("two fixed clusters show no structural change") {
  const CsvTable t = table_from(frame_range(100, 139), 60, [](long long, std::size_t a) {
    return a % 2 ? std::make_pair(0.9, 0.2) : std::make_pair(0.2, 0.9);
  });
  Rng rng(33);
  const SwarmResult r = swarm_pipeline(parse_swarm(t), rng);
  CHECK(r.tsg.m() == 40);
  CHECK(r.times(0) == 100.0);
  CHECK(r.mirror.size() == 40);
  CHECK(r.breakpoints.empty());
}

TEST_CASE("a block structure that splits halfway is detected") {
  const CsvTable t = table_from(frame_range(1, 60), 60, [](long long f, std::size_t a) {
    const double s = f <= 30 ? 0.0 : std::min(1.0, (f - 30) / 10.0);
    return a % 2 ? std::make_pair(0.75 + 0.2 * s, 0.2 - 0.2 * s) : std::make_pair(0.75 - 0.55 * s, 0.2 + 0.7 * s);
  });
  Rng rng(34);
  const SwarmResult r = swarm_pipeline(parse_swarm(t), rng);
  REQUIRE(!r.breakpoints.empty());
  MESSAGE("breaks: " << r.breakpoints.size() << ", first " << r.breakpoints.front());
  bool near = false;
  for (double b : r.breakpoints) near = near || std::abs(b - 30.0) <= 4.0;
  CHECK(near);
}

TEST_CASE("long windows are processed end to end") {
  const CsvTable t = table_from(frame_range(780, 1180), 100, [](long long f, std::size_t a) {
    const double phase = 0.01 * static_cast<double>(f) + 0.0628 * static_cast<double>(a);
    return std::make_pair(0.5 + 0.3 * std::cos(phase), 0.5 + 0.3 * std::sin(phase));
  });
  const auto start = std::chrono::steady_clock::now();
  Rng rng(35);
  const SwarmResult r = swarm_pipeline(parse_swarm(t), rng);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  MESSAGE("m=401, n=100 pipeline: " << secs << " s");
  CHECK(r.tsg.m() == 401);
  CHECK(r.tsg.n() == 100);
  CHECK(r.distances.size() == 401);
  CHECK(r.mirror.allFinite());
  CHECK(r.fit.exact);
  for (double b : r.breakpoints) {
    CHECK(b > 780.0);
    CHECK(b < 1180.0);
  }
}
