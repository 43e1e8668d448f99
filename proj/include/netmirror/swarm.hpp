#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "netmirror/changepoint.hpp"
#include "netmirror/io.hpp"
#include "netmirror/metrics.hpp"
#include "netmirror/models.hpp"
#include "netmirror/rng.hpp"

namespace netmirror {

struct SwarmFrames {
  std::vector<long long> frames;           // ascending
  std::vector<std::string> agents;         // row order, first-appearance order in the first frame
  std::vector<Eigen::MatrixXd> positions;  // per frame, agents x 2
};

using FrameWindow = std::pair<long long, long long>;  // inclusive

// Rows frame,agent,x,y in any order. Throws DataError on duplicate
// (frame, agent) pairs or when a frame's agent set differs from the others.
SwarmFrames parse_swarm(const CsvTable& rows, std::optional<FrameWindow> window = std::nullopt);
SwarmFrames read_swarm_csv(const fs::path& file, std::optional<FrameWindow> window = std::nullopt);

// Bernoulli graphs from X X^T clamped to [0,1].
Tsg swarm_tsg(const SwarmFrames& frames, Rng& rng);

struct SwarmConfig {
  std::size_t d_ase = 2;
  std::size_t d_cmds = 2;
  std::size_t max_breaks = 20;
};

struct SwarmResult {
  Tsg tsg;
  DistanceMatrix distances;
  Eigen::VectorXd times;   // frame numbers
  Eigen::VectorXd mirror;  // iso-mirror
  SegmentedFit fit;
  std::vector<double> breakpoints;  // in frame units
};

SwarmResult swarm_pipeline(const SwarmFrames& frames, Rng& rng, const SwarmConfig& cfg = {});

}  // namespace netmirror
