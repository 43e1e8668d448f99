#include "netmirror/swarm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "netmirror/errors.hpp"
#include "netmirror/mds.hpp"

namespace netmirror {

namespace {

long long parse_frame(const std::string& s, std::size_t line) {
  const double v = parse_double(s);
  if (!std::isfinite(v) || v != std::floor(v) || v < 0)
    throw DataError("swarm line " + std::to_string(line) + ": frame must be a nonnegative integer");
  return static_cast<long long>(v);
}

}  // namespace

SwarmFrames parse_swarm(const CsvTable& rows, std::optional<FrameWindow> window) {
  if (rows.empty() || rows[0] != std::vector<std::string>{"frame", "agent", "x", "y"})
    throw DataError("swarm input must start with the header frame,agent,x,y");
  std::map<long long, std::map<std::string, std::pair<double, double>>> table;
  std::vector<std::string> first_order;
  long long first_frame = -1;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::size_t line = r + 1;
    if (rows[r].size() != 4) throw DataError("swarm line " + std::to_string(line) + ": expected 4 fields");
    const long long f = parse_frame(rows[r][0], line);
    if (window && (f < window->first || f > window->second)) continue;
    const std::string& agent = rows[r][1];
    const double x = parse_double(rows[r][2]), y = parse_double(rows[r][3]);
    if (!std::isfinite(x) || !std::isfinite(y)) throw DataError("swarm line " + std::to_string(line) + ": non-finite coordinate");
    auto& frame = table[f];
    if (!frame.emplace(agent, std::make_pair(x, y)).second)
      throw DataError("swarm line " + std::to_string(line) + ": duplicate agent '" + agent + "' in frame " +
                      std::to_string(f));
    if (first_frame < 0 || f < first_frame) {
      first_frame = f;
      first_order.clear();
    }
    if (f == first_frame) first_order.push_back(agent);
  }
  if (table.empty()) throw DataError("no swarm frames in the requested window");

  const std::set<std::string> reference(first_order.begin(), first_order.end());
  std::vector<long long> bad;
  for (const auto& [f, agents] : table) {
    if (agents.size() != reference.size()) {
      bad.push_back(f);
      continue;
    }
    for (const auto& [name, xy] : agents)
      if (!reference.count(name)) {
        bad.push_back(f);
        break;
      }
  }
  if (!bad.empty()) {
    std::string msg = "agent set differs from frame " + std::to_string(first_frame) + " in frames:";
    for (std::size_t k = 0; k < bad.size() && k < 50; ++k) msg += " " + std::to_string(bad[k]);
    if (bad.size() > 50) msg += " ... (" + std::to_string(bad.size()) + " total)";
    throw DataError(msg);
  }

  SwarmFrames out;
  out.agents = first_order;
  for (const auto& [f, agents] : table) {
    Eigen::MatrixXd X(out.agents.size(), 2);
    for (std::size_t i = 0; i < out.agents.size(); ++i) {
      const auto& xy = agents.at(out.agents[i]);
      X(i, 0) = xy.first;
      X(i, 1) = xy.second;
    }
    out.frames.push_back(f);
    out.positions.push_back(std::move(X));
  }
  return out;
}

SwarmFrames read_swarm_csv(const fs::path& file, std::optional<FrameWindow> window) {
  return parse_swarm(read_csv(file), window);
}

Tsg swarm_tsg(const SwarmFrames& frames, Rng& rng) {
  Tsg tsg;
  for (const Eigen::MatrixXd& X : frames.positions) {
    Rng sub(rng());
    tsg.adjacency.push_back(sample_rdpg(X, sub, true));
  }
  tsg.params = {{"source", "swarm"}, {"first_frame", frames.frames.front()}, {"last_frame", frames.frames.back()}};
  return tsg;
}

SwarmResult swarm_pipeline(const SwarmFrames& frames, Rng& rng, const SwarmConfig& cfg) {
  SwarmResult res;
  res.tsg = swarm_tsg(frames, rng);
  MetricConfig mc;
  mc.metric = MetricTag::dmv;
  mc.d_ase = cfg.d_ase;
  res.distances = distance_matrix(res.tsg, mc);
  res.mirror = iso_mirror(res.distances, std::min(cfg.d_cmds, std::max<std::size_t>(1, frames.frames.size() - 1)));
  res.times.resize(frames.frames.size());
  for (std::size_t i = 0; i < frames.frames.size(); ++i) res.times(i) = static_cast<double>(frames.frames[i]);
  res.fit = segmented_bic(res.times, res.mirror, cfg.max_breaks);
  res.breakpoints = res.fit.breaks;
  return res;
}

}  // namespace netmirror
