#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "netmirror/matching.hpp"
#include "netmirror/mds.hpp"
#include "netmirror/metrics.hpp"
#include "netmirror/models.hpp"

namespace netmirror {

namespace fs = std::filesystem;

// %.17g, enough to round-trip any double.
std::string format_double(double v);

using CsvTable = std::vector<std::vector<std::string>>;
CsvTable read_csv(const fs::path& path);
double parse_double(const std::string& s);

// Directory layout: manifest.json, tsg.bin and optionally edges_<t>.csv files
// (upper-triangle "i,j" lists, 0-based).
struct TsgWriteOptions {
  bool edge_lists = false;
  std::optional<std::uint64_t> seed;
};

nlohmann::json tsg_manifest(const Tsg& tsg, const TsgWriteOptions& opt);
void write_tsg(const Tsg& tsg, const fs::path& dir, const TsgWriteOptions& opt = {});
// Accepts the directory, its manifest.json or a bare container file.
Tsg read_tsg(const fs::path& path);

void write_tsg_binary(const Tsg& tsg, const fs::path& file);
Tsg read_tsg_binary(const fs::path& file);

void write_edge_list(const Adjacency& A, const fs::path& file);
Adjacency read_edge_list(const fs::path& file, std::size_t n);

// Grid with a header row of time indices 1..m, plus <file>.json holding the metric tag.
void write_distance_csv(const DistanceMatrix& D, const fs::path& file);
DistanceMatrix read_distance_csv(const fs::path& file);

// Columns t, psi_1..psi_c.
void write_mirror_csv(const Mirror& mirror, const fs::path& file);
Mirror read_mirror_csv(const fs::path& file);
// Columns t, psi.
void write_iso_csv(const Eigen::VectorXd& times, const Eigen::VectorXd& psi, const fs::path& file);

nlohmann::json permutations_to_json(const std::vector<Permutation>& perms);
std::vector<Permutation> permutations_from_json(const nlohmann::json& j);

// match,iteration,objective
void write_matching_trace_csv(const std::vector<MatchResult>& matches, const fs::path& file);

void write_text(const fs::path& file, const std::string& text);
std::string read_text(const fs::path& file);

}  // namespace netmirror
