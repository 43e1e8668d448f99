#include "netmirror/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "netmirror/errors.hpp"

namespace netmirror {

namespace {

constexpr char kMagic[8] = {'N', 'M', 'T', 'S', 'G', 0, 0, 0};
constexpr std::uint32_t kVersion = 1;

void put_u64(std::string& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}
  std::uint64_t u64() { return uint(8); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(uint(4)); }
  std::string bytes(std::size_t k) {
    need(k);
    std::string s = data_.substr(pos_, k);
    pos_ += k;
    return s;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t k) {
    if (data_.size() - pos_ < k) throw DataError("truncated TSG container");
  }
  std::uint64_t uint(int width) {
    need(width);
    std::uint64_t v = 0;
    for (int b = 0; b < width; ++b) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + b])) << (8 * b);
    pos_ += width;
    return v;
  }
  std::string data_;
  std::size_t pos_ = 0;
};

std::string time_file(std::size_t t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "edges_%04zu.csv", t);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  while (end && (*end == ' ' || *end == '\r' || *end == '\t')) ++end;
  if (end == begin || *end != '\0') throw DataError("not a number: '" + s + "'");
  return v;
}

void write_text(const fs::path& file, const std::string& text) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw DataError("cannot write " + file.string());
  out << text;
  if (!out) throw DataError("write failed: " + file.string());
}

std::string read_text(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CsvTable read_csv(const fs::path& path) {
  std::istringstream in(read_text(path));
  CsvTable rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(split(line));
  }
  return rows;
}

void write_edge_list(const Adjacency& A, const fs::path& file) {
  std::string out = "i,j\n";
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = i + 1; j < A.size(); ++j)
      if (A.edge(i, j)) out += std::to_string(i) + "," + std::to_string(j) + "\n";
  write_text(file, out);
}

Adjacency read_edge_list(const fs::path& file, std::size_t n) {
  CsvTable rows = read_csv(file);
  if (rows.empty() || rows[0].size() != 2 || rows[0][0] != "i" || rows[0][1] != "j")
    throw DataError(file.string() + ": expected header i,j");
  Adjacency A(n);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 2) throw DataError(file.string() + ": malformed row " + std::to_string(r + 1));
    const double a = parse_double(rows[r][0]), b = parse_double(rows[r][1]);
    if (a < 0 || b < 0 || a >= static_cast<double>(n) || b >= static_cast<double>(n) || a == b ||
        a != static_cast<double>(static_cast<std::size_t>(a)) || b != static_cast<double>(static_cast<std::size_t>(b)))
      throw DataError(file.string() + ": bad vertex pair on row " + std::to_string(r + 1));
    A.set_edge(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
  }
  return A;
}

nlohmann::json permutations_to_json(const std::vector<Permutation>& perms) {
  nlohmann::json j = nlohmann::json::array();
  for (const Permutation& p : perms) j.push_back(p);
  return j;
}

std::vector<Permutation> permutations_from_json(const nlohmann::json& j) {
  std::vector<Permutation> out;
  for (const auto& p : j) out.push_back(p.get<Permutation>());
  return out;
}

void write_tsg_binary(const Tsg& tsg, const fs::path& file) {
  std::string out(kMagic, sizeof kMagic);
  put_u32(out, kVersion);
  const std::size_t n = tsg.n(), m = tsg.m();
  put_u64(out, n);
  put_u64(out, m);
  const std::string params = tsg.params.dump();
  put_u64(out, params.size());
  out += params;
  const std::size_t pairs = n * (n ? n - 1 : 0) / 2;
  const std::size_t nbytes = (pairs + 7) / 8;
  for (const Adjacency& A : tsg.adjacency) {
    std::string bits(nbytes, '\0');
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j, ++k)
        if (A.edge(i, j)) bits[k >> 3] = static_cast<char>(bits[k >> 3] | (1 << (k & 7)));
    put_u64(out, nbytes);
    out += bits;
  }
  if (tsg.shuffles) {
    put_u64(out, 1);
    for (const Permutation& p : *tsg.shuffles)
      for (std::size_t v : p) put_u64(out, v);
  } else {
    put_u64(out, 0);
  }
  write_text(file, out);
}

Tsg read_tsg_binary(const fs::path& file) {
  Reader in(read_text(file));
  if (in.bytes(sizeof kMagic) != std::string(kMagic, sizeof kMagic)) throw DataError(file.string() + ": not a TSG container");
  if (in.u32() != kVersion) throw DataError(file.string() + ": unsupported container version");
  const std::size_t n = in.u64(), m = in.u64();
  Tsg tsg;
  const std::size_t plen = in.u64();
  try {
    tsg.params = nlohmann::json::parse(in.bytes(plen));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(file.string() + ": bad parameter block: " + e.what());
  }
  const std::size_t pairs = n * (n ? n - 1 : 0) / 2;
  for (std::size_t t = 0; t < m; ++t) {
    const std::size_t nbytes = in.u64();
    if (nbytes != (pairs + 7) / 8) throw DataError(file.string() + ": bitset length mismatch");
    const std::string bits = in.bytes(nbytes);
    Adjacency A(n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j, ++k)
        if ((static_cast<unsigned char>(bits[k >> 3]) >> (k & 7)) & 1) A.set_edge(i, j);
    tsg.adjacency.push_back(std::move(A));
  }
  if (in.u64()) {
    std::vector<Permutation> perms(m, Permutation(n));
    for (Permutation& p : perms)
      for (std::size_t& v : p) v = in.u64();
    for (const Permutation& p : perms)
      if (!is_permutation(p, n)) throw DataError(file.string() + ": stored shuffle is not a permutation");
    tsg.shuffles = std::move(perms);
  }
  if (!in.done()) throw DataError(file.string() + ": trailing bytes");
  return tsg;
}

nlohmann::json tsg_manifest(const Tsg& tsg, const TsgWriteOptions& opt) {
  nlohmann::json j;
  j["n"] = tsg.n();
  j["m"] = tsg.m();
  j["params"] = tsg.params;
  j["seed"] = opt.seed ? nlohmann::json(*opt.seed) : nlohmann::json(nullptr);
  if (tsg.shuffles) j["shuffles"] = permutations_to_json(*tsg.shuffles);
  j["container"] = "tsg.bin";
  nlohmann::json files = nlohmann::json::array();
  if (opt.edge_lists)
    for (std::size_t t = 1; t <= tsg.m(); ++t) files.push_back(time_file(t));
  j["files"] = files;
  return j;
}

void write_tsg(const Tsg& tsg, const fs::path& dir, const TsgWriteOptions& opt) {
  fs::create_directories(dir);
  write_tsg_binary(tsg, dir / "tsg.bin");
  if (opt.edge_lists)
    for (std::size_t t = 1; t <= tsg.m(); ++t) write_edge_list(tsg.adjacency[t - 1], dir / time_file(t));
  write_text(dir / "manifest.json", tsg_manifest(tsg, opt).dump(2) + "\n");
}

Tsg read_tsg(const fs::path& path) {
  if (!fs::exists(path)) throw DataError("no such file: " + path.string());
  fs::path manifest_path;
  if (fs::is_directory(path))
    manifest_path = path / "manifest.json";
  else if (path.extension() == ".json")
    manifest_path = path;
  else
    return read_tsg_binary(path);
  const fs::path dir = manifest_path.parent_path();
  nlohmann::json man;
  try {
    man = nlohmann::json::parse(read_text(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(manifest_path.string() + ": " + e.what());
  }
  Tsg tsg;
  if (man.contains("container") && fs::exists(dir / man["container"].get<std::string>())) {
    tsg = read_tsg_binary(dir / man["container"].get<std::string>());
  } else {
    const std::size_t n = man.at("n").get<std::size_t>();
    for (const auto& f : man.at("files")) tsg.adjacency.push_back(read_edge_list(dir / f.get<std::string>(), n));
    tsg.params = man.value("params", nlohmann::json::object());
    if (man.contains("shuffles")) tsg.shuffles = permutations_from_json(man["shuffles"]);
  }
  if (tsg.m() != man.value("m", tsg.m()) || tsg.n() != man.value("n", tsg.n()))
    throw DataError(manifest_path.string() + ": manifest disagrees with the stored graphs");
  return tsg;
}

void write_distance_csv(const DistanceMatrix& D, const fs::path& file) {
  const std::size_t m = D.size();
  std::string out;
  for (std::size_t t = 1; t <= m; ++t) out += (t > 1 ? "," : "") + std::to_string(t);
  out += "\n";
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) out += (j ? "," : "") + format_double(D.values(i, j));
    out += "\n";
  }
  write_text(file, out);
  nlohmann::json side = {{"metric", to_string(D.metric)}, {"squared", D.squared}, {"m", m}};
  write_text(fs::path(file.string() + ".json"), side.dump(2) + "\n");
}

DistanceMatrix read_distance_csv(const fs::path& file) {
  CsvTable rows = read_csv(file);
  if (rows.empty()) throw DataError(file.string() + ": empty distance matrix file");
  const std::size_t m = rows[0].size();
  if (rows.size() != m + 1) throw DataError(file.string() + ": expected " + std::to_string(m) + " data rows");
  DistanceMatrix D;
  D.values.resize(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    if (rows[i + 1].size() != m) throw DataError(file.string() + ": ragged row " + std::to_string(i + 2));
    for (std::size_t j = 0; j < m; ++j) D.values(i, j) = parse_double(rows[i + 1][j]);
  }
  const fs::path side(file.string() + ".json");
  if (fs::exists(side)) {
    nlohmann::json j = nlohmann::json::parse(read_text(side));
    D.metric = metric_from_string(j.at("metric").get<std::string>());
    D.squared = j.value("squared", false);
  }
  check_distance_matrix(D);
  return D;
}

void write_mirror_csv(const Mirror& mirror, const fs::path& file) {
  std::string out = "t";
  for (Eigen::Index c = 0; c < mirror.coords.cols(); ++c) out += ",psi_" + std::to_string(c + 1);
  out += "\n";
  for (Eigen::Index i = 0; i < mirror.coords.rows(); ++i) {
    out += format_double(mirror.times(i));
    for (Eigen::Index c = 0; c < mirror.coords.cols(); ++c) out += "," + format_double(mirror.coords(i, c));
    out += "\n";
  }
  write_text(file, out);
}

Mirror read_mirror_csv(const fs::path& file) {
  CsvTable rows = read_csv(file);
  if (rows.empty() || rows[0].empty() || rows[0][0] != "t") throw DataError(file.string() + ": expected a t column first");
  const std::size_t c = rows[0].size() - 1;
  if (c == 0) throw DataError(file.string() + ": no mirror columns");
  Mirror mir;
  mir.coords.resize(rows.size() - 1, c);
  mir.times.resize(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != c + 1) throw DataError(file.string() + ": ragged row " + std::to_string(r + 1));
    mir.times(r - 1) = parse_double(rows[r][0]);
    for (std::size_t k = 0; k < c; ++k) mir.coords(r - 1, k) = parse_double(rows[r][k + 1]);
  }
  return mir;
}

void write_iso_csv(const Eigen::VectorXd& times, const Eigen::VectorXd& psi, const fs::path& file) {
  if (times.size() != psi.size()) throw DomainError("time and mirror lengths differ");
  std::string out = "t,psi\n";
  for (Eigen::Index i = 0; i < psi.size(); ++i) out += format_double(times(i)) + "," + format_double(psi(i)) + "\n";
  write_text(file, out);
}

void write_matching_trace_csv(const std::vector<MatchResult>& matches, const fs::path& file) {
  std::string out = "match,iteration,objective\n";
  for (std::size_t k = 0; k < matches.size(); ++k)
    for (std::size_t it = 0; it < matches[k].relaxed_trace.size(); ++it)
      out += std::to_string(k + 1) + "," + std::to_string(it) + "," + format_double(matches[k].relaxed_trace[it]) + "\n";
  write_text(file, out);
}

}  // namespace netmirror
