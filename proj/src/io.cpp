#include "dotrecon/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "dotrecon/errors.hpp"

namespace dotrecon {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

void write_measurements(const MeasurementSet& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  const int p = data.mask.pair_count();
  const bool modulated = data.omega_over_c != 0.0;
  if (data.values.size() != data.mask.entry_count(data.omega_over_c))
    throw IoError("write_measurements: inconsistent measurement set");

  char hash[24];
  std::snprintf(hash, sizeof hash, "%016" PRIx64, data.layout_hash);
  out << "#omega_over_c=" << fmt17(data.omega_over_c) << "\n";
  out << "#K=" << data.num_sources << " #J=" << data.num_sensors << "\n";
  out << "#layout_hash=" << hash << "\n";
  out << "#sim_nodes=" << data.sim_node_count << "\n";
  for (int i = 0; i < p; ++i) {
    const auto& [k, j] = data.mask.pairs[i];
    const double re = data.values[i];
    const double im = modulated ? data.values[p + i] : 0.0;
    const double sig_re = std::sqrt(data.gamma_diag[i]);
    const double sig_im = modulated ? std::sqrt(data.gamma_diag[p + i]) : 0.0;
    out << k << ' ' << j << ' ' << fmt17(re) << ' ' << fmt17(im) << ' '
        << fmt17(sig_re) << ' ' << fmt17(sig_im) << "\n";
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

namespace {

// Parses '#key=value' tokens; headers may carry several per line.
void parse_header_tokens(const std::string& line,
                         std::map<std::string, std::string>& headers) {
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) {
    if (tok.size() < 2 || tok[0] != '#') continue;
    const auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    headers[tok.substr(1, eq - 1)] = tok.substr(eq + 1);
  }
}

}  // namespace

MeasurementSet read_measurements(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open measurement file '" + path + "'");

  std::map<std::string, std::string> headers;
  struct Line {
    int k, j;
    double re, im, sig_re, sig_im;
  };
  std::vector<Line> lines;
  std::string raw;
  while (std::getline(in, raw)) {
    if (raw.empty()) continue;
    if (raw[0] == '#') {
      parse_header_tokens(raw, headers);
      continue;
    }
    std::istringstream ss(raw);
    Line l{};
    if (!(ss >> l.k >> l.j >> l.re >> l.im >> l.sig_re >> l.sig_im))
      throw IoError("measurement file: malformed data line '" + raw + "'");
    lines.push_back(l);
  }
  for (const char* key : {"omega_over_c", "K", "J", "layout_hash"})
    if (!headers.count(key))
      throw IoError(std::string("measurement file: missing header #") + key);

  MeasurementSet data;
  data.omega_over_c = std::stod(headers["omega_over_c"]);
  data.num_sources = std::stoi(headers["K"]);
  data.num_sensors = std::stoi(headers["J"]);
  data.layout_hash = std::stoull(headers["layout_hash"], nullptr, 16);
  if (headers.count("sim_nodes"))
    data.sim_node_count = std::stoull(headers["sim_nodes"]);

  const int p = static_cast<int>(lines.size());
  if (p == 0) throw IoError("measurement file: no data lines");
  const bool modulated = data.omega_over_c != 0.0;
  data.values.resize(modulated ? 2 * p : p);
  data.gamma_diag.resize(data.values.size());
  for (int i = 0; i < p; ++i) {
    const Line& l = lines[i];
    if (l.k < 0 || l.k >= data.num_sources || l.j < 0 || l.j >= data.num_sensors)
      throw IoError("measurement file: pair indices outside K x J");
    data.mask.pairs.emplace_back(l.k, l.j);
    data.values[i] = l.re;
    if (!(l.sig_re > 0.0))
      throw IoError("measurement file: nonpositive sigma_Re");
    data.gamma_diag[i] = l.sig_re * l.sig_re;
    if (modulated) {
      data.values[p + i] = l.im;
      if (!(l.sig_im > 0.0))
        throw IoError("measurement file: nonpositive sigma_Im");
      data.gamma_diag[p + i] = l.sig_im * l.sig_im;
    }
  }
  return data;
}

void write_solution(const Solution& solution, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  if (solution.kappa.size() != solution.mu.size())
    throw IoError("write_solution: field lengths differ");
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016" PRIx64, solution.mesh_hash);
  out << "#mesh_hash=" << hash << "\n";
  out << "#nodes=" << solution.kappa.size() << "\n";
  out << "#kappa0=" << fmt17(solution.kappa0) << " #mu0=" << fmt17(solution.mu0)
      << "\n";
  for (Eigen::Index i = 0; i < solution.kappa.size(); ++i)
    out << fmt17(solution.kappa[i]) << ' ' << fmt17(solution.mu[i]) << "\n";
  if (!out) throw IoError("write failed for '" + path + "'");
}

Solution read_solution(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open solution file '" + path + "'");
  std::map<std::string, std::string> headers;
  std::vector<std::pair<double, double>> rows;
  std::string raw;
  while (std::getline(in, raw)) {
    if (raw.empty()) continue;
    if (raw[0] == '#') {
      parse_header_tokens(raw, headers);
      continue;
    }
    std::istringstream ss(raw);
    double k, m;
    if (!(ss >> k >> m))
      throw IoError("solution file: malformed data line '" + raw + "'");
    rows.emplace_back(k, m);
  }
  for (const char* key : {"mesh_hash", "nodes", "kappa0", "mu0"})
    if (!headers.count(key))
      throw IoError(std::string("solution file: missing header #") + key);

  Solution s;
  s.mesh_hash = std::stoull(headers["mesh_hash"], nullptr, 16);
  s.kappa0 = std::stod(headers["kappa0"]);
  s.mu0 = std::stod(headers["mu0"]);
  const std::size_t n = std::stoull(headers["nodes"]);
  if (rows.size() != n)
    throw IoError("solution file: node count does not match data lines");
  s.kappa.resize(n);
  s.mu.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.kappa[i] = rows[i].first;
    s.mu[i] = rows[i].second;
  }
  return s;
}

void write_vtk(const Mesh& mesh, const Eigen::VectorXd& kappa,
               const Eigen::VectorXd& mu, const std::string& path) {
  if (kappa.size() != mesh.node_count() || mu.size() != mesh.node_count())
    throw IoError("write_vtk: field lengths do not match mesh nodes");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "# vtk DataFile Version 3.0\n";
  out << "absorption and diffusivity\n";
  out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.node_count() << " double\n";
  for (const auto& v : mesh.vertices)
    out << fmt9(v.x()) << ' ' << fmt9(v.y()) << ' ' << fmt9(v.z()) << "\n";
  out << "CELLS " << mesh.tet_count() << ' ' << 5 * mesh.tet_count() << "\n";
  for (const auto& t : mesh.tets)
    out << "4 " << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << "\n";
  out << "CELL_TYPES " << mesh.tet_count() << "\n";
  for (int i = 0; i < mesh.tet_count(); ++i) out << "10\n";
  out << "POINT_DATA " << mesh.node_count() << "\n";
  out << "SCALARS absorption double 1\nLOOKUP_TABLE default\n";
  for (Eigen::Index i = 0; i < mu.size(); ++i) out << fmt9(mu[i]) << "\n";
  out << "SCALARS diffusivity double 1\nLOOKUP_TABLE default\n";
  for (Eigen::Index i = 0; i < kappa.size(); ++i) out << fmt9(kappa[i]) << "\n";
  if (!out) throw IoError("write failed for '" + path + "'");
}

void read_vtk_fields(const std::string& path, Eigen::VectorXd* kappa,
                     Eigen::VectorXd* mu) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open VTK file '" + path + "'");
  std::string tok;
  Eigen::Index n = 0;
  while (in >> tok) {
    if (tok == "POINT_DATA") {
      in >> n;
      break;
    }
  }
  if (n == 0) throw IoError("VTK file: no POINT_DATA section");
  auto read_scalars = [&](const std::string& wanted, Eigen::VectorXd* out_vec) {
    std::string name, type;
    int comps;
    // at 'SCALARS' marker
    in >> name >> type >> comps;
    std::string lut, lut_name;
    in >> lut >> lut_name;
    if (name != wanted)
      throw IoError("VTK file: expected scalars '" + wanted + "', found '" + name + "'");
    out_vec->resize(n);
    for (Eigen::Index i = 0; i < n; ++i) in >> (*out_vec)[i];
    if (!in) throw IoError("VTK file: truncated scalar data");
  };
  in >> tok;  // SCALARS
  read_scalars("absorption", mu);
  in >> tok;  // SCALARS
  read_scalars("diffusivity", kappa);
}

}  // namespace dotrecon
