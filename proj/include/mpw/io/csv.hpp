#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "mpw/hj/characteristic.hpp"
#include "mpw/oracle/cn.hpp"
#include "mpw/wave/field.hpp"
#include "mpw/wave/residual.hpp"

namespace mpw {

struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
};

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void provenance_line(std::ostream& os, const std::optional<Provenance>& prov) {
  if (prov) os << "# config_hash=" << prov->config_hash << " seed=" << prov->seed << "\n";
}

}  // namespace detail

// t,x1..xN,p1..pN,re_phi,im_phi,re_sqrt_rho,im_sqrt_rho,event
inline void write_trajectory_csv(std::ostream& os, const PathTrajectory& tr,
                                 const std::optional<Provenance>& prov = {}) {
  detail::provenance_line(os, prov);
  const long d = tr.samples.empty() ? 0 : tr.samples.front().x.size();
  os << "t";
  for (long n = 1; n <= d; ++n) os << ",x" << n;
  for (long n = 1; n <= d; ++n) os << ",p" << n;
  os << ",re_phi,im_phi,re_sqrt_rho,im_sqrt_rho,event\n";
  for (auto& s : tr.samples) {
    os << fmt(s.t);
    for (long n = 0; n < d; ++n) os << "," << fmt(s.x[n]);
    for (long n = 0; n < d; ++n) os << "," << fmt(s.p[n]);
    os << "," << fmt(s.phi.real()) << "," << fmt(s.phi.imag()) << "," << fmt(s.sqrt_rho.real()) << ","
       << fmt(s.sqrt_rho.imag()) << "," << s.event << "\n";
  }
}

// x1..xN,re_psi,im_psi,abs2 (component c of a spinor field)
inline void write_wave_csv(std::ostream& os, const WaveField& w, const std::optional<Provenance>& prov = {},
                           int c = 0) {
  detail::provenance_line(os, prov);
  const int d = w.grid.dim();
  for (int n = 1; n <= d; ++n) os << "x" << n << ",";
  os << "re_psi,im_psi,abs2\n";
  for (std::size_t i = 0; i < w.grid.size(); ++i) {
    Vec x = w.grid.point(i);
    for (int n = 0; n < d; ++n) os << fmt(x[n]) << ",";
    cplx v = w(i, c);
    os << fmt(v.real()) << "," << fmt(v.imag()) << "," << fmt(std::norm(v)) << "\n";
  }
}

inline nlohmann::json residual_json(const ResidualReport& r, const std::optional<Provenance>& prov = {}) {
  nlohmann::json j;
  j["max_rel"] = r.max_rel;
  j["l2_rel"] = r.l2_rel;
  j["excluded_nodes"] = r.excluded_nodes;
  std::vector<double> h(r.grid.spacing.data(), r.grid.spacing.data() + r.grid.spacing.size());
  j["grid"] = {{"h", h}, {"extents", r.grid.extents}};
  if (prov) {
    j["config_hash"] = prov->config_hash;
    j["seed"] = prov->seed;
  }
  return j;
}

// header row then one row per record, all values %.17g
inline void write_table_csv(std::ostream& os, const std::vector<std::string>& header,
                            const std::vector<std::vector<double>>& rows,
                            const std::optional<Provenance>& prov = {}) {
  detail::provenance_line(os, prov);
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << "\n";
  for (auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << fmt(r[i]);
    os << "\n";
  }
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << content;
}

// one wave CSV per snapshot plus manifest.json with times and norms
inline void dump_series(const std::filesystem::path& dir, const CNSeries& s, const Provenance& prov) {
  std::filesystem::create_directories(dir);
  nlohmann::json m;
  m["config_hash"] = prov.config_hash;
  m["seed"] = prov.seed;
  m["dt"] = s.dt;
  m["steps"] = s.steps;
  m["snapshots"] = nlohmann::json::array();
  for (std::size_t k = 0; k < s.snapshots.size(); ++k) {
    std::ostringstream os;
    write_wave_csv(os, s.snapshots[k], prov);
    const std::string name = "snapshot_" + std::to_string(k) + ".csv";
    write_file(dir / name, os.str());
    m["snapshots"].push_back({{"file", name}, {"time", s.snapshots[k].time}, {"norm", s.snapshots[k].norm()}});
  }
  m["norms"] = s.norms;
  write_file(dir / "manifest.json", m.dump(2) + "\n");
}

}  // namespace mpw
