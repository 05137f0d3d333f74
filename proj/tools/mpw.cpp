#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mpw/mpw.hpp"
#include "mpw/verify/acceptance.hpp"

namespace fs = std::filesystem;
using namespace mpw;

namespace mpw {

template <class C> struct RunConfig {
  C model{};
  RunGrid grid{};
  std::uint64_t seed = 0;
};

template <class V, class C> void visit(V& v, RunConfig<C>& c) {
  v("model", c.model);
  v("grid", c.grid);
  v("seed", c.seed);
}

}  // namespace mpw

namespace {

struct Options {
  std::string scenario, config, out, filter, angles;
  std::optional<std::uint64_t> seed;
  double grid_scale = 1;
  std::optional<double> screen;
  std::optional<int> levels;
};

struct Report {
  std::string scenario;
  Provenance prov;
  fs::path dir;
  json checks = json::array();
  json files = json::array();
  bool ok = true;

  void check(const std::string& name, double value, double thr, bool at_most = true) {
    const bool pass = at_most ? value <= thr : value >= thr;
    ok = ok && pass;
    checks.push_back({{"name", name}, {"passed", pass}, {"value", value}, {"threshold", thr}});
  }

  void csv(const std::string& name, const std::vector<std::string>& header,
           const std::vector<std::vector<double>>& rows) {
    std::ostringstream os;
    write_table_csv(os, header, rows, prov);
    write_file(dir / name, os.str());
    files.push_back(name);
  }

  void wave(const std::string& name, const WaveField& w) {
    std::ostringstream os;
    write_wave_csv(os, w, prov);
    write_file(dir / name, os.str());
    files.push_back(name);
  }

  void trajectory(const std::string& name, const PathTrajectory& tr) {
    std::ostringstream os;
    write_trajectory_csv(os, tr, prov);
    write_file(dir / name, os.str());
    files.push_back(name);
  }

  void json_file(const std::string& name, json j) {
    j["config_hash"] = prov.config_hash;
    j["seed"] = prov.seed;
    write_file(dir / name, j.dump(2) + "\n");
    files.push_back(name);
  }

  int finish() {
    json r{{"scenario", scenario}, {"config_hash", prov.config_hash}, {"seed", prov.seed},
           {"passed", ok},         {"checks", checks},                {"files", files}};
    write_file(dir / "report.json", r.dump(2) + "\n");
    for (auto& c : checks)
      std::cout << (c["passed"].get<bool>() ? "ok    " : "FAIL  ") << c["name"].get<std::string>() << " = "
                << c["value"].get<double>() << " (threshold " << c["threshold"].get<double>() << ")\n";
    std::cout << "wrote " << files.size() + 1 << " files to " << dir.string() << "\n";
    if (!ok) throw CheckFailed(scenario + ": one or more checks failed");
    return 0;
  }
};

fs::path out_dir(const Options& o) {
  if (!o.out.empty()) return o.out;
  if (const char* e = std::getenv("MPW_OUT_DIR")) return e;
  return "mpw-out";
}

template <class C> RunConfig<C> load(const Options& o) {
  RunConfig<C> rc;
  if (!o.config.empty()) rc = from_json<RunConfig<C>>(read_json_file(o.config));
  if (o.seed) rc.seed = *o.seed;
  if (!(o.grid_scale > 0)) throw ConfigError("--grid-scale must be positive");
  rc.grid.nodes = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround((rc.grid.nodes - 1) * o.grid_scale)) + 1);
  if (!(rc.grid.hi > rc.grid.lo)) throw ConfigError("grid.hi must exceed grid.lo");
  return rc;
}

template <class C> Report start(const Options& o, const RunConfig<C>& rc) {
  Report r;
  r.scenario = o.scenario;
  r.prov = {config_hash(to_json(rc)), rc.seed};
  r.dir = out_dir(o) / o.scenario;
  return r;
}

Vec v1(double a) { return Vec::Constant(1, a); }

double node_hj(const HamiltonianSpec& spec, const ActionBranch& b, const Grid& g, double t) {
  double w = 0;
  for (std::size_t i = 0; i < g.size(); ++i) w = std::max(w, std::abs(hj_residual(spec, b, g.point(i), t)));
  return w;
}

int run_harmonic(const Options& o) {
  auto rc = load<HarmonicConfig>(o);
  rc.model.dim = 1;
  HarmonicCatalog h(rc.model);
  auto r = start(o, rc);
  auto g = Grid::line(rc.grid.lo, rc.grid.hi, rc.grid.nodes);
  auto term = h.term(v1(rc.grid.source));
  r.wave("wave.csv", assemble_wave({term}, g, rc.grid.t, {.hbar = rc.model.hbar}));
  auto res = schrodinger_residual(h.spec, [&](const Vec& x, double t) { return term.evaluate(x, t, rc.model.hbar); },
                                  g, rc.grid.t, {}, 1e-4);
  r.json_file("residual.json", residual_json(res));
  r.trajectory("trajectory.csv", integrate_characteristic(h.spec, {v1(rc.grid.source), v1(1.0)}, rc.grid.t));
  std::vector<std::vector<double>> rows;
  for (int k = 0; k <= rc.model.k_max; ++k) rows.push_back({double(k), h.energy(k)});
  r.csv("levels.csv", {"k", "energy"}, rows);
  r.check("hj_residual_at_nodes", node_hj(h.spec, term.branch, g, rc.grid.t), 1e-8);
  return r.finish();
}

int run_box(const Options& o) {
  auto rc = load<BoxConfig>(o);
  if (o.levels) rc.model.k_max = *o.levels;
  BoxCatalog box(rc.model);
  auto r = start(o, rc);
  const auto& m = rc.model;
  std::vector<std::vector<double>> rows;
  double worst = 0;
  for (auto& l : box.levels) {
    const double e = m.hbar * m.hbar * pi * pi * double(l.k * l.k) / (2 * m.mass * m.L * m.L);
    worst = std::max(worst, std::abs(l.energy - e) / e);
    rows.push_back({double(l.k), l.p, l.energy, e});
    std::cout << "E_" << l.k << " = " << fmt(l.energy) << "\n";
  }
  r.csv("levels.csv", {"k", "p", "energy", "closed_form"}, rows);
  auto g = Grid::line(0, m.L, rc.grid.nodes);
  r.wave("wave.csv", assemble_wave(box.terms, g, rc.grid.t, {.hbar = m.hbar}));
  double hj = 0;
  for (auto& t : box.terms) hj = std::max(hj, node_hj(box.spec, t.branch, g, rc.grid.t));
  r.check("levels_match_closed_form", worst, 1e-10);
  r.check("levels_returned", double(box.levels.size()), double(m.k_max), false);
  r.check("hj_residual_at_nodes", hj, 1e-8);
  return r.finish();
}

int run_tunneling(const Options& o) {
  auto rc = load<TunnelingConfig>(o);
  TunnelingCatalog t(rc.model);
  auto r = start(o, rc);
  auto c = [](cplx z) { return json{z.real(), z.imag()}; };
  r.json_file("coefficients.json", {{"p_T", c(t.p_T)},
                                    {"rho_R", c(t.rho_R)},
                                    {"rho_T", c(t.rho_T)},
                                    {"transmitted_flux_fraction", c(t.transmitted_flux_fraction())},
                                    {"middle_identity_gap", c(t.middle_identity_gap())}});
  auto g = Grid::line(rc.grid.lo, rc.grid.hi, rc.grid.nodes);
  r.wave("wave.csv", assemble_wave(t.terms, g, rc.grid.t, {.hbar = rc.model.hbar}));
  json sides;
  for (bool right : {false, true}) {
    std::vector<BranchTerm> ts;
    for (auto& term : t.terms)
      if ((term.branch.label == "transmitted") == right) ts.push_back(term);
    const double a = right ? 0.0 : rc.grid.lo, b = right ? rc.grid.hi : 0.0;
    if (!(b - a > 0)) continue;
    auto gs = Grid::line(a + 0.05 * (b - a), b - 0.05 * (b - a), rc.grid.nodes);
    auto res = schrodinger_residual(
        t.spec, [&](const Vec& x, double tt) { return evaluate_wave(ts, x, tt, rc.model.hbar); }, gs, rc.grid.t, {},
        1e-4);
    sides[right ? "right" : "left"] = residual_json(res);
  }
  r.json_file("residual.json", sides);
  r.check("interface_equations", t.equation_residual().cwiseAbs().maxCoeff(), 1e-12);
  return r.finish();
}

int run_two_slit(const Options& o) {
  auto rc = load<DoubleSlitConfig>(o);
  if (o.screen) rc.model.screen_x = *o.screen;
  auto cat = double_slit_branches(rc.model);
  auto r = start(o, rc);
  std::vector<std::vector<double>> rows;
  double asym = 0, peak = 0;
  const double step = (rc.grid.hi - rc.grid.lo) / double(rc.grid.nodes - 1);
  for (std::size_t i = 0; i < rc.grid.nodes; ++i) {
    const double y = rc.grid.lo + step * double(i);
    const double v = cat.screen_intensity(y);
    peak = std::max(peak, v);
    asym = std::max(asym, std::abs(v - cat.screen_intensity(-y)));
    rows.push_back({y, v, cat.phase_difference(y)});
  }
  r.csv("screen.csv", {"y", "intensity", "phase_difference"}, rows);
  Vec c(3);
  c << 0.8 * rc.model.screen_x, 1.0, 0.5;
  auto g = Grid::cube(c, 1.0, 17);
  auto res = schrodinger_residual(cat.spec, [&](const Vec& x, double t) { return cat.psi(x, t); }, g, rc.grid.t, {},
                                  1e-4);
  r.json_file("residual.json", residual_json(res));
  double hj = 0;
  for (std::size_t j = 1; j < cat.terms.size(); ++j) hj = std::max(hj, node_hj(cat.spec, cat.terms[j].branch, g, rc.grid.t));
  r.check("screen_symmetry", asym / peak, 1e-12);
  r.check("hj_residual_at_nodes", hj, 1e-8);
  return r.finish();
}

int run_aharonov_bohm(const Options& o) {
  auto rc = load<AharonovBohmConfig>(o);
  if (o.screen) rc.model.slit.screen_x = *o.screen;
  auto r = start(o, rc);
  const auto& m = rc.model;
  AharonovBohmCatalog cat;
  try {
    cat = aharonov_bohm_branches(m, solenoid_field(m.flux, m.c1, m.c2));
  } catch (const GaugeViolation&) {
    r.check("coulomb_gauge", 1, 0);
    return r.finish();
  }
  auto plain = double_slit_branches(m.slit);
  std::vector<std::vector<double>> rows;
  const double step = (rc.grid.hi - rc.grid.lo) / double(rc.grid.nodes - 1);
  for (std::size_t i = 0; i < rc.grid.nodes; ++i) {
    const double y = rc.grid.lo + step * double(i);
    Vec x = plain.screen_point(y);
    rows.push_back({y, std::norm(cat.psi(x)), plain.screen_intensity(y)});
  }
  r.csv("screen.csv", {"y", "intensity", "intensity_no_flux"}, rows);
  r.json_file("gauge.json", {{"max_divergence", cat.gauge.max_abs}, {"passed", cat.gauge.passed}});
  r.check("coulomb_gauge", cat.gauge.max_abs, 1e-8);
  return r.finish();
}

int run_coulomb(const Options& o) {
  auto rc = load<CoulombConfig>(o);
  if (o.levels) rc.model.k_max = *o.levels;
  CoulombCatalog cat(rc.model);
  auto r = start(o, rc);
  std::vector<std::vector<double>> rows;
  double worst = 0;
  for (auto& l : cat.levels) {
    const double ratio = cat.levels.front().energy / l.energy, k2 = double(l.k * l.k);
    worst = std::max(worst, std::abs(ratio - k2) / k2);
    rows.push_back({double(l.k), l.omega, l.energy, ratio});
  }
  r.csv("levels.csv", {"k", "omega", "energy", "ratio_to_ground"}, rows);
  rows.clear();
  const std::size_t n = std::min<std::size_t>(rc.grid.nodes, 201);
  const double step = (rc.grid.hi - rc.grid.lo) / double(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Vec q(2);
      q << rc.grid.lo + step * double(i), rc.grid.lo + step * double(j);
      std::vector<double> row{q[0], q[1]};
      for (auto orb : {Orbital::s1(), Orbital::p2(), Orbital::d3()})
        row.push_back(orb.k <= rc.model.k_max ? cat.orbital_wave(orb, q).real() : 0.0);
      rows.push_back(row);
    }
  r.csv("orbitals.csv", {"q1", "q2", "psi_1s", "psi_2p", "psi_3d"}, rows);
  r.check("energy_ratio_k_squared", worst, 1e-10);
  return r.finish();
}

int run_kepler(const Options& o) {
  auto rc = load<KeplerConfig>(o);
  rc.model.validate();
  const auto& m = rc.model;
  auto r = start(o, rc);
  Vec q0 = Eigen::Map<const Vec>(m.q0.data(), m.q0.size()), p0 = Eigen::Map<const Vec>(m.p0.data(), m.p0.size());
  auto orb = kepler_orbit(m.mass, m.omega, q0, p0, 2 * pi / m.omega * m.periods, m.dt);
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < orb.q.size(); ++k) {
    std::vector<double> row{orb.tprime[k], orb.t[k]};
    for (long n = 0; n < orb.q[k].size(); ++n) row.push_back(orb.q[k][n]);
    for (int n = 0; n < 3; ++n) row.push_back(orb.x[k][n]);
    rows.push_back(row);
  }
  std::vector<std::string> header{"tprime", "t"};
  for (std::size_t n = 1; n <= m.q0.size(); ++n) header.push_back("q" + std::to_string(n));
  for (int n = 1; n <= 3; ++n) header.push_back("x" + std::to_string(n));
  r.csv("orbit.csv", header, rows);
  r.json_file("orbit.json", {{"G", orb.G}, {"energy", orb.energy}, {"period", orb.t.back() / m.periods}});
  r.check("orbit_closure", std::max((orb.q.back() - q0).norm(), (orb.p.back() - p0).norm()), 1e-8);
  return r.finish();
}

int run_epr(const Options& o) {
  auto rc = load<EprConfig>(o);
  if (!o.angles.empty()) {
    rc.model.angles_deg.clear();
    std::stringstream ss(o.angles);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        rc.model.angles_deg.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ConfigError("bad angle '" + tok + "'");
      }
    }
  }
  if (o.seed) rc.model.seed = *o.seed;
  rc.seed = rc.model.seed;
  auto r = start(o, rc);
  const auto& m = rc.model;
  auto dir = [](double deg) { return direction(0, deg * pi / 180); };
  std::vector<std::vector<double>> rows;
  double worst = 0;
  for (double a : m.angles_deg)
    for (double b : m.angles_deg) {
      const double q = epr_correlation(dir(a), dir(b), m.alpha_o, m.beta_o), cf = -std::cos((b - a) * pi / 180);
      worst = std::max(worst, std::abs(q - cf));
      rows.push_back({a, b, q, cf, bell_binary_model(dir(a), dir(b), m.samples, m.seed)});
    }
  r.csv("correlations.csv", {"a_deg", "b_deg", "quantum", "closed_form", "binary_model"}, rows);
  r.check("correlation_closed_form", worst, 1e-12);
  if (m.angles_deg.size() >= 4) {
    std::array<Vec3, 4> n;
    for (int i = 0; i < 4; ++i) n[i] = dir(m.angles_deg[i]);
    auto E = [&](const Vec3& a, const Vec3& b) { return epr_correlation(a, b, m.alpha_o, m.beta_o); };
    const double S = chsh(E, n[0], n[1], n[2], n[3]), B = bell_chsh(n, m.samples, m.seed);
    std::cout << "CHSH S = " << std::fixed << std::setprecision(4) << S << " (binary model " << B << ")\n"
              << std::defaultfloat;
    r.json_file("chsh.json", {{"S", S}, {"binary_model_S", B}, {"samples", m.samples}});
    r.check("binary_model_chsh", B, 2.01);
  }
  return r.finish();
}

int verify_all(const Options& o) {
  fs::path p = o.config.empty() ? fs::path(MPW_CONFIG_DIR) : fs::path(o.config);
  if (fs::is_directory(p)) p /= "acceptance.json";
  auto j = read_json_file(p.string());
  auto cfg = acceptance_config(j);
  if (o.seed) cfg.seed = *o.seed;
  auto rs = run_acceptance(cfg, o.filter);
  const std::string hash = config_hash(to_json(cfg));
  bool ok = true;
  for (auto& r : rs) {
    std::cout << criterion_line(r) << "\n";
    ok = ok && r.passed();
  }
  const std::string table = check_table(rs);
  std::cout << "\n" << table;
  const fs::path dir = out_dir(o) / "verify";
  write_file(dir / "summary.json", summary_json(rs, hash, cfg.seed).dump(2) + "\n");
  write_file(dir / "summary.txt", "# config_hash=" + hash + " seed=" + std::to_string(cfg.seed) + "\n" + table);
  if (!ok) {
    std::string names;
    for (auto& r : rs)
      for (auto& f : r.failed()) names += " " + f;
    throw CheckFailed("failed checks:" + names);
  }
  return 0;
}

json all_schemas() {
  return {{"harmonic", schema_of<RunConfig<HarmonicConfig>>()},
          {"box", schema_of<RunConfig<BoxConfig>>()},
          {"tunneling", schema_of<RunConfig<TunnelingConfig>>()},
          {"two-slit", schema_of<RunConfig<DoubleSlitConfig>>()},
          {"aharonov-bohm", schema_of<RunConfig<AharonovBohmConfig>>()},
          {"coulomb", schema_of<RunConfig<CoulombConfig>>()},
          {"kepler", schema_of<RunConfig<KeplerConfig>>()},
          {"epr", schema_of<RunConfig<EprConfig>>()},
          {"acceptance", schema_of<AcceptanceConfig>()}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multipath wave construction: scenarios, oracles, acceptance"};
  app.require_subcommand(1);
  Options o;

  const std::map<std::string, int (*)(const Options&)> runners{
      {"harmonic", run_harmonic}, {"box", run_box},         {"tunneling", run_tunneling},
      {"two-slit", run_two_slit}, {"aharonov-bohm", run_aharonov_bohm}, {"coulomb", run_coulomb},
      {"kepler", run_kepler},     {"epr", run_epr}};
  std::vector<std::string> names;
  for (auto& [k, _] : runners) names.push_back(k);

  auto* run = app.add_subcommand("run", "run one scenario and write its artifacts");
  run->add_option("scenario", o.scenario)->required()->check(CLI::IsMember(names));
  run->add_option("--config", o.config, "scenario JSON config")->check(CLI::ExistingFile);
  run->add_option("--out", o.out, "output directory (default $MPW_OUT_DIR or ./mpw-out)");
  run->add_option("--seed", o.seed, "seed recorded in every artifact");
  run->add_option("--grid-scale", o.grid_scale, "multiply grid resolution");
  run->add_option("--screen", o.screen, "two-slit screen distance");
  run->add_option("--levels", o.levels, "number of quantized levels");
  run->add_option("--angles", o.angles, "comma-separated detector angles in degrees");

  auto* verify = app.add_subcommand("verify-all", "run the acceptance suite");
  verify->add_option("--config", o.config, "acceptance JSON or directory holding acceptance.json");
  verify->add_option("--filter", o.filter, "comma-separated suites or criterion numbers");
  verify->add_option("--out", o.out, "output directory (default $MPW_OUT_DIR or ./mpw-out)");
  verify->add_option("--seed", o.seed, "override the acceptance seed");

  std::string which;
  auto* schema = app.add_subcommand("dump-config-schema", "print the JSON schema of every config");
  schema->add_option("scenario", which, "limit to one scenario");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return runners.at(o.scenario)(o);
    if (*verify) {
      o.scenario = "verify";
      return verify_all(o);
    }
    if (*schema) {
      auto s = all_schemas();
      if (!which.empty() && !s.contains(which)) throw ConfigError("no schema for '" + which + "'");
      std::cout << (which.empty() ? s : s[which]).dump(2) << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const CheckFailed& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
