#pragma once

#include <vector>

#include "mpw/hj/branch.hpp"
#include "mpw/hj/hamiltonian.hpp"

namespace mpw {

struct TunnelingConfig {
  double mass = 1;
  double hbar = 1;
  double p0 = 1;
  double V = 0.25;
  double rho0 = 1;

  void validate() const {
    if (!(mass > 0) || !(hbar > 0)) throw ConfigError("tunneling constants must be positive");
    if (V < 0) throw ConfigError("step height must be non-negative");
    if (!(rho0 >= 0)) throw ConfigError("initial density must be non-negative");
  }
};

// step V = 0 for x < 0, V for x >= 0
struct TunnelingCatalog {
  TunnelingConfig cfg;
  HamiltonianSpec spec;
  cplx p_T;
  cplx rho_R, rho_T;
  double energy = 0;
  std::vector<BranchTerm> terms;  // incident, reflected (x < 0), transmitted (x >= 0)

  explicit TunnelingCatalog(TunnelingConfig c) : cfg(c) {
    cfg.validate();
    if (!(cfg.p0 > 0)) throw DegenerateSystem("incident momentum must be positive");
    const double v = cfg.V;
    spec = HamiltonianSpec::scalar_mass(1, cfg.mass,
                                        [v](const Vec& x, double) { return x[0] >= 0 ? v : 0.0; },
                                        cfg.hbar);
    energy = cfg.p0 * cfg.p0 / (2 * cfg.mass);
    p_T = std::sqrt(cplx(cfg.p0 * cfg.p0 - 2 * cfg.mass * v));
    solve();
    build_terms();
  }

  // (p0/M) rho0 = (p0/M) rho_T + (pT/M) rho_R
  // (rho_T + 2 rho_R)(p0/M)^2 = ((p0/M)^2 + (pT/M)^2) rho_T
  void solve() {
    const double m = cfg.mass;
    const cplx u0 = cfg.p0 / m, uT = p_T / m;
    Eigen::Matrix2cd a;
    Eigen::Vector2cd b;
    // unknowns (rho_R, rho_T)
    a << uT, u0, 2.0 * u0 * u0, -uT * uT;
    b << u0 * cfg.rho0, 0.0;
    const double scale = std::pow(std::abs(uT), 3) + 2 * std::pow(std::abs(u0), 3);
    if (std::abs(a.determinant()) <= 1e-14 * scale)
      throw DegenerateSystem("interface system is singular");
    Eigen::Vector2cd r = a.fullPivLu().solve(b);
    rho_R = r[0];
    rho_T = r[1];
  }

  Eigen::Vector2cd equation_residual() const {
    const double m = cfg.mass;
    const cplx u0 = cfg.p0 / m, uT = p_T / m;
    Eigen::Vector2cd r;
    r[0] = u0 * cfg.rho0 - (u0 * rho_T + uT * rho_R);
    r[1] = (rho_T + 2.0 * rho_R) * u0 * u0 - (u0 * u0 + uT * uT) * rho_T;
    return r;
  }

  // rho_T + rho_R - rho0, the flux-balance middle identity
  cplx middle_identity_gap() const { return rho_T + rho_R - cfg.rho0; }

  // transmitted probability current over the incident one
  cplx transmitted_flux_fraction() const { return p_T * rho_T / (cfg.p0 * cfg.rho0); }

  void build_terms() {
    const double p0 = cfg.p0, e = energy;
    const cplx pt = p_T;
    auto plane = [&](int id, const char* label, cplx p, cplx amp2, bool right) {
      BranchTerm t;
      ActionBranch& b = t.branch;
      b.id = id;
      b.dim = 1;
      b.label = label;
      b.init = InitialCondition::momentum(Vec::Constant(1, p0));
      b.complex_valued = std::abs(p.imag()) > 0;
      if (id > 0) b.lineage.push_back({Vec::Zero(1), 0.0, BranchCause::reflection});
      b.phi = [=](const Vec& x, double t) { return p * x[0] - e * t; };
      b.grad_phi = [=](const Vec&, double) { return CVec::Constant(1, p); };
      b.laplacian_phi = [](const Vec&, double) { return cplx(0); };
      b.dphi_dt = [=](const Vec&, double) { return cplx(-e); };
      t.sqrt_rho = [a = std::sqrt(amp2)](const Vec&, double) { return a; };
      if (right)
        t.domain = [](const Vec& x) { return x[0] >= 0; };
      else
        t.domain = [](const Vec& x) { return x[0] < 0; };
      terms.push_back(std::move(t));
    };
    plane(0, "incident", p0, cfg.rho0, false);
    plane(1, "reflected", -p0, rho_R, false);
    plane(2, "transmitted", pt, rho_T, true);
  }

  cplx wave(double x, double t) const {
    Vec v = Vec::Constant(1, x);
    cplx s = 0;
    for (auto& term : terms) s += term.evaluate(v, t, cfg.hbar);
    return s;
  }
};

inline TunnelingCatalog tunneling_branches(const TunnelingConfig& cfg) { return TunnelingCatalog(cfg); }

}  // namespace mpw
