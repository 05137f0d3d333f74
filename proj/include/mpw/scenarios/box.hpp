#pragma once

#include <string>
#include <vector>

#include "mpw/hj/branch.hpp"
#include "mpw/hj/hamiltonian.hpp"
#include "mpw/wave/measure.hpp"

namespace mpw {

struct BoxConfig {
  double mass = 1;
  double hbar = 1;
  double L = 1;
  double x0 = 0.3;
  int k_max = 20;

  void validate() const {
    if (!(mass > 0) || !(hbar > 0) || !(L > 0)) throw ConfigError("box constants must be positive");
    if (!(x0 > 0 && x0 < L)) throw ConfigError("box source must be interior");
    if (k_max < 1) throw ConfigError("box truncation must be at least 1");
  }
};

struct BoxLevel {
  long k = 0;
  double p = 0;
  double energy = 0;
};

// free particle on [0, L] with elastic walls
struct BoxCatalog {
  BoxConfig cfg;
  HamiltonianSpec spec;
  ConstraintSet walls;
  std::vector<BoxLevel> levels;
  std::vector<BranchTerm> terms;  // four reflection families per level

  explicit BoxCatalog(BoxConfig c) : cfg(c) {
    cfg.validate();
    spec = HamiltonianSpec::free_particle(1, cfg.mass, cfg.hbar);
    walls = ConstraintSet::box(1, 0, 0.0, cfg.L);

    QuantizationProblem q;
    q.phi = [L = cfg.L](double p) { return 2 * L * p; };
    q.hbar = cfg.hbar;
    q.lo = 0.5 * pi * cfg.hbar / cfg.L;
    q.hi = (cfg.k_max + 0.5) * pi * cfg.hbar / cfg.L;
    for (auto& r : quantize(q))
      levels.push_back({r.k, r.parameter, r.parameter * r.parameter / (2 * cfg.mass)});

    for (auto& lv : levels)
      for (auto& t : family_terms(lv)) terms.push_back(t);
  }

  // the four families ->->, -><-, <-<-, <-->, amplitude sqrt(2/L)/4 with sign per wall hit
  std::vector<BranchTerm> family_terms(const BoxLevel& lv) const {
    struct Family {
      const char* name;
      double sx, sx0, shift, sign;
      std::vector<double> hits;  // wall positions in units of L
    };
    const Family fams[] = {{"->->", 1, -1, 0, 1, {}},
                           {"-><-", -1, -1, 2, -1, {1}},
                           {"<-<-", -1, 1, 2, 1, {0, 1}},
                           {"<-->", 1, 1, 0, -1, {0}}};
    std::vector<BranchTerm> out;
    const double L = cfg.L, x0 = cfg.x0, p = lv.p, e = lv.energy;
    const long k = lv.k;
    int id = static_cast<int>(k) * 4;
    for (auto& f : fams) {
      BranchTerm t;
      ActionBranch& b = t.branch;
      b.id = id++;
      b.dim = 1;
      b.label = std::string(f.name) + " k=" + std::to_string(k);
      b.init = InitialCondition::position(Vec::Constant(1, x0));
      b.lineage.push_back({Vec::Constant(1, x0), 0.0, BranchCause::origin});
      for (double w : f.hits) b.lineage.push_back({Vec::Constant(1, w * L), 0.0, BranchCause::reflection});
      const double offset = 2.0 * double(k) * L * p + p * (f.shift * L + f.sx0 * x0);
      const double sx = f.sx;
      b.phi = [=](const Vec& x, double t) { return cplx(offset + sx * p * x[0] - e * t); };
      b.grad_phi = [=](const Vec&, double) { return CVec::Constant(1, sx * p); };
      b.laplacian_phi = [](const Vec&, double) { return cplx(0); };
      b.dphi_dt = [=](const Vec&, double) { return cplx(-e); };
      t.sqrt_rho = [a = std::sqrt(2.0 / L) / 4.0](const Vec&, double) { return cplx(a); };
      t.weight = f.sign;
      t.domain = [L](const Vec& x) { return x[0] >= 0 && x[0] <= L; };
      out.push_back(std::move(t));
    }
    return out;
  }

  // sqrt(2/L) sum_k exp(-i E_k t / hbar) sin(k pi x0 / L) sin(k pi x / L)
  cplx closed_form(double x, double t) const {
    cplx s = 0;
    for (auto& lv : levels)
      s += std::exp(-I * lv.energy * t / cfg.hbar) * std::sin(lv.k * pi * cfg.x0 / cfg.L) *
           std::sin(lv.k * pi * x / cfg.L);
    return std::sqrt(2.0 / cfg.L) * s;
  }

  // normalized eigenterm sqrt(2/L) sin(k pi x / L) exp(-i E_k t / hbar)
  cplx eigenterm(long k, double x, double t) const {
    double e = std::pow(k * pi * cfg.hbar / cfg.L, 2) / (2 * cfg.mass);
    return std::sqrt(2.0 / cfg.L) * std::sin(k * pi * x / cfg.L) * std::exp(-I * e * t / cfg.hbar);
  }
};

inline BoxCatalog box_branches(const BoxConfig& cfg) { return BoxCatalog(cfg); }

}  // namespace mpw
