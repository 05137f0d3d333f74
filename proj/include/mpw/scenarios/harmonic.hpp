#pragma once

#include <vector>

#include "mpw/hj/branch.hpp"
#include "mpw/hj/hamiltonian.hpp"
#include "mpw/scenarios/hermite.hpp"

namespace mpw {

struct HarmonicConfig {
  double mass = 1;
  double omega = 1;
  double hbar = 1;
  int dim = 1;
  int k_max = 60;
  double caustic_eps = 1e-6;

  void validate() const {
    if (!(mass > 0) || !(omega > 0) || !(hbar > 0)) throw ConfigError("harmonic constants must be positive");
    if (dim < 1 || k_max < 1) throw ConfigError("harmonic limits must be at least 1");
  }
};

// N-dimensional isotropic oscillator, V = M omega^2 x^2 / 2
struct HarmonicCatalog {
  HarmonicConfig cfg;
  HamiltonianSpec spec;

  explicit HarmonicCatalog(HarmonicConfig c) : cfg(c) {
    cfg.validate();
    const double k = cfg.mass * cfg.omega * cfg.omega;
    spec = HamiltonianSpec::scalar_mass(cfg.dim, cfg.mass,
                                        [k](const Vec& x, double) { return 0.5 * k * x.squaredNorm(); },
                                        cfg.hbar);
    spec.potential_gradient = [k](const Vec& x, double) { return Vec(k * x); };
  }

  double energy(int k) const { return cfg.hbar * cfg.omega * (k + 0.5 * cfg.dim); }

  void check_time(double t) const {
    if (std::abs(std::sin(cfg.omega * t)) < cfg.caustic_eps)
      throw CausticTime("evaluation too close to a caustic time");
  }

  // action with complex time allowed
  cplx action(const Vec& x, const Vec& x0, cplx t) const {
    const double mw = cfg.mass * cfg.omega;
    cplx s = std::sin(cfg.omega * t), c = std::cos(cfg.omega * t);
    return mw / (2.0 * s) * ((x.squaredNorm() + x0.squaredNorm()) * c - 2.0 * x.dot(x0));
  }

  // (M omega / (2 pi i hbar sin omega t))^{N/2}, continued through caustics on the real axis
  cplx sqrt_rho(double t) const {
    check_time(t);
    const double wt = cfg.omega * t;
    const double mag = cfg.mass * cfg.omega / (2 * pi * cfg.hbar * std::abs(std::sin(wt)));
    const double maslov = pi / 4 + pi / 2 * std::floor(wt / pi);
    return std::pow(mag, 0.5 * cfg.dim) * std::exp(-I * (double(cfg.dim) * maslov));
  }

  // principal branch, for complex time with Re(omega t) in (0, pi)
  cplx sqrt_rho(cplx t) const {
    cplx z = cfg.mass * cfg.omega / (2.0 * pi * I * cfg.hbar * std::sin(cfg.omega * t));
    return std::pow(std::sqrt(z), double(cfg.dim));
  }

  cplx kernel(const Vec& x, const Vec& x0, double t) const {
    return sqrt_rho(t) * std::exp(I * action(x, x0, t) / cfg.hbar);
  }

  cplx kernel(const Vec& x, const Vec& x0, cplx t) const {
    return sqrt_rho(t) * std::exp(I * action(x, x0, t) / cfg.hbar);
  }

  // sum over multi-indices of total degree <= K
  cplx eigen_expansion(const Vec& x, const Vec& x0, cplx t, int K) const {
    const double scale = cfg.mass * cfg.omega / cfg.hbar;
    std::vector<cplx> total(K + 1, 0.0);
    total[0] = 1.0;
    for (int n = 0; n < cfg.dim; ++n) {
      auto a = hermite_functions(K, x[n], scale);
      auto b = hermite_functions(K, x0[n], scale);
      std::vector<cplx> next(K + 1, 0.0);
      for (int s = 0; s <= K; ++s)
        for (int k = 0; k <= s; ++k) next[s] += a[k] * b[k] * total[s - k];
      total = next;
    }
    cplx sum = 0;
    for (int s = 0; s <= K; ++s) sum += std::exp(-I * cfg.omega * t * (s + 0.5 * cfg.dim)) * total[s];
    return sum;
  }

  cplx eigen_expansion(const Vec& x, const Vec& x0, double t, int K) const {
    return eigen_expansion(x, x0, cplx(t), K);
  }

  ActionBranch branch(const Vec& x0) const {
    const double m = cfg.mass, w = cfg.omega;
    const int d = cfg.dim;
    ActionBranch b;
    b.dim = d;
    b.label = "harmonic";
    b.init = InitialCondition::position(x0);
    b.lineage.push_back({x0, 0.0, BranchCause::origin});
    b.phi = [self = *this, x0](const Vec& x, double t) { return self.action(x, x0, cplx(t)); };
    b.grad_phi = [m, w, x0](const Vec& x, double t) {
      double s = std::sin(w * t), c = std::cos(w * t);
      return CVec((m * w / s * (x * c - x0)).cast<cplx>());
    };
    b.laplacian_phi = [w, d](const Vec&, double t) { return cplx(d * w / std::tan(w * t)); };
    b.dphi_dt = [m, w, x0](const Vec& x, double t) {
      double s = std::sin(w * t), c = std::cos(w * t);
      return cplx(0.5 * m * w * w * (-(x.squaredNorm() + x0.squaredNorm()) + 2 * c * x.dot(x0)) / (s * s));
    };
    return b;
  }

  BranchTerm term(const Vec& x0) const {
    BranchTerm t;
    t.branch = branch(x0);
    t.sqrt_rho = [self = *this](const Vec&, double tt) { return self.sqrt_rho(tt); };
    return t;
  }

  // coherent state centred at a, evolved exactly
  cplx coherent_state(const Vec& x, const Vec& a, double t) const {
    const double s = cfg.mass * cfg.omega / cfg.hbar;
    cplx acc = std::pow(s / pi, 0.25 * cfg.dim) * std::exp(-I * 0.5 * cfg.omega * t * double(cfg.dim));
    for (int n = 0; n < cfg.dim; ++n) {
      cplx alpha = std::sqrt(s / 2) * a[n] * std::exp(-I * cfg.omega * t);
      cplx z = std::sqrt(s) * x[n];
      acc *= std::exp(-0.5 * z * z + std::sqrt(2.0) * alpha * z - 0.5 * alpha * alpha -
                      0.5 * std::norm(alpha));
    }
    return acc;
  }
};

inline HarmonicCatalog harmonic_branches(const HarmonicConfig& cfg) { return HarmonicCatalog(cfg); }

}  // namespace mpw
