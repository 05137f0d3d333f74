#pragma once

#include <array>
#include <map>
#include <vector>

#include "mpw/hj/characteristic.hpp"
#include "mpw/hj/transport.hpp"
#include "mpw/scenarios/harmonic.hpp"
#include "mpw/wave/measure.hpp"

namespace mpw {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;

struct QuaternionCoord {
  Vec4 q = Vec4::Zero();
  int sheet = 1;  // +1 or -1
};

inline Vec3 quaternion_map(const Vec4& q) {
  return Vec3(2 * q[0] * q[2] + 2 * q[1] * q[3], -2 * q[0] * q[1] + 2 * q[2] * q[3],
              q[0] * q[0] - q[1] * q[1] - q[2] * q[2] + q[3] * q[3]);
}

// dx/dq, 3x4
inline Eigen::Matrix<double, 3, 4> quaternion_jacobian(const Vec4& q) {
  Eigen::Matrix<double, 3, 4> j;
  j << q[2], q[3], q[0], q[1],
      -q[1], -q[0], q[3], q[2],
      q[0], -q[1], -q[2], q[3];
  return 2 * j;
}

// both sheets on the slice q3 = q4 = 0, which carries x1 = 0
inline std::array<QuaternionCoord, 2> quaternion_sheets_2d(const Vec3& x, double tol = 1e-12) {
  const double r = x.norm();
  if (r == 0) throw OriginBranchPoint("the origin is a branch point of the quaternion map");
  if (std::abs(x[0]) > tol * r) throw std::invalid_argument("2D sheets need x1 = 0");
  const double s = x[1] >= 0 ? 1.0 : -1.0;
  const double q1 = std::sqrt(0.5 * (r + x[2]));
  const double q2 = -s * std::sqrt(std::max(0.0, 0.5 * (r - x[2])));
  QuaternionCoord a, b;
  a.q << q1, q2, 0, 0;
  b.q = -a.q;
  b.sheet = -1;
  return {a, b};
}

struct KeplerOrbit {
  std::vector<double> tprime;
  std::vector<double> t;  // physical time, int r dt'
  std::vector<Vec> q;
  std::vector<Vec> p;
  std::vector<Vec3> x;
  double G = 0;       // fixed by the initial state
  double energy = 0;  // -2 M omega^2
};

// Kepler orbit on the 2D slice: oscillator of mass 4M, V = 2 M omega^2 q.q in t'
inline KeplerOrbit kepler_orbit(double mass, double omega, const Vec& q0, const Vec& p0,
                                double tprime_final, double dt) {
  if (q0.size() != 2 && q0.size() != 4) throw std::invalid_argument("quaternion state is 2D or 4D");
  const int d = static_cast<int>(q0.size());
  const double k = 4 * mass * omega * omega;
  auto spec = HamiltonianSpec::scalar_mass(
      d, 4 * mass, [k](const Vec& q, double) { return 0.5 * k * q.squaredNorm(); });
  spec.potential_gradient = [k](const Vec& q, double) { return Vec(k * q); };

  StepControl ctl;
  ctl.dt = dt;
  auto traj = integrate_characteristic(spec, CharacteristicStart{q0, p0}, tprime_final, ctl);

  KeplerOrbit orb;
  orb.G = p0.squaredNorm() / (8 * mass) + 2 * mass * omega * omega * q0.squaredNorm();
  orb.energy = -2 * mass * omega * omega;
  std::vector<cplx> r;
  for (auto& s : traj.samples) {
    orb.tprime.push_back(s.t);
    orb.q.push_back(s.x);
    orb.p.push_back(s.p);
    Vec4 q4 = Vec4::Zero();
    q4.head(d) = s.x;
    orb.x.push_back(quaternion_map(q4));
    r.push_back(s.x.squaredNorm());
  }
  auto t = detail::cumulative_integral(orb.tprime, r);
  for (auto& v : t) orb.t.push_back(v.real());
  return orb;
}

// c_{k1..kn} for one principal level k, total degree 2k-2
struct Orbital {
  long k = 1;
  std::map<std::vector<int>, double> coefficients;

  void validate() const {
    if (k < 1) throw ConfigError("principal level must be at least 1");
    for (auto& [idx, c] : coefficients) {
      int s = 0;
      for (int v : idx) {
        if (v < 0) throw ConfigError("negative Hermite index");
        s += v;
      }
      if (s != 2 * k - 2) throw ConfigError("Hermite indices must sum to 2k-2");
      if (idx.size() != 2 && idx.size() != 4) throw ConfigError("orbital indices are 2D or 4D");
    }
  }

  static Orbital s1() { return {1, {{{0, 0}, 1.0}}}; }
  static Orbital p2() { return {2, {{{1, 1}, 1.0}}}; }
  static Orbital d3() { return {3, {{{1, 3}, 1.0}, {{3, 1}, -1.0}}}; }
};

struct CoulombConfig {
  double mass = 1;
  double G = 1;
  double hbar = 1;
  int k_max = 10;
  double scale = 1;  // 4 M omega / hbar for the Hermite functions

  void validate() const {
    if (!(mass > 0) || !(G > 0) || !(hbar > 0) || !(scale > 0))
      throw ConfigError("Coulomb constants must be positive");
    if (k_max < 1) throw ConfigError("Coulomb truncation must be at least 1");
  }
};

struct CoulombLevel {
  long k = 0;
  double omega = 0;
  double energy = 0;  // binding energy, the bound state sits at -energy
};

struct CoulombCatalog {
  CoulombConfig cfg;
  std::vector<CoulombLevel> levels;

  explicit CoulombCatalog(CoulombConfig c) : cfg(c) {
    cfg.validate();
    QuantizationProblem pb;
    pb.phi = [G = cfg.G](double w) { return 2 * pi * G / w; };
    pb.hbar = cfg.hbar;
    pb.lo = cfg.G / (cfg.hbar * (cfg.k_max + 0.5));
    pb.hi = cfg.G / (cfg.hbar * 0.5);
    for (auto& r : quantize(pb))
      levels.push_back({r.k, r.parameter, 0.5 * cfg.mass * r.parameter * r.parameter});
  }

  // oscillator branch of mass 4M in t'
  HarmonicCatalog oscillator(double omega, int dim = 4) const {
    HarmonicConfig h;
    h.mass = 4 * cfg.mass;
    h.omega = omega;
    h.hbar = cfg.hbar;
    h.dim = dim;
    return HarmonicCatalog(h);
  }

  double level_energy(long k) const {
    for (auto& l : levels)
      if (l.k == k) return l.energy;
    throw std::out_of_range("level beyond truncation");
  }

  // sum_c c prod_n Psi_{k_n}(q^n) exp(i E_k t / hbar)
  cplx orbital_wave(const Orbital& orb, const Vec& q, double t = 0) const {
    orb.validate();
    cplx s = 0;
    for (auto& [idx, c] : orb.coefficients) {
      if (q.size() < static_cast<long>(idx.size())) throw DomainMismatch("point has too few components");
      double prod = c;
      for (std::size_t n = 0; n < idx.size(); ++n) prod *= hermite_function(idx[n], q[n], cfg.scale);
      s += prod;
    }
    return s * std::exp(I * level_energy(orb.k) * t / cfg.hbar);
  }

  double orbital_density(const Orbital& orb, const Vec& q) const { return std::norm(orbital_wave(orb, q)); }

  // arbitrary Hermite tuple summed over the two sheets +q, -q
  double sheet_sum(const std::vector<int>& idx, const Vec& q) const {
    double a = 1, b = 1;
    for (std::size_t n = 0; n < idx.size(); ++n) {
      a *= hermite_function(idx[n], q[n], cfg.scale);
      b *= hermite_function(idx[n], -q[n], cfg.scale);
    }
    return a + b;
  }
};

inline CoulombCatalog coulomb_branches(const CoulombConfig& cfg) { return CoulombCatalog(cfg); }

}  // namespace mpw
