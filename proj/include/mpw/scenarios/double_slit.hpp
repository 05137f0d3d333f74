#pragma once

#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mpw/hj/branch.hpp"
#include "mpw/hj/operators.hpp"

namespace mpw {

struct DoubleSlitConfig {
  double mass = 1;
  double hbar = 1;
  double p0 = 2;
  double slit_y = 5;
  double screen_x = 10;
  bool finite_width = false;
  double width = 0.5;
  int width_samples = 9;

  void validate() const {
    if (!(mass > 0) || !(hbar > 0) || !(p0 > 0)) throw ConfigError("double-slit constants must be positive");
    if (!(slit_y > 0) || !(screen_x > 0)) throw ConfigError("double-slit geometry must be positive");
    if (finite_width && (!(width > 0) || width_samples < 2))
      throw ConfigError("finite slits need a positive width and at least two samples");
  }
};

struct DoubleSlitCatalog {
  DoubleSlitConfig cfg;
  HamiltonianSpec spec;
  std::vector<Vec> slits;  // point sources, with finite width every sample point
  std::vector<BranchTerm> terms;

  double energy() const { return cfg.p0 * cfg.p0 / (2 * cfg.mass); }

  cplx psi(const Vec& x, double t = 0) const {
    cplx s = 0;
    for (auto& term : terms) s += term.evaluate(x, t, cfg.hbar);
    return s;
  }

  Vec screen_point(double y) const {
    Vec x(3);
    x << cfg.screen_x, y, 0.0;
    return x;
  }

  double screen_intensity(double y) const { return std::norm(psi(screen_point(y))); }

  // phase difference p0 (r1 - r2) / hbar between the point slits at a screen position
  double phase_difference(double y) const {
    Vec x = screen_point(y);
    Vec s1(3), s2(3);
    s1 << 0, cfg.slit_y, 0;
    s2 << 0, -cfg.slit_y, 0;
    return cfg.p0 * ((x - s1).norm() - (x - s2).norm()) / cfg.hbar;
  }
};

namespace detail {

inline BranchTerm cone_term(int id, const Vec& slit, double p0, double mass, double e, cplx weight,
                            const std::string& label) {
  BranchTerm t;
  ActionBranch& b = t.branch;
  b.id = id;
  b.dim = 3;
  b.label = label;
  b.init = InitialCondition::momentum(Vec::Unit(3, 0) * p0);
  b.lineage.push_back({slit, 0.0, BranchCause::slit});
  b.phi = [=](const Vec& x, double t) { return cplx(p0 * (x - slit).norm() - e * t); };
  b.grad_phi = [=](const Vec& x, double) {
    Vec d = x - slit;
    return CVec((p0 / d.norm() * d).cast<cplx>());
  };
  b.laplacian_phi = [=](const Vec& x, double) { return cplx(2 * p0 / (mass * (x - slit).norm())); };
  b.dphi_dt = [=](const Vec&, double) { return cplx(-e); };
  t.sqrt_rho = [=](const Vec& x, double) { return cplx(1.0 / (x - slit).norm()); };
  t.weight = weight;
  t.domain = [](const Vec& x) { return x[0] >= 0; };
  return t;
}

}  // namespace detail

// plane wave for x1 < 0 and one spherical cone per slit point for x1 >= 0
inline DoubleSlitCatalog double_slit_branches(const DoubleSlitConfig& cfg) {
  cfg.validate();
  DoubleSlitCatalog cat;
  cat.cfg = cfg;
  cat.spec = HamiltonianSpec::free_particle(3, cfg.mass, cfg.hbar);
  const double p0 = cfg.p0, e = cat.energy(), m = cfg.mass;

  BranchTerm plane;
  plane.branch.id = 0;
  plane.branch.dim = 3;
  plane.branch.label = "plane";
  plane.branch.init = InitialCondition::momentum(Vec::Unit(3, 0) * p0);
  plane.branch.phi = [=](const Vec& x, double t) { return cplx(p0 * x[0] - e * t); };
  plane.branch.grad_phi = [=](const Vec&, double) { return CVec((Vec::Unit(3, 0) * p0).cast<cplx>()); };
  plane.branch.laplacian_phi = [](const Vec&, double) { return cplx(0); };
  plane.branch.dphi_dt = [=](const Vec&, double) { return cplx(-e); };
  plane.domain = [](const Vec& x) { return x[0] < 0; };
  cat.terms.push_back(plane);

  int id = 1;
  for (double sy : {cfg.slit_y, -cfg.slit_y}) {
    if (!cfg.finite_width) {
      Vec s(3);
      s << 0, sy, 0;
      cat.slits.push_back(s);
      cat.terms.push_back(detail::cone_term(id++, s, p0, m, e, 1.0, "cone"));
      continue;
    }
    const int n = cfg.width_samples;
    for (int k = 0; k < n; ++k) {
      double w = (k == 0 || k == n - 1) ? 0.5 : 1.0;
      w /= double(n - 1);
      Vec s(3);
      s << 0, sy - 0.5 * cfg.width + cfg.width * k / double(n - 1), 0;
      cat.slits.push_back(s);
      cat.terms.push_back(detail::cone_term(id++, s, p0, m, e, w, "cone"));
    }
  }
  return cat;
}

// field of an idealized solenoid along x3 through (c1, c2), flux phi
inline std::function<Vec(const Vec&, double)> solenoid_field(double flux, double c1, double c2) {
  return [=](const Vec& x, double) {
    double dx = x[0] - c1, dy = x[1] - c2;
    double r2 = dx * dx + dy * dy;
    Vec a = Vec::Zero(x.size());
    a[0] = -flux / (2 * pi) * dy / r2;
    a[1] = flux / (2 * pi) * dx / r2;
    return a;
  };
}

// int_a^b A . dl along the straight segment
inline double line_integral(const std::function<Vec(const Vec&, double)>& A, const Vec& a,
                            const Vec& b, double t = 0) {
  const Vec d = b - a;
  auto f = [&](double s) { return A(a + s * d, t).dot(d); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 20, 1e-14);
}

struct AharonovBohmConfig {
  DoubleSlitConfig slit;
  double charge = 1;
  double flux = 1;
  double c1 = 6, c2 = 0;  // solenoid position
};

struct AharonovBohmCatalog {
  DoubleSlitCatalog base;
  HamiltonianSpec spec;
  std::function<Vec(const Vec&, double)> A;
  double charge = 1;
  GaugeReport gauge;

  cplx psi(const Vec& x, double t = 0) const {
    cplx s = 0;
    for (auto& term : base.terms) s += term.evaluate(x, t, base.cfg.hbar);
    return s;
  }

  // Q int_{slit}^{x} A . dl for point slit j
  double arm_phase(std::size_t j, const Vec& x) const {
    return charge * line_integral(A, base.slits[j], x);
  }
};

inline std::vector<Vec> gauge_sample_points(const DoubleSlitConfig& cfg, const Vec& avoid,
                                            double clearance) {
  std::vector<Vec> pts;
  for (int i = 1; i <= 6; ++i)
    for (int j = -6; j <= 6; ++j) {
      Vec x(3);
      x << cfg.screen_x * i / 6.0, 2.0 * cfg.slit_y * j / 6.0, 0.0;
      if (std::hypot(x[0] - avoid[0], x[1] - avoid[1]) > clearance) pts.push_back(x);
    }
  return pts;
}

// cone branches acquire Q int_{x_j}^x A . dl
inline AharonovBohmCatalog aharonov_bohm_branches(const AharonovBohmConfig& cfg,
                                                  std::function<Vec(const Vec&, double)> A) {
  if (!A) A = [](const Vec& x, double) { return Vec(Vec::Zero(x.size())); };
  AharonovBohmCatalog cat;
  cat.base = double_slit_branches(cfg.slit);
  cat.A = A;
  cat.charge = cfg.charge;
  cat.spec = cat.base.spec;
  cat.spec.vector_potential = A;
  cat.spec.charge = Vec::Constant(3, cfg.charge);

  Vec c(3);
  c << cfg.c1, cfg.c2, 0;
  cat.gauge = check_gauge(cat.spec, gauge_sample_points(cfg.slit, c, 1.0));
  if (!cat.gauge.passed) throw GaugeViolation("vector potential fails the Coulomb gauge check");

  const double q = cfg.charge;
  for (auto& term : cat.base.terms) {
    if (term.branch.lineage.empty()) continue;
    const Vec slit = term.branch.lineage.front().location;
    auto phi0 = term.branch.phi;
    auto grad0 = term.branch.grad_phi;
    term.branch.phi = [=](const Vec& x, double t) { return phi0(x, t) + q * line_integral(A, slit, x, t); };
    term.branch.grad_phi = [=](const Vec& x, double t) {
      return CVec(grad0(x, t) + (q * A(x, t)).cast<cplx>());
    };
  }
  return cat;
}

}  // namespace mpw
