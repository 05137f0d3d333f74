#pragma once

#include <vector>

#include "mpw/hj/branch.hpp"
#include "mpw/hj/hamiltonian.hpp"

namespace mpw {

struct StencilOptions {
  double h = 1e-3;
  std::function<bool(const Vec&)> domain;  // empty means unbounded
  bool one_sided = false;
};

namespace detail {

inline double sqrt_det(const HamiltonianSpec& spec, const Vec& x) {
  return std::sqrt(spec.metric_at(x).determinant());
}

// divergence (1/sqrt g) d_n (sqrt g W_n) with W = M^{-1} G, G sampled at half points
template <class G>
cplx metric_divergence(const HamiltonianSpec& spec, G&& covector, const Vec& x, double h) {
  cplx acc = 0;
  for (int n = 0; n < spec.dim; ++n) {
    Vec up = x, dn = x;
    up[n] += 0.5 * h;
    dn[n] -= 0.5 * h;
    auto flux = [&](const Vec& y) {
      Mat m = spec.metric_at(y);
      CVec w = m.cast<cplx>().ldlt().solve(covector(y));
      return std::sqrt(m.determinant()) * w[n];
    };
    acc += (flux(up) - flux(dn)) / h;
  }
  return acc / sqrt_det(spec, x);
}

inline std::vector<Vec> stencil_points(const Vec& x, double h) {
  std::vector<Vec> pts;
  int d = static_cast<int>(x.size());
  for (int n = 0; n < d; ++n)
    for (double sn : {-0.5, 0.5})
      for (int m = 0; m < d; ++m)
        for (double sm : {-0.5, 0.5}) {
          Vec y = x;
          y[n] += sn * h;
          y[m] += sm * h;
          pts.push_back(y);
        }
  return pts;
}

inline bool stencil_inside(const Vec& x, const StencilOptions& opt) {
  if (!opt.domain) return true;
  for (auto& y : stencil_points(x, opt.h))
    if (!opt.domain(y)) return false;
  return true;
}

}  // namespace detail

// Laplace-Beltrami of a scalar field at fixed time
template <class F>
cplx laplace_beltrami(const HamiltonianSpec& spec, F&& f, const Vec& x,
                      const StencilOptions& opt = {}) {
  if (x.size() != spec.dim) throw std::invalid_argument("point dimension does not match Hamiltonian");
  const double h = opt.h;
  auto grad = [&](const Vec& y) {
    CVec g(spec.dim);
    for (int m = 0; m < spec.dim; ++m) {
      Vec a = y, b = y;
      a[m] += 0.5 * h;
      b[m] -= 0.5 * h;
      g[m] = (cplx(f(a)) - cplx(f(b))) / h;
    }
    return g;
  };
  auto direct = [&](const Vec& y) { return detail::metric_divergence(spec, grad, y, h); };

  if (detail::stencil_inside(x, opt)) return direct(x);
  if (!opt.one_sided) throw StencilOutOfDomain("stencil leaves the domain");

  for (int n = 0; n < spec.dim; ++n)
    for (double dir : {1.0, -1.0}) {
      Vec s = Vec::Zero(spec.dim);
      s[n] = 2 * h * dir;
      if (detail::stencil_inside(x + s, opt) && detail::stencil_inside(x + 2 * s, opt))
        return 2.0 * direct(x + s) - direct(x + 2 * s);
    }
  throw StencilOutOfDomain("no one-sided stencil fits inside the domain");
}

inline cplx laplace_beltrami(const HamiltonianSpec& spec, const ActionBranch& b, const Vec& x,
                             double t, const StencilOptions& opt = {}) {
  if (b.laplacian_phi) return b.laplacian_phi(x, t);
  return laplace_beltrami(spec, [&](const Vec& y) { return b.phi(y, t); }, x, opt);
}

// dphi/dt + H(x, grad phi, t)
inline cplx hj_residual(const HamiltonianSpec& spec, const ActionBranch& b, const Vec& x, double t,
                        double h = 1e-5) {
  return b.time_derivative(x, t, h) + spec.hamiltonian(x, b.gradient(x, t, h), t);
}

struct GaugeReport {
  std::vector<double> divergence;
  double max_abs = 0;
  bool passed = true;
};

// Coulomb-gauge check: div_M A at the sample points
inline GaugeReport check_gauge(const HamiltonianSpec& spec, const std::vector<Vec>& points,
                               double t = 0, double tol = 1e-8, double h = 1e-4) {
  GaugeReport r;
  for (auto& x : points) {
    cplx d = detail::metric_divergence(
        spec, [&](const Vec& y) { return CVec(spec.vector_potential_at(y, t).cast<cplx>()); }, x, h);
    r.divergence.push_back(std::abs(d));
    r.max_abs = std::max(r.max_abs, std::abs(d));
  }
  r.passed = r.max_abs <= tol;
  return r;
}

inline void require_gauge(const HamiltonianSpec& spec, const std::vector<Vec>& points,
                          double t = 0, double tol = 1e-8) {
  auto r = check_gauge(spec, points, t, tol);
  if (!r.passed)
    throw GaugeViolation("vector potential divergence " + std::to_string(r.max_abs) +
                         " exceeds tolerance");
}

}  // namespace mpw
