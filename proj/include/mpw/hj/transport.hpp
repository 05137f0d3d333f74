#pragma once

#include <optional>
#include <vector>

#include "mpw/hj/characteristic.hpp"
#include "mpw/hj/operators.hpp"

namespace mpw {

struct TransportOptions {
  std::optional<HamiltonianSpec> spec;  // needed when the branch has no analytic Laplacian
  StencilOptions stencil{};
  double caustic_threshold = 0.5;       // |lap phi| * dt on both sides of a sign flip
};

struct Caustic {
  double t = 0;
  double residue = 0;
  std::size_t after_sample = 0;
};

namespace detail {

// exact integral over [a,b] of the cubic through (ts[i], fs[i])
inline cplx cubic_segment(const double* ts, const cplx* fs, int n, double a, double b) {
  double span = b - a;
  for (int i = 0; i < n; ++i) span = std::max(span, std::abs(ts[i] - a));
  Mat v(n, n);
  CVec rhs(n);
  for (int i = 0; i < n; ++i) {
    double u = (ts[i] - a) / span;
    for (int j = 0; j < n; ++j) v(i, j) = std::pow(u, j);
    rhs[i] = fs[i];
  }
  CVec c = v.cast<cplx>().fullPivLu().solve(rhs);
  const double e = (b - a) / span;
  cplx acc = 0;
  for (int j = n - 1; j >= 0; --j) acc = acc * e + c[j] / double(j + 1);
  return span * e * acc;
}

// cumulative integral of samples f over t, fourth order
inline std::vector<cplx> cumulative_integral(const std::vector<double>& t,
                                             const std::vector<cplx>& f) {
  const std::size_t n = t.size();
  std::vector<cplx> out(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (t[k + 1] == t[k]) {
      out[k + 1] = out[k];
      continue;
    }
    int m = static_cast<int>(std::min<std::size_t>(4, n));
    long lo = static_cast<long>(k) - 1;
    lo = std::max(0L, std::min(lo, static_cast<long>(n) - m));
    double ts[4];
    cplx fs[4];
    int used = 0;
    for (int i = 0; i < m; ++i) {
      std::size_t j = lo + i;
      bool dup = false;
      for (int q = 0; q < used; ++q) dup = dup || ts[q] == t[j];
      if (dup) continue;
      ts[used] = t[j];
      fs[used] = f[j];
      ++used;
    }
    out[k + 1] = out[k] + cubic_segment(ts, fs, used, t[k], t[k + 1]);
  }
  return out;
}

inline std::vector<Caustic> find_caustics(const std::vector<double>& t,
                                          const std::vector<cplx>& lap, double threshold) {
  std::vector<Caustic> out;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    double dt = t[k + 1] - t[k];
    if (dt <= 0) continue;
    double a = lap[k].real(), b = lap[k + 1].real();
    if (a * b >= 0) continue;
    if (std::min(std::abs(lap[k]), std::abs(lap[k + 1])) * dt < threshold) continue;
    cplx ua = 1.0 / lap[k], ub = 1.0 / lap[k + 1];
    double slope = (ub - ua).real() / dt;
    double tc = t[k] - ua.real() / slope;
    double res = 1.0 / slope;
    if (std::abs(res - std::round(res)) < 0.05) res = std::round(res);
    out.push_back({tc, res, k + 1});
  }
  return out;
}

}  // namespace detail

// sqrt(rho) along the path: sqrt(rho0) exp(-1/2 int lap phi), -i0 continuation through caustics
inline PathTrajectory transport_density(const ActionBranch& branch, PathTrajectory traj, cplx rho0,
                                        const TransportOptions& opt = {}) {
  if (traj.samples.empty()) return traj;
  if (!branch.laplacian_phi && !opt.spec)
    throw std::invalid_argument("branch has no analytic Laplacian and no Hamiltonian was given");

  const std::size_t n = traj.samples.size();
  std::vector<double> t(n);
  std::vector<cplx> lap(n);
  for (std::size_t k = 0; k < n; ++k) {
    auto& s = traj.samples[k];
    t[k] = s.t;
    lap[k] = branch.laplacian_phi ? branch.laplacian_phi(s.x, s.t)
                                  : laplace_beltrami(*opt.spec, branch, s.x, s.t, opt.stencil);
    if (!finite(lap[k])) throw CausticTime("Laplacian of the action is singular at a sample");
  }

  auto caustics = detail::find_caustics(t, lap, opt.caustic_threshold);
  std::vector<cplx> smooth(lap);
  for (std::size_t k = 0; k < n; ++k)
    for (auto& c : caustics) smooth[k] -= c.residue / (t[k] - c.t);

  auto integral = detail::cumulative_integral(t, smooth);
  const cplx root0 = std::sqrt(rho0);
  for (std::size_t k = 0; k < n; ++k) {
    cplx total = integral[k];
    for (auto& c : caustics) {
      total += c.residue * std::log(std::abs((t[k] - c.t) / (t[0] - c.t)));
      if (t[k] > c.t) total += I * pi * c.residue;
    }
    traj.samples[k].sqrt_rho = root0 * std::exp(-0.5 * total);
  }

  for (auto& c : caustics) {
    TrajectoryEvent ev;
    ev.kind = EventKind::caustic;
    ev.t = c.t;
    ev.sample = c.after_sample;
    ev.x = traj.samples[c.after_sample].x;
    traj.events.push_back(ev);
  }
  return traj;
}

}  // namespace mpw
