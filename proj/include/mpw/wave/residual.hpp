#pragma once

#include <optional>
#include <vector>

#include "mpw/hj/hamiltonian.hpp"
#include "mpw/wave/field.hpp"

namespace mpw {

struct ResidualOptions {
  std::vector<Vec> branch_points;
  double exclusion_cells = 3.0;
  double delta = 1e-12;                     // relative to max |psi|
  std::optional<double> stencil_tolerance;  // GridTooCoarse above this
};

struct ResidualReport {
  std::vector<cplx> residual;  // zero at excluded nodes
  std::vector<bool> included;
  double max_rel = 0;
  double l2_rel = 0;
  std::size_t excluded_nodes = 0;
  double stencil_error = 0;
  Grid grid;
};

namespace detail {

struct ResidualCore {
  std::vector<cplx> r;
  std::vector<bool> ok;
};

inline ResidualCore residual_core(const HamiltonianSpec& spec, const WaveField& psi,
                                  const WaveField& dpsi, std::size_t stride_mult,
                                  const ResidualOptions& opt) {
  const Grid& g = psi.grid;
  const int d = g.dim();
  const std::size_t s = stride_mult;
  const double hb = spec.hbar;
  const cplx hbi = hb / I;
  const Vec q = spec.charge_diag();
  const double r_excl = opt.exclusion_cells * g.max_spacing();
  const double t = psi.time;

  ResidualCore out{std::vector<cplx>(g.size() * psi.components, 0.0),
                   std::vector<bool>(g.size(), false)};

  for (std::size_t i = 0; i < g.size(); ++i) {
    auto m = g.multi_index(i);
    bool inside = true;
    for (int n = 0; n < d; ++n) inside = inside && m[n] >= s && m[n] + s < g.extents[n];
    if (!inside || psi.flagged.count(i)) continue;
    Vec x = g.point(i);
    bool near = false;
    for (auto& b : opt.branch_points) near = near || (x - b).norm() <= r_excl;
    if (near) continue;
    bool nb_flagged = false;
    for (int n = 0; n < d; ++n) {
      std::size_t st = g.stride(n) * s;
      nb_flagged = nb_flagged || psi.flagged.count(i + st) || psi.flagged.count(i - st);
    }
    if (nb_flagged) continue;

    Mat m0 = spec.metric_at(x);
    if (!(m0 - Mat(m0.diagonal().asDiagonal())).isZero(1e-14 * m0.norm()))
      throw std::invalid_argument("grid residual requires a diagonal metric");
    const double sg0 = std::sqrt(m0.determinant());
    const Vec a0 = spec.vector_potential_at(x, t);
    const double v0 = spec.potential_at(x, t);

    for (int c = 0; c < psi.components; ++c) {
      cplx div = 0, cross = 0;
      const cplx p0 = psi(i, c);
      for (int n = 0; n < d; ++n) {
        const double hn = g.spacing[n] * double(s);
        const std::size_t st = g.stride(n) * s;
        const cplx pp = psi(i + st, c), pm = psi(i - st, c);
        auto flux = [&](const Vec& xh, cplx a, cplx b) {
          Mat mh = spec.metric_at(xh);
          double an = spec.has_vector_potential() ? spec.vector_potential_at(xh, t)[n] : 0.0;
          return std::sqrt(mh.determinant()) / mh(n, n) *
                 (hbi * (b - a) / hn - q[n] * an * 0.5 * (a + b));
        };
        Vec xp = x, xm = x;
        xp[n] += 0.5 * hn;
        xm[n] -= 0.5 * hn;
        div += (flux(xp, p0, pp) - flux(xm, pm, p0)) / hn;
        if (spec.has_vector_potential()) {
          cplx cent = hbi * (pp - pm) / (2 * hn) - q[n] * a0[n] * p0;
          cross += q[n] * a0[n] * cent / m0(n, n);
        }
      }
      div /= sg0;
      out.r[i * psi.components + c] = hbi * dpsi(i, c) + 0.5 * (hbi * div - cross) + v0 * p0;
    }
    out.ok[i] = true;
  }
  return out;
}

}  // namespace detail

// (hbar/i) dpsi/dt + 1/2 ((hbar/i) grad - QA) . M^{-1} ((hbar/i) grad - QA) psi + V psi
inline ResidualReport schrodinger_residual(const HamiltonianSpec& spec, const WaveField& psi,
                                           const WaveField& dpsi_dt,
                                           const ResidualOptions& opt = {}) {
  if (!psi.grid.same_as(dpsi_dt.grid) || psi.components != dpsi_dt.components)
    throw GridMismatch("time derivative lives on a different grid");
  if (psi.grid.dim() != spec.dim) throw DomainMismatch("grid dimension does not match Hamiltonian");

  auto core = detail::residual_core(spec, psi, dpsi_dt, 1, opt);
  ResidualReport rep;
  rep.grid = psi.grid;
  rep.residual = core.r;
  rep.included = core.ok;

  double amax = 0;
  for (auto& v : psi.values) amax = std::max(amax, std::abs(v));
  const double delta = opt.delta * amax;
  double num = 0, den = 0;
  for (std::size_t i = 0; i < psi.grid.size(); ++i) {
    if (!core.ok[i]) {
      ++rep.excluded_nodes;
      continue;
    }
    double w = psi.grid.weight(i);
    for (int c = 0; c < psi.components; ++c) {
      double r = std::abs(core.r[i * psi.components + c]);
      double a = std::abs(psi(i, c));
      rep.max_rel = std::max(rep.max_rel, r / (a + delta));
      num += w * r * r;
      den += w * a * a;
    }
  }
  rep.l2_rel = den > 0 ? std::sqrt(num / den) : 0.0;

  if (opt.stencil_tolerance) {
    auto coarse = detail::residual_core(spec, psi, dpsi_dt, 2, opt);
    double est = 0;
    for (std::size_t i = 0; i < psi.grid.size(); ++i) {
      if (!coarse.ok[i] || !core.ok[i]) continue;
      for (int c = 0; c < psi.components; ++c) {
        std::size_t k = i * psi.components + c;
        est = std::max(est, std::abs(coarse.r[k] - core.r[k]) / 3.0 /
                                (std::abs(psi(i, c)) + delta));
      }
    }
    rep.stencil_error = est;
    if (est > *opt.stencil_tolerance)
      throw GridTooCoarse("stencil error estimate " + std::to_string(est) + " exceeds tolerance");
  }
  return rep;
}

// time derivative from three equally spaced slices
inline ResidualReport schrodinger_residual(const HamiltonianSpec& spec, const WaveField& prev,
                                           const WaveField& cur, const WaveField& next, double dt,
                                           const ResidualOptions& opt = {}) {
  if (!prev.grid.same_as(cur.grid) || !next.grid.same_as(cur.grid))
    throw GridMismatch("time slices live on different grids");
  WaveField d = cur;
  for (std::size_t k = 0; k < d.values.size(); ++k)
    d.values[k] = (next.values[k] - prev.values[k]) / (2 * dt);
  return schrodinger_residual(spec, cur, d, opt);
}

// psi given as a callable; time derivative by Richardson-extrapolated central differences
inline ResidualReport schrodinger_residual(const HamiltonianSpec& spec,
                                           const std::function<cplx(const Vec&, double)>& psi,
                                           const Grid& grid, double t,
                                           const ResidualOptions& opt = {}, double dt = 1e-3) {
  WaveField cur(grid, 1, t, spec.hbar), d(grid, 1, t, spec.hbar);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Vec x = grid.point(i);
    cur(i) = psi(x, t);
    if (!finite(cur(i))) {
      cur(i) = 0;
      cur.flagged.insert(i);
      continue;
    }
    cplx d1 = (psi(x, t + dt) - psi(x, t - dt)) / (2 * dt);
    cplx d2 = (psi(x, t + 0.5 * dt) - psi(x, t - 0.5 * dt)) / dt;
    d(i) = (4.0 * d2 - d1) / 3.0;
  }
  return schrodinger_residual(spec, cur, d, opt);
}

}  // namespace mpw
