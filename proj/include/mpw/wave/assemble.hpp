#pragma once

#include <vector>

#include "mpw/hj/branch.hpp"
#include "mpw/wave/field.hpp"

namespace mpw {

struct AssembleOptions {
  double hbar = 1.0;
  bool normalize = false;
  std::vector<Vec> branch_points;  // nodes within exclusion_cells * h are skipped
  double exclusion_cells = 0.0;
};

// psi(x,t) = sum_j weight_j sqrt(rho_j) exp(i phi_j / hbar)
inline WaveField assemble_wave(const std::vector<BranchTerm>& terms, const Grid& grid, double t,
                               const AssembleOptions& opt = {}) {
  if (terms.empty()) throw EmptyBranchSet("no branch terms to assemble");
  int comps = 1;
  for (auto& term : terms) {
    if (term.branch.dim != grid.dim())
      throw DomainMismatch("branch dimension does not match the grid");
    if (term.component < 0) throw std::invalid_argument("negative component index");
    comps = std::max(comps, term.component + 1);
  }

  WaveField w(grid, comps, t, opt.hbar);
  const double r_excl = opt.exclusion_cells * grid.max_spacing();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Vec x = grid.point(i);
    bool skip = false;
    for (auto& b : opt.branch_points) skip = skip || (x - b).norm() <= r_excl;
    if (skip) {
      w.flagged.insert(i);
      continue;
    }
    for (auto& term : terms) {
      cplx v = term.evaluate(x, t, opt.hbar);
      if (!finite(v)) {
        w.flagged.insert(i);
        for (int c = 0; c < comps; ++c) w(i, c) = 0;
        break;
      }
      w(i, term.component) += v;
    }
  }
  if (opt.normalize) w = w.normalized_copy();
  return w;
}

// pointwise evaluation without a grid
inline cplx evaluate_wave(const std::vector<BranchTerm>& terms, const Vec& x, double t,
                          double hbar = 1.0, int component = 0) {
  if (terms.empty()) throw EmptyBranchSet("no branch terms to evaluate");
  cplx s = 0;
  for (auto& term : terms)
    if (term.component == component) s += term.evaluate(x, t, hbar);
  return s;
}

// Kernel contribution of one branch.
// Point-source branches (x_o given) carry the delta-normalized amplitude, so K = sqrt(rho) e^{i phi/hbar}.
// Momentum branches are divided by their initial wave: K = sqrt(rho/rho_o) e^{i(phi - phi_o)/hbar}.
inline cplx feynman_kernel(const BranchTerm& term, const Vec& x, const Vec& x_o, double t,
                           double hbar = 1.0) {
  if (term.branch.init.from_point()) return term.evaluate(x, t, hbar);
  cplx a0 = term.sqrt_rho ? term.sqrt_rho(x_o, 0.0) : cplx(1.0);
  if (std::abs(a0) == 0) throw ZeroInitialDensity("initial density vanishes at x_o");
  cplx a = term.sqrt_rho ? term.sqrt_rho(x, t) : cplx(1.0);
  return term.weight * (a / a0) *
         std::exp(I * (term.branch.phi(x, t) - term.branch.phi(x_o, 0.0)) / hbar);
}

inline cplx feynman_kernel(const std::vector<BranchTerm>& terms, const Vec& x, const Vec& x_o,
                           double t, double hbar = 1.0) {
  if (terms.empty()) throw EmptyBranchSet("no branch terms for the kernel");
  cplx s = 0;
  for (auto& term : terms) s += feynman_kernel(term, x, x_o, t, hbar);
  return s;
}

}  // namespace mpw
