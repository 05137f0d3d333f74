#pragma once

#include <string>
#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include "mpw/hj/hamiltonian.hpp"
#include "mpw/wave/field.hpp"

namespace mpw {

enum class Boundary { hard_wall, periodic, absorbing };

inline std::string to_string(Boundary b) {
  switch (b) {
    case Boundary::hard_wall: return "hard_wall";
    case Boundary::periodic: return "periodic";
    case Boundary::absorbing: return "absorbing";
  }
  return "hard_wall";
}

inline Boundary boundary_from_string(const std::string& s) {
  if (s == "hard_wall") return Boundary::hard_wall;
  if (s == "periodic") return Boundary::periodic;
  if (s == "absorbing") return Boundary::absorbing;
  throw ConfigError("unknown boundary '" + s + "'");
}

struct CNConfig {
  double dt = 1e-3;
  Boundary boundary = Boundary::hard_wall;
  double absorber_width = 0;     // length of the ramp inside each wall
  double absorber_strength = 0;  // peak of the -iW mask
  double tol = 1e-14;            // iterative solve, 2D only
  int max_iterations = 2000;
  int snapshot_every = 0;  // 0 keeps only the final state

  void validate() const {
    if (!(dt > 0)) throw ConfigError("CN time step must be positive");
    if (boundary == Boundary::absorbing && (!(absorber_width > 0) || !(absorber_strength > 0)))
      throw ConfigError("absorbing boundary needs a positive width and strength");
    if (!(tol > 0) || max_iterations < 1) throw ConfigError("CN solver limits must be positive");
  }
};

struct CNSeries {
  std::vector<WaveField> snapshots;  // first entry is the initial state
  std::vector<double> norms;         // per step, including the initial state
  WaveField final_state;
  int steps = 0;
  double dt = 0;
};

namespace detail {

// solve a_i x_{i-1} + b_i x_i + c_i x_{i+1} = d_i
inline std::vector<cplx> thomas(const std::vector<cplx>& a, std::vector<cplx> b, const std::vector<cplx>& c,
                                std::vector<cplx> d) {
  const std::size_t n = b.size();
  for (std::size_t i = 1; i < n; ++i) {
    cplx w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    d[i] -= w * d[i - 1];
  }
  std::vector<cplx> x(n);
  x[n - 1] = d[n - 1] / b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
  for (auto& v : x)
    if (!finite(v)) throw SolverDivergence("tridiagonal solve produced non-finite values");
  return x;
}

// cyclic tridiagonal, a_0 couples to x_{n-1} and c_{n-1} to x_0
inline std::vector<cplx> cyclic_thomas(const std::vector<cplx>& a, const std::vector<cplx>& b,
                                       const std::vector<cplx>& c, const std::vector<cplx>& d) {
  const std::size_t n = b.size();
  const cplx alpha = c[n - 1], beta = a[0];
  const cplx gamma = -b[0];
  std::vector<cplx> bb = b, u(n, 0.0);
  bb[0] = b[0] - gamma;
  bb[n - 1] = b[n - 1] - alpha * beta / gamma;
  auto x = thomas(a, bb, c, d);
  u[0] = gamma;
  u[n - 1] = alpha;
  auto z = thomas(a, bb, c, u);
  const cplx f = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
  for (std::size_t i = 0; i < n; ++i) x[i] -= f * z[i];
  return x;
}

struct Stencil {
  std::vector<std::pair<std::size_t, cplx>> off;  // neighbour node and H entry
  cplx diag = 0;
};

// discrete H row by row, Peierls phases on the hoppings, -iW absorber on the diagonal
inline std::vector<Stencil> discrete_hamiltonian(const HamiltonianSpec& spec, const Grid& g, const CNConfig& cfg,
                                                 double t) {
  const int d = g.dim();
  if (d != spec.dim) throw DomainMismatch("grid and Hamiltonian dimensions differ");
  if (d > 2) throw std::invalid_argument("CN oracle supports 1D and 2D grids");
  const Mat m0 = spec.metric_at(g.point(0));
  for (std::size_t probe : {g.size() / 2, g.size() - 1}) {
    if (!(spec.metric_at(g.point(probe)) - m0).isZero(1e-12 * m0.norm()))
      throw std::invalid_argument("CN oracle needs a constant metric");
  }
  if (!(m0 - Mat(m0.diagonal().asDiagonal())).isZero(1e-12 * m0.norm()))
    throw std::invalid_argument("CN oracle needs a diagonal metric");

  const double hb = spec.hbar;
  const Vec q = spec.charge_diag();
  const bool periodic = cfg.boundary == Boundary::periodic;
  std::vector<Stencil> rows(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto mi = g.multi_index(i);
    const Vec x = g.point(i);
    Stencil& r = rows[i];
    r.diag = spec.potential_at(x, t);
    for (int n = 0; n < d; ++n) {
      const double h = g.spacing[n];
      const double c = hb * hb / (2 * m0(n, n) * h * h);
      r.diag += 2 * c;
      const std::size_t len = g.extents[n], st = g.stride(n);
      for (int dir : {1, -1}) {
        std::size_t j;
        if (dir == 1) {
          if (mi[n] + 1 < len) j = i + st;
          else if (periodic) j = i - (len - 1) * st;
          else continue;
        } else {
          if (mi[n] > 0) j = i - st;
          else if (periodic) j = i + (len - 1) * st;
          else continue;
        }
        double theta = 0;
        if (spec.has_vector_potential()) {
          Vec mid = x;
          mid[n] += 0.5 * dir * h;
          theta = -dir * q[n] * spec.vector_potential_at(mid, t)[n] * h / hb;
        }
        r.off.push_back({j, -c * std::exp(I * theta)});
      }
    }
    if (cfg.boundary == Boundary::absorbing) {
      double dist = std::numeric_limits<double>::infinity();
      for (int n = 0; n < d; ++n) {
        const double lo = g.origin[n], hi = g.coord(n, g.extents[n] - 1);
        dist = std::min({dist, x[n] - lo, hi - x[n]});
      }
      if (dist < cfg.absorber_width) {
        const double s = (cfg.absorber_width - dist) / cfg.absorber_width;
        r.diag -= I * cfg.absorber_strength * s * s;
      }
    }
  }
  return rows;
}

inline bool pinned(const Grid& g, std::size_t i, const CNConfig& cfg) {
  return cfg.boundary != Boundary::periodic && g.on_boundary(i);
}

}  // namespace detail

// (1 + i dt H / 2 hbar) psi^{n+1} = (1 - i dt H / 2 hbar) psi^n, H sampled at the half step
inline CNSeries cn_evolve(const HamiltonianSpec& spec, const WaveField& psi0, const CNConfig& cfg, double T) {
  cfg.validate();
  if (psi0.components != 1) throw std::invalid_argument("CN oracle evolves scalar waves");
  if (T < 0) throw std::invalid_argument("evolution time must be non-negative");
  const Grid& g = psi0.grid;
  const int steps = std::max(1, static_cast<int>(std::llround(T / cfg.dt)));
  const double dt = T > 0 ? T / steps : 0.0;
  const std::size_t n = g.size();
  const cplx k = I * dt / (2 * spec.hbar);

  CNSeries out;
  out.dt = dt;
  WaveField psi = psi0;
  psi.hbar = spec.hbar;
  for (std::size_t i = 0; i < n; ++i)
    if (detail::pinned(g, i, cfg)) psi(i) = 0;
  out.snapshots.push_back(psi);
  out.norms.push_back(psi.norm());
  if (T == 0) {
    out.final_state = psi;
    return out;
  }

  for (int s = 0; s < steps; ++s) {
    const double th = psi.time + 0.5 * dt;
    auto rows = detail::discrete_hamiltonian(spec, g, cfg, th);

    std::vector<cplx> rhs(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (detail::pinned(g, i, cfg)) continue;
      cplx hv = rows[i].diag * psi(i);
      for (auto& [j, v] : rows[i].off) hv += v * psi(j);
      rhs[i] = psi(i) - k * hv;
    }

    std::vector<cplx> next(n, 0.0);
    if (g.dim() == 1) {
      std::vector<cplx> a(n, 0.0), b(n, 1.0), c(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        if (detail::pinned(g, i, cfg)) continue;
        b[i] = 1.0 + k * rows[i].diag;
        for (auto& [j, v] : rows[i].off) {
          const bool up = (j == i + 1) || (i == n - 1 && j == 0);
          (up ? c[i] : a[i]) = k * v;
        }
      }
      if (cfg.boundary == Boundary::periodic) {
        next = detail::cyclic_thomas(a, b, c, rhs);
      } else {
        for (std::size_t i = 0; i < n; ++i) {
          if (i > 0 && detail::pinned(g, i - 1, cfg)) a[i] = 0;
          if (i + 1 < n && detail::pinned(g, i + 1, cfg)) c[i] = 0;
        }
        next = detail::thomas(a, b, c, rhs);
      }
    } else {
      std::vector<Eigen::Triplet<cplx>> trip;
      for (std::size_t i = 0; i < n; ++i) {
        if (detail::pinned(g, i, cfg)) {
          trip.emplace_back(i, i, 1.0);
          continue;
        }
        trip.emplace_back(i, i, 1.0 + k * rows[i].diag);
        for (auto& [j, v] : rows[i].off)
          if (!detail::pinned(g, j, cfg)) trip.emplace_back(i, j, k * v);
      }
      Eigen::SparseMatrix<cplx> A(n, n);
      A.setFromTriplets(trip.begin(), trip.end());
      Eigen::BiCGSTAB<Eigen::SparseMatrix<cplx>> solver;
      solver.setTolerance(cfg.tol);
      solver.setMaxIterations(cfg.max_iterations);
      solver.compute(A);
      Eigen::Map<const CVec> b(rhs.data(), n);
      Eigen::Map<CVec> x0(psi.values.data(), n);
      CVec x = solver.solveWithGuess(b, x0);
      if (solver.info() != Eigen::Success && solver.error() > 1e3 * cfg.tol)
        throw SolverDivergence("BiCGSTAB did not reach the configured tolerance");
      for (std::size_t i = 0; i < n; ++i) next[i] = x[i];
    }

    for (std::size_t i = 0; i < n; ++i) {
      if (!finite(next[i])) throw SolverDivergence("CN step produced non-finite values");
      psi(i) = next[i];
    }
    psi.time += dt;
    out.norms.push_back(psi.norm());
    if (cfg.snapshot_every > 0 && (s + 1) % cfg.snapshot_every == 0) out.snapshots.push_back(psi);
  }
  out.steps = steps;
  out.final_state = psi;
  return out;
}

// sqrt(M / (2 pi i hbar t))^N exp(i M |x - x_o|^2 / (2 hbar t))
inline cplx free_kernel(const Vec& x, const Vec& x0, double t, double mass = 1, double hbar = 1) {
  if (!(t > 0)) throw std::invalid_argument("free kernel needs t > 0");
  const cplx pre = std::sqrt(mass / (2 * pi * I * hbar * t));
  return std::pow(pre, double(x.size())) * std::exp(I * mass * (x - x0).squaredNorm() / (2 * hbar * t));
}

inline cplx free_kernel(double x, double x0, double t, double mass = 1, double hbar = 1) {
  return free_kernel(Vec::Constant(1, x), Vec::Constant(1, x0), t, mass, hbar);
}

enum class CompareMode { strict, phase_invariant };

// ||a - b|| / ||b||, or its minimum over a global phase on b
inline double compare_l2(const WaveField& a, const WaveField& b, CompareMode mode) {
  const cplx ab = b.inner(a);
  const double na = a.norm2(), nb = b.norm2();
  if (!(nb > 0)) throw std::invalid_argument("reference wave has zero norm");
  double d2;
  if (mode == CompareMode::strict) {
    d2 = na + nb - 2 * ab.real();
  } else {
    d2 = na + nb - 2 * std::abs(ab);
  }
  return std::sqrt(std::max(0.0, d2) / nb);
}

// |<a, b>|^2 / (||a||^2 ||b||^2)
inline double fidelity(const WaveField& a, const WaveField& b) {
  return std::norm(a.inner(b)) / (a.norm2() * b.norm2());
}

template <class F>
WaveField sample_wave(const Grid& g, F&& f, double t = 0, double hbar = 1) {
  WaveField w(g, 1, t, hbar);
  for (std::size_t i = 0; i < g.size(); ++i) w(i) = f(g.point(i));
  return w;
}

}  // namespace mpw
