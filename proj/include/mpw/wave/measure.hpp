#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "mpw/wave/field.hpp"

namespace mpw {

struct DensityMatrix {
  Grid grid;
  int components = 1;
  std::vector<double> diagonal;  // sum_eps p_eps |psi_eps|^2 per node
  std::optional<CMat> full;      // sum_eps p_eps psi psi^dagger (node*component index)

  double trace() const {
    double s = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) s += grid.weight(i) * diagonal[i];
    return s;
  }
};

struct EnsembleMember {
  WaveField psi;
  double probability = 1;
};

inline DensityMatrix density_matrix(const std::vector<EnsembleMember>& ensemble,
                                    bool full = false) {
  if (ensemble.empty()) throw std::invalid_argument("empty ensemble");
  double psum = 0;
  for (auto& e : ensemble) {
    if (e.probability < 0) throw std::invalid_argument("negative ensemble probability");
    psum += e.probability;
    if (!e.psi.grid.same_as(ensemble[0].psi.grid) ||
        e.psi.components != ensemble[0].psi.components)
      throw GridMismatch("ensemble members live on different grids");
  }
  if (std::abs(psum - 1) > 1e-12) throw std::invalid_argument("ensemble probabilities must sum to 1");

  DensityMatrix rho;
  rho.grid = ensemble[0].psi.grid;
  rho.components = ensemble[0].psi.components;
  const std::size_t n = rho.grid.size();
  rho.diagonal.assign(n, 0.0);
  if (full) rho.full = CMat::Zero(n * rho.components, n * rho.components);
  for (auto& e : ensemble) {
    WaveField w = e.psi.normalized_copy();
    for (std::size_t i = 0; i < n; ++i) rho.diagonal[i] += e.probability * w.abs2(i);
    if (full) {
      Eigen::Map<const CVec> v(w.values.data(), static_cast<Eigen::Index>(w.values.size()));
      *rho.full += e.probability * v * v.adjoint();
    }
  }
  return rho;
}

struct NormDrift {
  std::vector<double> norms;
  double max_drift = 0;
  bool flagged = false;
};

inline NormDrift check_norm_conservation(const std::vector<WaveField>& series, double tol = 1e-10) {
  NormDrift r;
  if (series.empty()) return r;
  for (auto& w : series) r.norms.push_back(w.norm());
  for (double n : r.norms) r.max_drift = std::max(r.max_drift, std::abs(n - r.norms[0]) / r.norms[0]);
  r.flagged = r.max_drift > tol;
  return r;
}

struct MeasurementOperator {
  enum class Kind { position, fourier, matrix };
  Kind kind = Kind::position;
  Grid grid;
  double hbar = 1;
  CMat u;                     // matrix kind only
  std::vector<Vec> outcomes;  // one per row of U

  static MeasurementOperator position(const Grid& g) {
    MeasurementOperator m;
    m.kind = Kind::position;
    m.grid = g;
    for (std::size_t i = 0; i < g.size(); ++i) m.outcomes.push_back(g.point(i));
    return m;
  }

  // U(m,k) = exp(-i y_m x_k / hbar) / sqrt(n), y_m = 2 pi hbar m / (n h), m centred
  static MeasurementOperator fourier(const Grid& g, double hbar = 1.0) {
    if (g.dim() != 1) throw std::invalid_argument("Fourier measurement is one-dimensional");
    MeasurementOperator m;
    m.kind = Kind::fourier;
    m.grid = g;
    m.hbar = hbar;
    const long n = static_cast<long>(g.size());
    for (long j = 0; j < n; ++j) {
      Vec y(1);
      y[0] = 2 * pi * hbar * double(j - n / 2) / (double(n) * g.spacing[0]);
      m.outcomes.push_back(y);
    }
    return m;
  }

  static MeasurementOperator matrix(const Grid& g, CMat u, std::vector<double> y) {
    if (u.rows() != u.cols() || std::size_t(u.rows()) != g.size() || y.size() != g.size())
      throw std::invalid_argument("measurement matrix does not match the grid");
    MeasurementOperator m;
    m.kind = Kind::matrix;
    m.grid = g;
    m.u = std::move(u);
    for (double v : y) m.outcomes.push_back(Vec::Constant(1, v));
    return m;
  }

  cplx entry(std::size_t row, std::size_t col) const {
    switch (kind) {
      case Kind::position:
        return row == col ? 1.0 : 0.0;
      case Kind::fourier:
        return std::exp(-I * outcomes[row][0] * grid.coord(0, col) / hbar) /
               std::sqrt(double(grid.size()));
      default:
        return u(row, col);
    }
  }

  CVec apply(const CVec& v) const {
    const std::size_t n = grid.size();
    if (std::size_t(v.size()) != n) throw GridMismatch("vector does not match the grid");
    if (kind == Kind::position) return v;
    if (kind == Kind::matrix) return u * v;
    CVec out(n);
    for (std::size_t r = 0; r < n; ++r) {
      cplx s = 0;
      for (std::size_t c = 0; c < n; ++c) s += entry(r, c) * v[c];
      out[r] = s;
    }
    return out;
  }

  std::size_t nearest_outcome(const Vec& y) const {
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < outcomes.size(); ++k) {
      double d = (outcomes[k] - y).norm();
      if (d < bd) {
        bd = d;
        best = k;
      }
    }
    // outside the outcome range by more than half a spacing
    if (outcomes.size() > 1) {
      for (int a = 0; a < y.size(); ++a) {
        double lo = outcomes.front()[a], hi = outcomes.front()[a];
        for (auto& o : outcomes) {
          lo = std::min(lo, o[a]);
          hi = std::max(hi, o[a]);
        }
        double sp = kind == Kind::position ? grid.spacing[a]
                                           : (hi - lo) / double(outcomes.size() - 1);
        if (kind == Kind::matrix) {
          std::vector<double> ys;
          for (auto& o : outcomes) ys.push_back(o[a]);
          std::sort(ys.begin(), ys.end());
          sp = 0;
          for (std::size_t k = 1; k < ys.size(); ++k) sp = std::max(sp, ys[k] - ys[k - 1]);
        }
        if (y[a] < lo - 0.5 * sp || y[a] > hi + 0.5 * sp)
          throw OutcomeOutOfRange("outcome lies outside the measurement range");
      }
    }
    return best;
  }
};

// project onto the outcome nearest y and renormalize
inline WaveField collapse(const WaveField& psi, const MeasurementOperator& op, const Vec& y) {
  if (!psi.grid.same_as(op.grid)) throw GridMismatch("measurement grid differs from the wave grid");
  const std::size_t m = op.nearest_outcome(y);
  const std::size_t n = psi.grid.size();
  WaveField out(psi.grid, psi.components, psi.time, psi.hbar);
  for (int c = 0; c < psi.components; ++c) {
    cplx amp = 0;
    for (std::size_t k = 0; k < n; ++k) amp += op.entry(m, k) * psi(k, c);
    for (std::size_t k = 0; k < n; ++k) out(k, c) = std::conj(op.entry(m, k)) * amp;
  }
  if (!(out.norm() > 0)) throw std::invalid_argument("collapsed wave vanishes");
  return out.normalized_copy();
}

// energy collapse from an equally spaced time series
inline WaveField collapse_temporal(const std::vector<WaveField>& series, double energy) {
  if (series.size() < 2) throw std::invalid_argument("time series needs at least two slices");
  const std::size_t nt = series.size();
  const double dt = series[1].time - series[0].time;
  for (std::size_t k = 1; k < nt; ++k) {
    if (!series[k].grid.same_as(series[0].grid)) throw GridMismatch("slices live on different grids");
    if (std::abs(series[k].time - series[k - 1].time - dt) > 1e-9 * std::abs(dt))
      throw std::invalid_argument("time series must be equally spaced");
  }
  const double hb = series[0].hbar;
  const double de = 2 * pi * hb / (double(nt) * dt);
  const long j = std::lround(energy / de);
  if (j < -long(nt) / 2 || j >= long(nt) - long(nt) / 2)
    throw OutcomeOutOfRange("energy lies outside the resolvable band");
  const double e = de * double(j);
  WaveField out(series[0].grid, series[0].components, series[0].time, hb);
  for (std::size_t k = 0; k < nt; ++k) {
    cplx ph = std::exp(I * e * (series[k].time - series[0].time) / hb);
    for (std::size_t v = 0; v < out.values.size(); ++v) out.values[v] += ph * series[k].values[v];
  }
  if (!(out.norm() > 0)) throw std::invalid_argument("no weight at this energy");
  return out.normalized_copy();
}

// trapezoid integral of a nodal density over the box [lo, hi]
inline double born_probability(const Grid& g, const std::vector<double>& density, const Vec& lo,
                               const Vec& hi) {
  if (density.size() != g.size()) throw GridMismatch("density does not match the grid");
  const int d = g.dim();
  std::vector<long> a(d), b(d);
  for (int n = 0; n < d; ++n) {
    const double eps = 1e-9 * g.spacing[n];
    a[n] = std::max(0L, long(std::ceil((lo[n] - g.origin[n] - eps) / g.spacing[n])));
    b[n] = std::min(long(g.extents[n]) - 1, long(std::floor((hi[n] - g.origin[n] + eps) / g.spacing[n])));
    if (b[n] < a[n]) return 0.0;
  }
  double s = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto m = g.multi_index(i);
    double w = 1;
    for (int n = 0; n < d && w != 0; ++n) {
      long k = long(m[n]);
      if (k < a[n] || k > b[n]) {
        w = 0;
      } else if (a[n] == b[n]) {
        w = 0;
      } else {
        w *= ((k == a[n] || k == b[n]) ? 0.5 : 1.0) * g.spacing[n];
      }
    }
    s += w * density[i];
  }
  return s;
}

inline double born_probability(const DensityMatrix& rho, const Vec& lo, const Vec& hi) {
  return born_probability(rho.grid, rho.diagonal, lo, hi);
}

inline double born_probability(const WaveField& psi, const Vec& lo, const Vec& hi) {
  std::vector<double> dens(psi.grid.size());
  double n2 = psi.norm2();
  for (std::size_t i = 0; i < dens.size(); ++i) dens[i] = psi.abs2(i) / n2;
  return born_probability(psi.grid, dens, lo, hi);
}

struct QuantizationProblem {
  std::function<double(double)> phi;  // closed-path action as a function of the parameter
  double hbar = 1;
  double lo = 0, hi = 1;
  long min_k = 1;
};

struct QuantizedRoot {
  long k = 0;
  double parameter = 0;
};

// all roots of phi(w)/hbar = 2 pi k inside [lo, hi]
inline std::vector<QuantizedRoot> quantize(const QuantizationProblem& pb) {
  if (!(pb.hi > pb.lo)) throw std::invalid_argument("empty quantization interval");
  auto g = [&](double w) { return pb.phi(w) / (2 * pi * pb.hbar); };
  double ga = g(pb.lo), gb = g(pb.hi);
  if (!std::isfinite(ga) || !std::isfinite(gb)) throw std::invalid_argument("action not finite on interval");
  long k0 = long(std::ceil(std::min(ga, gb))), k1 = long(std::floor(std::max(ga, gb)));
  k0 = std::max(k0, pb.min_k);
  std::vector<QuantizedRoot> out;
  for (long k = k0; k <= k1; ++k) {
    auto f = [&](double w) { return g(w) - double(k); };
    double fa = f(pb.lo), fb = f(pb.hi);
    if (fa == 0) {
      out.push_back({k, pb.lo});
      continue;
    }
    if (fb == 0) {
      out.push_back({k, pb.hi});
      continue;
    }
    auto r = boost::math::tools::bisect(f, pb.lo, pb.hi, boost::math::tools::eps_tolerance<double>(52));
    out.push_back({k, 0.5 * (r.first + r.second)});
  }
  if (out.empty()) throw NoRoots("no quantized roots in the interval");
  return out;
}

// |sum_{k<K} exp(i k x)| / K with x reduced mod 2 pi
inline double geometric_series_filter(double x, long K) {
  if (K < 1) throw std::invalid_argument("filter needs at least one term");
  const double r = std::remainder(x, 2 * pi);
  cplx s = 0;
  for (long k = 0; k < K; ++k) s += std::exp(I * (double(k) * r));
  return std::abs(s) / double(K);
}

}  // namespace mpw
