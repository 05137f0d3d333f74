#pragma once

#include <optional>
#include <vector>

#include "mpw/core.hpp"

namespace mpw {

// H(x,p,t) = 1/2 (p - QA)^T M^{-1} (p - QA) + V
struct HamiltonianSpec {
  using MetricFn = std::function<Mat(const Vec&)>;
  using ScalarFn = std::function<double(const Vec&, double)>;
  using VectorFn = std::function<Vec(const Vec&, double)>;

  int dim = 1;
  MetricFn metric;
  ScalarFn potential;
  VectorFn potential_gradient;  // optional analytic dV/dx
  VectorFn vector_potential;    // optional, zero when empty
  Vec charge;                   // diagonal of Q, defaults to ones
  double hbar = 1.0;
  double det_floor = 1e-12;

  static HamiltonianSpec free_particle(int dim, double mass, double hbar = 1.0) {
    HamiltonianSpec s;
    s.dim = dim;
    s.metric = [dim, mass](const Vec&) { return Mat(mass * Mat::Identity(dim, dim)); };
    s.hbar = hbar;
    return s;
  }

  static HamiltonianSpec scalar_mass(int dim, double mass, ScalarFn v, double hbar = 1.0) {
    auto s = free_particle(dim, mass, hbar);
    s.potential = std::move(v);
    return s;
  }

  Mat metric_at(const Vec& x) const {
    if (x.size() != dim) throw std::invalid_argument("point dimension does not match Hamiltonian");
    Mat m = metric ? metric(x) : Mat::Identity(dim, dim);
    if (m.rows() != dim || m.cols() != dim) throw std::invalid_argument("metric has wrong shape");
    if (!(m - m.transpose()).isZero(1e-12 * (1.0 + m.norm())))
      throw SingularMetric("metric is not symmetric");
    double det = m.determinant();
    if (!(det > det_floor)) throw SingularMetric("metric determinant below floor");
    return m;
  }

  double potential_at(const Vec& x, double t) const { return potential ? potential(x, t) : 0.0; }

  Vec vector_potential_at(const Vec& x, double t) const {
    if (!vector_potential) return Vec::Zero(dim);
    Vec a = vector_potential(x, t);
    if (a.size() != dim) throw std::invalid_argument("vector potential has wrong dimension");
    return a;
  }

  bool has_vector_potential() const { return static_cast<bool>(vector_potential); }

  Vec charge_diag() const { return charge.size() == dim ? charge : Vec::Ones(dim); }

  CVec kinetic_momentum(const Vec& x, const CVec& p, double t) const {
    Vec qa = charge_diag().cwiseProduct(vector_potential_at(x, t));
    return p - qa.cast<cplx>();
  }

  cplx hamiltonian(const Vec& x, const CVec& p, double t) const {
    CVec k = kinetic_momentum(x, p, t);
    CVec w = metric_at(x).cast<cplx>().ldlt().solve(k);
    return 0.5 * (k.array() * w.array()).sum() + potential_at(x, t);
  }

  double hamiltonian(const Vec& x, const Vec& p, double t) const {
    return hamiltonian(x, CVec(p.cast<cplx>()), t).real();
  }

  // M^{-1}(p - QA)
  Vec velocity(const Vec& x, const Vec& p, double t) const {
    Vec k = kinetic_momentum(x, p.cast<cplx>(), t).real();
    return metric_at(x).ldlt().solve(k);
  }
};

}  // namespace mpw
