#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mpw/core.hpp"

namespace mpw {

enum class CollisionMode { elastic, plastic };

struct Constraint {
  std::string name;
  std::function<double(const Vec&, double)> f;         // feasible where f <= 0
  std::function<Vec(const Vec&, double)> gradient;     // optional
  CollisionMode mode = CollisionMode::elastic;

  Vec grad(const Vec& x, double t, double h = 1e-6) const {
    if (gradient) return gradient(x, t);
    return numeric_gradient([&](const Vec& y) { return f(y, t); }, x, h).real();
  }
};

struct ConstraintSet {
  std::vector<Constraint> constraints;
  double activation_tol = 1e-9;

  bool empty() const { return constraints.empty(); }
  std::size_t size() const { return constraints.size(); }

  std::vector<std::size_t> active(const Vec& x, double t) const {
    std::vector<std::size_t> out;
    for (std::size_t g = 0; g < constraints.size(); ++g)
      if (std::abs(constraints[g].f(x, t)) <= activation_tol) out.push_back(g);
    return out;
  }

  bool feasible(const Vec& x, double t) const {
    for (auto& c : constraints)
      if (c.f(x, t) > activation_tol) return false;
    return true;
  }

  // walls a <= x[axis] <= b
  static ConstraintSet box(int dim, int axis, double a, double b,
                           CollisionMode mode = CollisionMode::elastic) {
    ConstraintSet s;
    s.constraints.push_back({"lower", [axis, a](const Vec& x, double) { return a - x[axis]; },
                             [dim, axis](const Vec&, double) {
                               Vec g = Vec::Zero(dim);
                               g[axis] = -1;
                               return g;
                             },
                             mode});
    s.constraints.push_back({"upper", [axis, b](const Vec& x, double) { return x[axis] - b; },
                             [dim, axis](const Vec&, double) {
                               Vec g = Vec::Zero(dim);
                               g[axis] = 1;
                               return g;
                             },
                             mode});
    return s;
  }
};

enum class BranchCause { origin, slit, reflection, singularity, turning_point };

struct BranchPoint {
  Vec location;
  double time = 0;
  BranchCause cause = BranchCause::origin;
};

// exactly one of x_o, p_o
struct InitialCondition {
  std::optional<Vec> x_o;
  std::optional<Vec> p_o;

  static InitialCondition position(Vec x) { return {std::move(x), std::nullopt}; }
  static InitialCondition momentum(Vec p) { return {std::nullopt, std::move(p)}; }

  bool valid() const { return x_o.has_value() != p_o.has_value(); }
  bool from_point() const { return x_o.has_value(); }
};

using ScalarField = std::function<cplx(const Vec&, double)>;
using VectorField = std::function<CVec(const Vec&, double)>;

struct ActionBranch {
  int id = 0;
  int dim = 1;
  std::string label;
  ScalarField phi;
  VectorField grad_phi;       // optional analytic gradient
  ScalarField laplacian_phi;  // optional analytic Laplace-Beltrami of phi
  ScalarField dphi_dt;        // optional analytic time derivative
  InitialCondition init;
  std::vector<BranchPoint> lineage;
  bool complex_valued = false;

  void validate() const {
    if (!phi) throw std::invalid_argument("branch has no action");
    if (!init.valid()) throw std::invalid_argument("branch needs exactly one of x_o, p_o");
  }

  CVec gradient(const Vec& x, double t, double h = 1e-5) const {
    if (grad_phi) return grad_phi(x, t);
    return numeric_gradient([&](const Vec& y) { return phi(y, t); }, x, h);
  }

  cplx time_derivative(const Vec& x, double t, double h = 1e-5) const {
    if (dphi_dt) return dphi_dt(x, t);
    return (-phi(x, t + 2 * h) + 8.0 * phi(x, t + h) - 8.0 * phi(x, t - h) + phi(x, t - 2 * h)) /
           (12.0 * h);
  }
};

// one term of a superposition: sqrt(rho) * exp(i phi / hbar) * weight, restricted to a domain
struct BranchTerm {
  ActionBranch branch;
  ScalarField sqrt_rho;
  cplx weight{1.0, 0.0};
  std::function<bool(const Vec&)> domain;
  int component = 0;

  bool contains(const Vec& x) const { return !domain || domain(x); }

  cplx evaluate(const Vec& x, double t, double hbar) const {
    if (!contains(x)) return 0.0;
    cplx a = sqrt_rho ? sqrt_rho(x, t) : cplx(1.0);
    return weight * a * std::exp(I * branch.phi(x, t) / hbar);
  }
};

}  // namespace mpw
