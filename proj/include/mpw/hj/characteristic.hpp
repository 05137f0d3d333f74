#pragma once

#include <vector>

#include "mpw/hj/branch.hpp"
#include "mpw/hj/hamiltonian.hpp"

namespace mpw {

enum class EventKind { reflection, plastic_stop, caustic };

struct TrajectoryEvent {
  EventKind kind = EventKind::reflection;
  double t = 0;
  Vec x;
  int constraint = -1;
  double impulse = 0;  // lambda_g integrated over the collision
  std::size_t sample = 0;
};

struct TrajectorySample {
  double t = 0;
  Vec x;
  Vec p;
  cplx phi = 0;
  cplx sqrt_rho = 1;
  int event = -1;
};

struct PathTrajectory {
  int branch_id = 0;
  std::vector<TrajectorySample> samples;
  std::vector<TrajectoryEvent> events;

  std::size_t size() const { return samples.size(); }
  const TrajectorySample& back() const { return samples.back(); }
};

struct CharacteristicStart {
  Vec x;
  Vec p;
  double t = 0;
  cplx phi = 0;
  int branch_id = 0;
};

struct StepControl {
  double dt = 1e-3;
  int max_reflections = 10000;
  double event_tol = 1e-12;
  double fd_step = 1e-5;
  int record_every = 1;
};

namespace detail {

struct PhaseState {
  Vec x, p;
  double phi = 0;
};

inline Vec force(const HamiltonianSpec& spec, const Vec& x, const Vec& p, double t, double h) {
  Vec f(spec.dim);
  if (spec.potential_gradient) {
    auto kinetic = [&](const Vec& y) { return spec.hamiltonian(y, p, t) - spec.potential_at(y, t); };
    Vec dv = spec.potential_gradient(x, t);
    for (int n = 0; n < spec.dim; ++n) f[n] = -dv[n] - central_diff(kinetic, x, n, h);
    return f;
  }
  for (int n = 0; n < spec.dim; ++n)
    f[n] = -central_diff([&](const Vec& y) { return spec.hamiltonian(y, p, t); }, x, n, h);
  return f;
}

inline PhaseState derivative(const HamiltonianSpec& spec, const PhaseState& s, double t,
                             double h) {
  PhaseState d;
  d.x = spec.velocity(s.x, s.p, t);
  d.p = force(spec, s.x, s.p, t, h);
  d.phi = s.p.dot(d.x) - spec.hamiltonian(s.x, s.p, t);
  return d;
}

inline PhaseState rk4(const HamiltonianSpec& spec, const PhaseState& s, double t, double dt,
                      double h) {
  auto axpy = [](const PhaseState& a, const PhaseState& k, double c) {
    return PhaseState{a.x + c * k.x, a.p + c * k.p, a.phi + c * k.phi};
  };
  auto k1 = derivative(spec, s, t, h);
  auto k2 = derivative(spec, axpy(s, k1, 0.5 * dt), t + 0.5 * dt, h);
  auto k3 = derivative(spec, axpy(s, k2, 0.5 * dt), t + 0.5 * dt, h);
  auto k4 = derivative(spec, axpy(s, k3, dt), t + dt, h);
  PhaseState out;
  out.x = s.x + dt / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x);
  out.p = s.p + dt / 6 * (k1.p + 2 * k2.p + 2 * k3.p + k4.p);
  out.phi = s.phi + dt / 6 * (k1.phi + 2 * k2.phi + 2 * k3.phi + k4.phi);
  return out;
}

inline bool finite_state(const PhaseState& s) {
  return s.x.allFinite() && s.p.allFinite() && std::isfinite(s.phi);
}

}  // namespace detail

// elastic reflection p <- p - c n, c = 2 n^T M^-1 p_kin / n^T M^-1 n
inline double reflect_momentum(const HamiltonianSpec& spec, const Vec& x, Vec& p, const Vec& n,
                               double t) {
  Mat m = spec.metric_at(x);
  Vec pk = spec.kinetic_momentum(x, p.cast<cplx>(), t).real();
  Vec minv_n = m.ldlt().solve(n);
  double c = 2.0 * minv_n.dot(pk) / minv_n.dot(n);
  p -= c * n;
  return -c;
}

inline PathTrajectory integrate_characteristic(const HamiltonianSpec& spec,
                                               const ConstraintSet& constraints,
                                               const CharacteristicStart& start, double t_final,
                                               const StepControl& ctl = {}) {
  if (start.x.size() != spec.dim || start.p.size() != spec.dim)
    throw std::invalid_argument("start state has wrong dimension");
  if (!(ctl.dt > 0)) throw std::invalid_argument("step must be positive");
  if (!constraints.feasible(start.x, start.t))
    throw std::invalid_argument("start point violates a constraint");

  PathTrajectory traj;
  traj.branch_id = start.branch_id;
  detail::PhaseState s{start.x, start.p, start.phi.real()};
  double t = start.t;
  traj.samples.push_back({t, s.x, s.p, cplx(s.phi, start.phi.imag()), 1.0, -1});
  int reflections = 0;
  long step = 0;
  const double im_phi = start.phi.imag();

  while (t < t_final - 1e-15 * std::max(1.0, std::abs(t_final))) {
    double dt = std::min(ctl.dt, t_final - t);
    if (t_final - t - dt < 1e-6 * ctl.dt) dt = t_final - t;
    auto next = detail::rk4(spec, s, t, dt, ctl.fd_step);
    if (!detail::finite_state(next)) throw NonFiniteState("non-finite state during integration");

    int hit = -1;
    for (std::size_t g = 0; g < constraints.size(); ++g) {
      auto& c = constraints.constraints[g];
      if (c.f(next.x, t + dt) > 0 && c.f(s.x, t) <= 0) {
        hit = static_cast<int>(g);
        break;
      }
    }

    if (hit < 0) {
      s = next;
      t += dt;
      ++step;
      if (step % ctl.record_every == 0 || t >= t_final)
        traj.samples.push_back({t, s.x, s.p, cplx(s.phi, im_phi), 1.0, -1});
      continue;
    }

    // bisect the crossing time of constraint `hit`
    auto& c = constraints.constraints[hit];
    double lo = 0, hi = dt;
    detail::PhaseState at = s;
    while (hi - lo > ctl.event_tol) {
      double mid = 0.5 * (lo + hi);
      auto trial = detail::rk4(spec, s, t, mid, ctl.fd_step);
      if (c.f(trial.x, t + mid) > 0) {
        hi = mid;
      } else {
        lo = mid;
        at = trial;
      }
    }
    if (lo > 0) at = detail::rk4(spec, s, t, lo, ctl.fd_step);
    t += lo;
    s = at;

    TrajectoryEvent ev;
    ev.t = t;
    ev.x = s.x;
    ev.constraint = hit;
    ev.sample = traj.samples.size();
    if (c.mode == CollisionMode::elastic) {
      if (++reflections > ctl.max_reflections) throw EventLoop("reflection count exceeded");
      ev.kind = EventKind::reflection;
      ev.impulse = reflect_momentum(spec, s.x, s.p, c.grad(s.x, t), t);
      traj.samples.push_back({t, s.x, s.p, cplx(s.phi, im_phi), 1.0, hit});
      traj.events.push_back(ev);
    } else {
      ev.kind = EventKind::plastic_stop;
      Vec pk = spec.kinetic_momentum(s.x, s.p.cast<cplx>(), t).real();
      s.p -= pk;
      traj.samples.push_back({t, s.x, s.p, cplx(s.phi, im_phi), 1.0, hit});
      traj.events.push_back(ev);
      break;
    }
  }
  return traj;
}

inline PathTrajectory integrate_characteristic(const HamiltonianSpec& spec,
                                               const CharacteristicStart& start, double t_final,
                                               const StepControl& ctl = {}) {
  return integrate_characteristic(spec, ConstraintSet{}, start, t_final, ctl);
}

}  // namespace mpw
