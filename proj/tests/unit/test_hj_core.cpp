#include <gtest/gtest.h>

#include "mpw/hj/characteristic.hpp"
#include "mpw/hj/operators.hpp"
#include "mpw/hj/transport.hpp"
#include "mpw/scenarios/double_slit.hpp"
#include "mpw/scenarios/harmonic.hpp"

using namespace mpw;

namespace {

Vec v1(double a) { return Vec::Constant(1, a); }
Vec v2(double a, double b) {
  Vec x(2);
  x << a, b;
  return x;
}

ActionBranch free_plane(double p, double m) {
  ActionBranch b;
  b.dim = 1;
  b.init = InitialCondition::momentum(v1(p));
  b.phi = [=](const Vec& x, double t) { return cplx(p * x[0] - p * p / (2 * m) * t); };
  return b;
}

}  // namespace

TEST(Hamiltonian, FreeParticleValue) {
  auto s = HamiltonianSpec::free_particle(2, 2.0);
  EXPECT_NEAR(s.hamiltonian(Vec::Zero(2), v2(1, 2), 0), 1.25, 1e-15);
}

TEST(Hamiltonian, VectorPotentialShiftsMomentum) {
  auto s = HamiltonianSpec::free_particle(1, 1.0);
  s.vector_potential = [](const Vec&, double) { return v1(0.5); };
  s.charge = v1(2.0);
  EXPECT_NEAR(s.hamiltonian(v1(0), v1(3.0), 0), 2.0, 1e-15);
}

TEST(Hamiltonian, ComplexMomentumIsNotConjugated) {
  auto s = HamiltonianSpec::free_particle(1, 1.0);
  CVec p = CVec::Constant(1, cplx(0, 1));
  EXPECT_NEAR(std::abs(s.hamiltonian(v1(0), p, 0) - cplx(-0.5)), 0, 1e-15);
}

TEST(Hamiltonian, SingularMetricThrows) {
  HamiltonianSpec s;
  s.dim = 2;
  s.metric = [](const Vec&) { return Mat(Mat::Zero(2, 2)); };
  EXPECT_THROW(s.metric_at(Vec::Zero(2)), SingularMetric);
}

TEST(Characteristic, FreeParticleLineAndAction) {
  auto s = HamiltonianSpec::free_particle(1, 2.0);
  auto tr = integrate_characteristic(s, {v1(0.1), v1(3.0)}, 1.5);
  const auto& e = tr.back();
  EXPECT_NEAR(e.t, 1.5, 1e-14);
  EXPECT_NEAR(e.x[0], 0.1 + 3.0 * 1.5 / 2.0, 1e-12);
  EXPECT_NEAR(e.phi.real(), 9.0 / 4.0 * 1.5, 1e-12);
}

TEST(Characteristic, HarmonicOrbit) {
  HarmonicCatalog h({});
  auto tr = integrate_characteristic(h.spec, {v1(0.7), v1(0.2)}, 2.0);
  EXPECT_NEAR(tr.back().x[0], 0.7 * std::cos(2.0) + 0.2 * std::sin(2.0), 1e-11);
  EXPECT_NEAR(tr.back().p[0], -0.7 * std::sin(2.0) + 0.2 * std::cos(2.0), 1e-11);
}

TEST(Characteristic, ElasticWallReflection) {
  auto s = HamiltonianSpec::free_particle(1, 1.0);
  auto walls = ConstraintSet::box(1, 0, 0.0, 1.0);
  auto tr = integrate_characteristic(s, walls, {v1(0.5), v1(1.0)}, 1.2);
  ASSERT_EQ(tr.events.size(), 1u);
  EXPECT_EQ(tr.events[0].kind, EventKind::reflection);
  EXPECT_NEAR(tr.events[0].t, 0.5, 1e-11);
  EXPECT_NEAR(tr.back().x[0], 0.3, 1e-10);
  EXPECT_NEAR(tr.back().p[0], -1.0, 1e-14);
}

TEST(Characteristic, PlasticWallStops) {
  auto s = HamiltonianSpec::free_particle(1, 1.0);
  auto walls = ConstraintSet::box(1, 0, 0.0, 1.0, CollisionMode::plastic);
  auto tr = integrate_characteristic(s, walls, {v1(0.5), v1(1.0)}, 2.0);
  ASSERT_EQ(tr.events.size(), 1u);
  EXPECT_EQ(tr.events[0].kind, EventKind::plastic_stop);
  EXPECT_NEAR(tr.back().t, 0.5, 1e-11);
  EXPECT_NEAR(tr.back().p[0], 0.0, 1e-14);
}

TEST(Characteristic, ReflectionConservesEnergyWithAnisotropicMetric) {
  HamiltonianSpec s;
  s.dim = 2;
  s.metric = [](const Vec&) {
    Mat m(2, 2);
    m << 2.0, 0.3, 0.3, 1.0;
    return m;
  };
  Vec p = v2(0.4, -1.3), n = v2(1, 2).normalized();
  const double e0 = s.hamiltonian(Vec::Zero(2), p, 0);
  reflect_momentum(s, Vec::Zero(2), p, n, 0);
  EXPECT_NEAR(s.hamiltonian(Vec::Zero(2), p, 0), e0, 1e-14);
}

TEST(Characteristic, ReflectionLoopGuard) {
  auto s = HamiltonianSpec::free_particle(1, 1.0);
  auto walls = ConstraintSet::box(1, 0, 0.0, 0.01);
  StepControl c;
  c.max_reflections = 5;
  EXPECT_THROW(integrate_characteristic(s, walls, {v1(0.005), v1(1.0)}, 1.0, c), EventLoop);
}

TEST(LaplaceBeltrami, QuadraticUnderScaledMetric) {
  auto s = HamiltonianSpec::free_particle(2, 2.0);
  auto f = [](const Vec& x) { return cplx(x.squaredNorm()); };
  EXPECT_NEAR(std::abs(laplace_beltrami(s, f, v2(0.3, -0.4)) - 2.0), 0, 1e-7);
}

TEST(LaplaceBeltrami, OneSidedNearBoundary) {
  auto s = HamiltonianSpec::free_particle(1, 1.0);
  auto f = [](const Vec& x) { return cplx(std::pow(x[0], 3)); };
  StencilOptions o;
  o.domain = [](const Vec& x) { return x[0] >= 0; };
  EXPECT_THROW(laplace_beltrami(s, f, v1(1e-4), o), StencilOutOfDomain);
  o.one_sided = true;
  EXPECT_NEAR(laplace_beltrami(s, f, v1(1e-4), o).real(), 6e-4, 1e-6);
}

TEST(HjResidual, ExactBranchesVanish) {
  auto s = HamiltonianSpec::free_particle(1, 1.5);
  auto b = free_plane(0.8, 1.5);
  EXPECT_LT(std::abs(hj_residual(s, b, v1(0.2), 0.4)), 1e-9);
  HarmonicCatalog h({});
  EXPECT_LT(std::abs(hj_residual(h.spec, h.branch(v1(0.3)), v1(-0.6), 0.9)), 1e-12);
}

TEST(Gauge, SolenoidPassesLinearFieldFails) {
  auto s = HamiltonianSpec::free_particle(3, 1.0);
  s.vector_potential = solenoid_field(1.0, 6, 0);
  std::vector<Vec> pts;
  for (double y : {-3.0, 0.5, 2.0}) pts.push_back(Vec::Unit(3, 0) * 2 + Vec::Unit(3, 1) * y);
  EXPECT_TRUE(check_gauge(s, pts).passed);
  s.vector_potential = [](const Vec& x, double) { return Vec(Vec::Unit(3, 0) * x[0]); };
  EXPECT_THROW(require_gauge(s, pts), GaugeViolation);
}

TEST(Transport, CumulativeIntegralNonUniform) {
  std::vector<double> t;
  std::vector<cplx> f;
  for (int k = 0; k <= 400; ++k) {
    double u = 3.0 * std::pow(k / 400.0, 1.3);
    t.push_back(u);
    f.push_back(std::cos(u));
  }
  auto F = detail::cumulative_integral(t, f);
  for (std::size_t k = 0; k < t.size(); k += 37) EXPECT_NEAR(F[k].real(), std::sin(t[k]), 1e-8);
}

TEST(Transport, FreeSpreadingPointSource) {
  // phi = M (x - x0)^2 / 2t, lap phi = 1/t, sqrt(rho) ~ t^{-1/2}
  auto s = HamiltonianSpec::free_particle(1, 1.0);
  ActionBranch b;
  b.dim = 1;
  b.init = InitialCondition::position(v1(0));
  b.phi = [](const Vec& x, double t) { return cplx(x[0] * x[0] / (2 * t)); };
  auto tr = integrate_characteristic(s, {v1(0.5), v1(0.5), 1.0}, 4.0);
  TransportOptions o;
  o.spec = s;
  tr = transport_density(b, tr, 1.0, o);
  EXPECT_NEAR(std::abs(tr.back().sqrt_rho - 0.5), 0, 1e-6);
}

TEST(Transport, HarmonicCausticGivesMaslovPhase) {
  HarmonicCatalog h({});
  auto b = h.branch(v1(0.0));
  auto tr = integrate_characteristic(h.spec, {v1(0.0), v1(1.0), 0.5}, 4.0);
  tr = transport_density(b, tr, 1.0);
  ASSERT_EQ(tr.events.size(), 1u);
  EXPECT_EQ(tr.events[0].kind, EventKind::caustic);
  EXPECT_NEAR(tr.events[0].t, pi, 1e-4);
  cplx expect = h.sqrt_rho(4.0) / h.sqrt_rho(0.5);
  EXPECT_NEAR(std::abs(tr.back().sqrt_rho - expect), 0, 1e-6);
}
