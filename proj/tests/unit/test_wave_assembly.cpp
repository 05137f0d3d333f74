#include <gtest/gtest.h>

#include "mpw/oracle/cn.hpp"
#include "mpw/wave/assemble.hpp"
#include "mpw/wave/measure.hpp"
#include "mpw/wave/residual.hpp"

using namespace mpw;

namespace {

Vec v1(double a) { return Vec::Constant(1, a); }

BranchTerm plane_term(double p, double m, double amp = 1.0) {
  BranchTerm t;
  t.branch.dim = 1;
  t.branch.init = InitialCondition::momentum(v1(p));
  t.branch.phi = [=](const Vec& x, double tt) { return cplx(p * x[0] - p * p / (2 * m) * tt); };
  t.sqrt_rho = [=](const Vec&, double) { return cplx(amp); };
  return t;
}

double slope(const std::vector<double>& h, const std::vector<double>& e) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    mx += std::log(h[i]) / h.size();
    my += std::log(e[i]) / h.size();
  }
  double num = 0, den = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    num += (std::log(h[i]) - mx) * (std::log(e[i]) - my);
    den += std::pow(std::log(h[i]) - mx, 2);
  }
  return num / den;
}

}  // namespace

TEST(Grid, IndexRoundTripAndWeights) {
  auto g = Grid::uniform({{0, 1}, {-1, 2}, {0, 0.5}}, {4, 5, 3});
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(g.flat(g.multi_index(i)), i);
  double vol = 0;
  for (std::size_t i = 0; i < g.size(); ++i) vol += g.weight(i);
  EXPECT_NEAR(vol, 1.5, 1e-14);
  EXPECT_EQ(g.stride(0), 15u);
}

TEST(Assemble, PlaneWaveValues) {
  auto g = Grid::line(0, 1, 11);
  auto w = assemble_wave({plane_term(2.0, 1.0, 0.5)}, g, 0.3);
  for (std::size_t i = 0; i < g.size(); ++i) {
    cplx e = 0.5 * std::exp(I * (2.0 * g.coord(0, i) - 2.0 * 0.3));
    EXPECT_NEAR(std::abs(w(i) - e), 0, 1e-15);
  }
}

TEST(Assemble, Errors) {
  auto g = Grid::line(0, 1, 5);
  EXPECT_THROW(assemble_wave({}, g, 0), EmptyBranchSet);
  auto t = plane_term(1, 1);
  t.branch.dim = 2;
  EXPECT_THROW(assemble_wave({t}, g, 0), DomainMismatch);
}

TEST(Assemble, BranchPointExclusion) {
  auto g = Grid::line(-1, 1, 21);
  AssembleOptions o;
  o.branch_points = {v1(0)};
  o.exclusion_cells = 1.5;
  auto w = assemble_wave({plane_term(1, 1)}, g, 0, o);
  EXPECT_EQ(w.flagged.size(), 3u);
}

TEST(Kernel, PointSourceAndMomentumBranches) {
  auto t = plane_term(1.5, 1.0, 2.0);
  cplx k = feynman_kernel(t, v1(0.7), v1(0.2), 0.4);
  EXPECT_NEAR(std::abs(k - std::exp(I * (1.5 * 0.5 - 1.125 * 0.4))), 0, 1e-14);
  t.sqrt_rho = [](const Vec& x, double) { return cplx(x[0]); };
  EXPECT_THROW(feynman_kernel(t, v1(0.7), v1(0.0), 0.4), ZeroInitialDensity);
}

TEST(Residual, PlaneWaveConvergesAtSecondOrder) {
  auto spec = HamiltonianSpec::free_particle(1, 1.0);
  auto t = plane_term(3.0, 1.0);
  std::vector<double> hs, es;
  for (std::size_t n : {41, 81, 161}) {
    auto g = Grid::line(0, 2, n);
    auto r = schrodinger_residual(spec, [&](const Vec& x, double tt) { return t.evaluate(x, tt, 1.0); }, g,
                                  0.5, {}, 1e-4);
    hs.push_back(g.spacing[0]);
    es.push_back(r.l2_rel);
    EXPECT_EQ(r.excluded_nodes, 2u);
  }
  // discrete Laplacian of e^{ipx} leaves p^4 h^2 / 24
  EXPECT_NEAR(es.back(), 81.0 * hs.back() * hs.back() / 24.0, 1e-2 * es.back());
  EXPECT_NEAR(slope(hs, es), 2.0, 0.02);
}

TEST(Residual, WrongEnergyIsDetected) {
  auto spec = HamiltonianSpec::free_particle(1, 1.0);
  auto psi = [](const Vec& x, double t) { return std::exp(I * (x[0] - 0.7 * t)); };
  auto r = schrodinger_residual(spec, psi, Grid::line(0, 1, 101), 0.0);
  EXPECT_NEAR(r.max_rel, 0.2, 1e-4);
}

TEST(Residual, ConstantVectorPotential) {
  auto spec = HamiltonianSpec::free_particle(1, 1.0);
  spec.vector_potential = [](const Vec&, double) { return v1(0.4); };
  spec.charge = v1(2.0);
  const double p = 1.5, e = 0.5 * (p - 0.8) * (p - 0.8);
  auto psi = [&](const Vec& x, double t) { return std::exp(I * (p * x[0] - e * t)); };
  auto r = schrodinger_residual(spec, psi, Grid::line(0, 1, 401), 0.0);
  EXPECT_LT(r.max_rel, 1e-5);
}

TEST(Residual, StencilEstimateRaises) {
  auto spec = HamiltonianSpec::free_particle(1, 1.0);
  auto psi = [](const Vec& x, double t) { return std::exp(I * (5 * x[0] - 12.5 * t)); };
  ResidualOptions o;
  o.stencil_tolerance = 1e-6;
  EXPECT_THROW(schrodinger_residual(spec, psi, Grid::line(0, 1, 41), 0.0, o), GridTooCoarse);
}

TEST(Residual, ThreeSliceTimeDerivative) {
  auto spec = HamiltonianSpec::free_particle(1, 1.0);
  auto t = plane_term(2.0, 1.0);
  auto g = Grid::line(0, 1, 401);
  const double dt = 1e-4;
  auto a = assemble_wave({t}, g, 0.3 - dt), b = assemble_wave({t}, g, 0.3), c = assemble_wave({t}, g, 0.3 + dt);
  EXPECT_LT(schrodinger_residual(spec, a, b, c, dt).max_rel, 1e-4);
}

TEST(Measure, DensityMatrixAndBorn) {
  auto g = Grid::line(0, 1, 101);
  WaveField a(g), b(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    a(i) = 1.0;
    b(i) = std::sqrt(2.0) * std::sin(pi * g.coord(0, i));
  }
  auto rho = density_matrix({{a, 0.25}, {b, 0.75}}, true);
  EXPECT_NEAR(rho.trace(), 1.0, 1e-12);
  EXPECT_NEAR(born_probability(a, v1(0), v1(0.5)), 0.5, 1e-12);
  EXPECT_THROW(density_matrix({{a, 0.3}, {b, 0.3}}), std::invalid_argument);
}

TEST(Measure, FourierCollapseIsNormalizedPlaneWave) {
  auto g = Grid::line(-5, 5, 201);
  WaveField w(g);
  for (std::size_t i = 0; i < g.size(); ++i) w(i) = std::exp(-g.coord(0, i) * g.coord(0, i));
  auto op = MeasurementOperator::fourier(g);
  auto c = collapse(w, op, v1(0.0));
  EXPECT_NEAR(c.norm(), 1.0, 1e-12);
  EXPECT_NEAR(c.abs2(0), c.abs2(100), 1e-12);
  EXPECT_THROW(op.nearest_outcome(v1(1e6)), OutcomeOutOfRange);
}

TEST(Measure, TemporalCollapseSelectsEnergy) {
  auto g = Grid::line(0, 1, 101);
  const double e1 = 2 * pi, e2 = 6 * pi;
  std::vector<WaveField> series;
  const int nt = 64;
  const double dt = 1.0 / nt;
  for (int k = 0; k < nt; ++k) {
    WaveField w(g, 1, k * dt);
    for (std::size_t i = 0; i < g.size(); ++i) {
      double x = g.coord(0, i);
      w(i) = std::exp(-I * e1 * w.time) * std::sin(pi * x) + std::exp(-I * e2 * w.time) * std::sin(3 * pi * x);
    }
    series.push_back(w);
  }
  auto c = collapse_temporal(series, e2);
  WaveField ref(g);
  for (std::size_t i = 0; i < g.size(); ++i) ref(i) = std::sin(3 * pi * g.coord(0, i));
  EXPECT_NEAR(fidelity(c, ref), 1.0, 1e-12);
}

TEST(Measure, NormDriftFlag) {
  auto g = Grid::line(0, 1, 11);
  WaveField a(g), b(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    a(i) = 1.0;
    b(i) = 1.0 + 1e-6;
  }
  EXPECT_TRUE(check_norm_conservation({a, b}).flagged);
  EXPECT_FALSE(check_norm_conservation({a, a}).flagged);
}

TEST(Quantize, BoxMomentaAndNoRoots) {
  QuantizationProblem q;
  q.phi = [](double p) { return 2 * p; };
  q.lo = 1;
  q.hi = 10;
  auto r = quantize(q);
  ASSERT_EQ(r.size(), 3u);
  for (auto& k : r) EXPECT_NEAR(k.parameter, pi * k.k, 1e-14 * k.parameter);
  q.lo = 3.2;
  q.hi = 3.3;
  EXPECT_THROW(quantize(q), NoRoots);
}

TEST(Quantize, GeometricFilter) {
  EXPECT_NEAR(geometric_series_filter(2 * pi * 7, 1000), 1.0, 1e-12);
  EXPECT_LT(geometric_series_filter(pi, 1000), 1e-12);
  EXPECT_NEAR(geometric_series_filter(0.5, 4), std::abs(std::sin(1.0) / std::sin(0.25)) / 4, 1e-14);
}
