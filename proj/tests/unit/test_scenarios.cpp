#include <random>

#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/hermite.hpp>
#include <gtest/gtest.h>

#include "mpw/hj/operators.hpp"
#include "mpw/scenarios/box.hpp"
#include "mpw/scenarios/config.hpp"
#include "mpw/scenarios/coulomb.hpp"
#include "mpw/scenarios/double_slit.hpp"
#include "mpw/scenarios/harmonic.hpp"
#include "mpw/scenarios/spin.hpp"
#include "mpw/scenarios/tunneling.hpp"
#include "mpw/wave/assemble.hpp"

using namespace mpw;

namespace {

Vec v1(double a) { return Vec::Constant(1, a); }
Vec v2(double a, double b) {
  Vec x(2);
  x << a, b;
  return x;
}
Vec v3(double a, double b, double c) {
  Vec x(3);
  x << a, b, c;
  return x;
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Vec3 v(n(rng), n(rng), n(rng));
  return v.normalized();
}

}  // namespace

TEST(Hermite, MatchesBoostPolynomials) {
  for (int k = 0; k <= 12; ++k)
    for (double z : {-2.5, -0.3, 0.0, 1.1, 3.7})
      EXPECT_NEAR(hermite_polynomial(k, z), boost::math::hermite(k, z),
                  1e-12 * std::max(1.0, std::abs(boost::math::hermite(k, z))));
}

TEST(Hermite, FunctionsAgainstClosedForm) {
  const double s = 2.5;
  for (int k = 0; k <= 10; ++k) {
    const double x = 0.37;
    const double z = std::sqrt(s) * x;
    const double ref = std::pow(s / pi, 0.25) / std::sqrt(std::pow(2.0, k) * boost::math::factorial<double>(k)) *
                       boost::math::hermite(k, z) * std::exp(-z * z / 2);
    EXPECT_NEAR(hermite_function(k, x, s), ref, 1e-13);
  }
}

TEST(Hermite, Orthonormal) {
  const int n = 4001;
  const double a = -12, b = 12, h = (b - a) / (n - 1);
  for (int j = 0; j <= 10; ++j)
    for (int k = 0; k <= 10; ++k) {
      double s = 0;
      for (int i = 0; i < n; ++i) s += h * hermite_function(j, a + i * h) * hermite_function(k, a + i * h);
      EXPECT_NEAR(s, j == k ? 1.0 : 0.0, 1e-10);
    }
}

TEST(Harmonic, GroundEnergyAndHjResidual) {
  HarmonicCatalog h({});
  EXPECT_DOUBLE_EQ(h.energy(0), 0.5);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2, 2), tt(0.2, 2.9);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    auto b = h.branch(v1(u(rng)));
    b.grad_phi = nullptr;
    b.dphi_dt = nullptr;
    worst = std::max(worst, std::abs(hj_residual(h.spec, b, v1(u(rng)), tt(rng), 1e-4)));
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(Harmonic, DampedMehlerSumConverges) {
  HarmonicCatalog h({});
  const cplx t(1.0, -0.6);
  for (double x : {-1.2, 0.4}) {
    cplx k = h.kernel(v1(x), v1(0.7), t), e = h.eigen_expansion(v1(x), v1(0.7), t, 60);
    EXPECT_NEAR(std::abs(k - e), 0, 1e-12);
  }
}

TEST(Harmonic, MaslovBranchContinuousAcrossCaustic) {
  HarmonicCatalog h({});
  EXPECT_THROW(h.sqrt_rho(pi), CausticTime);
  // continuity of sqrt(rho)*|sin| across the caustic: phase jumps by -pi/2
  cplx a = h.sqrt_rho(pi - 1e-3) * std::sqrt(std::abs(std::sin(pi - 1e-3)));
  cplx b = h.sqrt_rho(pi + 1e-3) * std::sqrt(std::abs(std::sin(pi + 1e-3)));
  EXPECT_NEAR(std::abs(b / a - std::exp(-I * pi / 2.0)), 0, 1e-12);
}

TEST(Harmonic, CoherentStateMatchesEigenExpansion) {
  HarmonicConfig c;
  c.mass = 1.3;
  c.omega = 0.8;
  HarmonicCatalog h(c);
  const double s = c.mass * c.omega, a = 0.6, t = 0.9, x = -0.2;
  const double alpha = std::sqrt(s / 2) * a;
  cplx sum = 0;
  for (int k = 0; k < 40; ++k)
    sum += std::exp(-0.5 * alpha * alpha) * std::pow(alpha, k) / std::sqrt(boost::math::factorial<double>(k)) *
           std::exp(-I * c.omega * t * (k + 0.5)) * hermite_function(k, x, s);
  EXPECT_NEAR(std::abs(h.coherent_state(v1(x), v1(a), t) - sum), 0, 1e-13);
}

TEST(Box, LevelsMatchClosedForm) {
  BoxConfig c;
  c.mass = 1.7;
  c.L = 2.3;
  BoxCatalog b(c);
  ASSERT_EQ(b.levels.size(), 20u);
  for (auto& l : b.levels) {
    double e = std::pow(l.k * pi / c.L, 2) / (2 * c.mass);
    EXPECT_NEAR(l.energy, e, 1e-12 * e);
  }
}

TEST(Box, FamiliesSumToEigenExpansion) {
  BoxCatalog b({});
  for (double x : {0.0, 0.13, 0.5, 0.91, 1.0})
    for (double t : {0.0, 0.021, 0.37}) {
      cplx s = evaluate_wave(b.terms, v1(x), t);
      cplx ref = 0;
      for (int k = 1; k <= 20; ++k)
        ref += std::sqrt(2.0) * std::sin(k * pi * 0.3) * std::sin(k * pi * x) *
               std::exp(-I * (k * k * pi * pi / 2) * t);
      EXPECT_NEAR(std::abs(s - ref), 0, 1e-11);
    }
}

TEST(Box, FamilyLineageCountsWalls) {
  BoxCatalog b({});
  std::vector<std::size_t> hits;
  for (int f = 0; f < 4; ++f) hits.push_back(b.terms[f].branch.lineage.size() - 1);
  EXPECT_EQ(hits, (std::vector<std::size_t>{0, 1, 2, 1}));
}

TEST(Tunneling, AlgebraicSolution) {
  TunnelingConfig c;
  c.V = 0.25;  // E = 2V
  TunnelingCatalog t(c);
  EXPECT_NEAR(t.p_T.real(), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(t.rho_T.real(), 0.849779, 1e-6);
  EXPECT_NEAR(t.rho_R.real(), 0.212445, 1e-6);
  EXPECT_LT(t.equation_residual().cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Tunneling, NoBarrierKeepsInterfaceSystem) {
  TunnelingConfig c;
  c.V = 0;
  TunnelingCatalog t(c);
  EXPECT_NEAR(std::abs(t.p_T - 1.0), 0, 1e-15);
  EXPECT_NEAR(t.rho_T.real(), 2.0 / 3.0, 1e-14);
  EXPECT_NEAR(t.rho_R.real(), 1.0 / 3.0, 1e-14);
}

TEST(Tunneling, EvanescentAndDegenerate) {
  TunnelingConfig c;
  c.V = 2.0;
  TunnelingCatalog t(c);
  EXPECT_NEAR(t.p_T.real(), 0, 1e-15);
  EXPECT_NEAR(t.p_T.imag(), std::sqrt(3.0), 1e-14);
  const double a = std::abs(t.wave(1.0, 0)), b = std::abs(t.wave(2.0, 0));
  EXPECT_NEAR(b / a, std::exp(-std::sqrt(3.0)), 1e-12);
  c.p0 = 0;
  EXPECT_THROW(TunnelingCatalog{c}, DegenerateSystem);
}

TEST(Tunneling, BranchesSolveHj) {
  TunnelingCatalog t({});
  for (auto& term : t.terms) {
    Vec x = v1(term.branch.label == std::string("transmitted") ? 0.7 : -0.7);
    EXPECT_LT(std::abs(hj_residual(t.spec, term.branch, x, 0.4)), 1e-14);
  }
}

TEST(DoubleSlit, SymmetricScreenAndPhase) {
  auto c = double_slit_branches({});
  EXPECT_EQ(c.terms.size(), 3u);
  for (double y : {0.5, 3.0, 7.25}) EXPECT_NEAR(c.screen_intensity(y), c.screen_intensity(-y), 1e-15);
  const double y = 2.0;
  EXPECT_NEAR(c.phase_difference(y), 2.0 * (std::hypot(10.0, y - 5) - std::hypot(10.0, y + 5)), 1e-14);
  for (std::size_t j = 1; j < c.terms.size(); ++j)
    EXPECT_LT(std::abs(hj_residual(c.spec, c.terms[j].branch, v3(4, 1, 0.5), 0.3)), 1e-13);
}

TEST(DoubleSlit, FiniteWidthTrapezoidWeights) {
  DoubleSlitConfig c;
  c.finite_width = true;
  c.width_samples = 5;
  auto cat = double_slit_branches(c);
  EXPECT_EQ(cat.terms.size(), 11u);
  cplx w = 0;
  for (std::size_t j = 1; j <= 5; ++j) w += cat.terms[j].weight;
  EXPECT_NEAR(w.real(), 1.0, 1e-15);
}

TEST(AharonovBohm, StokesLoopEnclosesFlux) {
  AharonovBohmConfig c;
  c.flux = 0.8;
  auto cat = aharonov_bohm_branches(c, solenoid_field(c.flux, c.c1, c.c2));
  const Vec s1 = cat.base.slits[0], s2 = cat.base.slits[1];
  auto loop = [&](const Vec& x) {
    return cat.arm_phase(0, x) - cat.arm_phase(1, x) + c.charge * line_integral(cat.A, s2, s1);
  };
  EXPECT_NEAR(std::abs(loop(v3(10, 0.5, 0))), c.charge * c.flux, 1e-10);
  EXPECT_NEAR(loop(v3(4, 0.5, 0)), 0, 1e-10);
  for (std::size_t j = 1; j < cat.base.terms.size(); ++j)
    EXPECT_LT(std::abs(hj_residual(cat.spec, cat.base.terms[j].branch, v3(3, 1, 0.2), 0.3)), 1e-6);
}

TEST(AharonovBohm, RejectsNonGaugeField) {
  AharonovBohmConfig c;
  auto bad = [](const Vec& x, double) { return Vec(Vec::Unit(3, 0) * x[0]); };
  EXPECT_THROW(aharonov_bohm_branches(c, bad), GaugeViolation);
}

TEST(Quaternion, ForwardMapAndNorm) {
  EXPECT_TRUE(quaternion_map(Vec4(1, 0, 0, 0)).isApprox(Vec3(0, 0, 1)));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  for (int i = 0; i < 100; ++i) {
    Vec4 q(n(rng), n(rng), n(rng), n(rng));
    EXPECT_NEAR(quaternion_map(q).norm(), q.squaredNorm(), 1e-12 * q.squaredNorm());
  }
}

TEST(Quaternion, SheetsRoundTrip) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3, 3);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    Vec3 x(0, u(rng), u(rng));
    for (auto& s : quaternion_sheets_2d(x)) worst = std::max(worst, (quaternion_map(s.q) - x).norm());
  }
  EXPECT_LT(worst, 1e-12);
  EXPECT_THROW(quaternion_sheets_2d(Vec3::Zero()), OriginBranchPoint);
  EXPECT_THROW(quaternion_sheets_2d(Vec3(1, 0, 0)), std::invalid_argument);
}

TEST(Quaternion, KineticIdentityOnRowSpace) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  for (int i = 0; i < 100; ++i) {
    Vec4 q(n(rng), n(rng), n(rng), n(rng)), qd(n(rng), n(rng), n(rng), n(rng));
    auto j = quaternion_jacobian(q);
    EXPECT_TRUE((j * j.transpose()).isApprox(4 * q.squaredNorm() * Eigen::Matrix3d::Identity(), 1e-12));
    Vec4 proj = j.transpose() * (j * j.transpose()).inverse() * j * qd;
    Vec3 xd = j * proj;
    EXPECT_NEAR(xd.squaredNorm(), 4 * q.squaredNorm() * proj.squaredNorm(), 1e-10 * xd.squaredNorm());
    Vec4 s(q[0], q[1], 0, 0), sd(qd[0], qd[1], 0, 0);
    Vec3 xs = quaternion_jacobian(s) * sd;
    EXPECT_NEAR(xs.squaredNorm(), 4 * s.squaredNorm() * sd.squaredNorm(), 1e-10 * xs.squaredNorm());
  }
}

TEST(Kepler, OrbitClosesAndObeysThirdLaw) {
  const double m = 1.0, w = 0.5;
  Vec q0 = v2(1.0, 0.2), p0 = v2(0.3, 1.4);
  auto orb = kepler_orbit(m, w, q0, p0, pi / w, 1e-3);
  const Vec3 x0 = orb.x.front(), x1 = orb.x.back();
  EXPECT_LT((x1 - x0).norm(), 1e-10);
  EXPECT_NEAR(orb.tprime.back(), pi / w, 1e-12);
  const double a = orb.G / (4 * m * w * w);
  EXPECT_NEAR(orb.t.back(), 2 * pi * std::sqrt(m * a * a * a / orb.G), 1e-9);
  // Kepler energy: |p_x|^2 / 2M - G / r along the orbit
  for (std::size_t k = 0; k < orb.q.size(); k += 500) {
    const double r = orb.q[k].squaredNorm();
    const double v2 = orb.p[k].squaredNorm() / (16 * m * m * r);
    EXPECT_NEAR(0.5 * m * v2 * 4 - orb.G / r, orb.energy, 1e-9);
  }
}

TEST(Coulomb, SpectrumAndOrbitals) {
  CoulombConfig c;
  c.G = 2.0;
  CoulombCatalog cat(c);
  ASSERT_EQ(cat.levels.size(), 10u);
  for (auto& l : cat.levels) {
    EXPECT_NEAR(l.omega, 2.0 / l.k, 1e-13);
    EXPECT_NEAR(cat.levels[0].energy / l.energy, double(l.k * l.k), 1e-10 * l.k * l.k);
  }
  for (double a : {0.0, 0.4, -1.3})
    for (double b : {0.2, -0.7}) {
      const double r = a * a + b * b;
      EXPECT_NEAR(cat.orbital_wave(Orbital::s1(), v2(a, b)).real(), std::exp(-r / 2) / std::sqrt(pi), 1e-14);
      EXPECT_NEAR(cat.orbital_wave(Orbital::p2(), v2(a, b)).real(), 2 * a * b * std::exp(-r / 2) / std::sqrt(pi),
                  1e-14);
    }
  Orbital bad{2, {{{1, 0}, 1.0}}};
  EXPECT_THROW(bad.validate(), ConfigError);
  Orbital::d3().validate();
}

TEST(Coulomb, OddTuplesCancelOnSheetSum) {
  CoulombCatalog cat({});
  Vec q(4);
  q << 0.3, -0.8, 0.5, 1.1;
  EXPECT_NEAR(cat.sheet_sum({1, 0, 2, 0}, q), 0, 1e-15);
  EXPECT_NEAR(cat.sheet_sum({1, 1, 0, 3}, q), 0, 1e-15);
  EXPECT_GT(std::abs(cat.sheet_sum({1, 1, 0, 0}, q)), 1e-3);
}

TEST(Spin, PauliAndDiracAlgebra) {
  auto s = pauli_matrices();
  EXPECT_TRUE((s[0] * s[1]).isApprox(I * s[2], 1e-15));
  EXPECT_LT(pauli_algebra().delta_error, 1e-15);
  auto d = dirac_algebra();
  EXPECT_LT(d.delta_error, 1e-15);
  EXPECT_GT(d.eta_error, 1.0);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    Vec3 n = random_unit(rng);
    Mat2 sn = sigma_dot(n);
    EXPECT_TRUE((sn * sn).isApprox(Mat2::Identity(), 1e-14));
    Eigen::SelfAdjointEigenSolver<Mat2> es(sn);
    EXPECT_NEAR(es.eigenvalues()[0], -1, 1e-14);
    EXPECT_NEAR(es.eigenvalues()[1], 1, 1e-14);
    auto e = eigenspinors(n);
    EXPECT_LT((sn * e.up - e.up).norm(), 1e-14);
    EXPECT_LT((sn * e.down + e.down).norm(), 1e-14);
    EXPECT_LT((sn - (e.up * e.up.adjoint() - e.down * e.down.adjoint())).norm(), 1e-14);
  }
  auto pole = eigenspinors(Vec3(0, 0, 1));
  EXPECT_TRUE(pole.up.isApprox(Spinor(1, 0)));
  EXPECT_TRUE(pole.down.isApprox(Spinor(0, 1)));
}

TEST(Spin, RelativisticSpectralDecomposition) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n;
  for (int i = 0; i < 50; ++i) {
    Vec3 p(n(rng), n(rng), n(rng));
    const double e0 = 0.8, c = 1.7;
    auto r = relativistic_eigenspinors(p, e0, c);
    EXPECT_NEAR(r.E_plus, std::sqrt(e0 * e0 + p.squaredNorm() * c * c), 1e-13);
    Mat4 h = dirac_hamiltonian(p, e0, c);
    EXPECT_LT((spectral_sum(r) - h).norm(), 1e-12 * h.norm());
    EXPECT_LT((h * r.minus_down - r.E_minus * r.minus_down).norm(), 1e-12);
    EXPECT_NEAR(r.plus_up.norm(), 1, 1e-13);
  }
  auto rest = relativistic_eigenspinors(Vec3::Zero(), 1.0);
  EXPECT_NEAR(rest.E_minus, -1.0, 1e-15);
  EXPECT_NEAR(rest.plus_up.tail<2>().norm(), 0, 1e-15);
}

TEST(Spin, EprCorrelationAndChsh) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> a(-pi, pi), b(0, pi);
  for (int i = 0; i < 200; ++i) {
    Vec3 n1 = random_unit(rng), n2 = random_unit(rng);
    EXPECT_NEAR(epr_correlation(n1, n2, a(rng), b(rng)), -n1.dot(n2), 1e-14);
  }
  Vec3 z(0, 0, 1), x(1, 0, 0);
  EXPECT_NEAR(epr_correlation(z, z), -1, 1e-15);
  EXPECT_NEAR(epr_correlation(z, x), 0, 1e-15);
  auto n = chsh_angles();
  EXPECT_NEAR(chsh(n[0], n[1], n[2], n[3]), 2 * std::sqrt(2.0), 1e-14);
}

TEST(Spin, BellSignModel) {
  Vec3 z(0, 0, 1), x(1, 0, 0), d45 = direction(0, pi / 4);
  EXPECT_DOUBLE_EQ(bell_binary_model(z, z, 1000, 1), -1.0);
  EXPECT_NEAR(bell_binary_model(z, x, 400000, 1), 0.0, 0.01);
  EXPECT_NEAR(bell_binary_model(z, d45, 400000, 2), -0.5, 0.01);
  EXPECT_EQ(bell_binary_model(z, d45, 1000, 5), bell_binary_model(z, d45, 1000, 5));
  EXPECT_LT(bell_chsh(chsh_angles(), 400000, 3), 2.01);
}

TEST(Config, RoundTripSchemaAndErrors) {
  BoxConfig b;
  b.L = 2.5;
  auto j = to_json(b);
  EXPECT_EQ(from_json<BoxConfig>(j).L, 2.5);
  EXPECT_THROW(from_json<BoxConfig>(json{{"Lx", 1.0}}), ConfigError);
  EXPECT_THROW(from_json<BoxConfig>(json{{"L", "wide"}}), ConfigError);
  EXPECT_THROW(from_json<BoxConfig>(json{{"k_max", 2.5}}), ConfigError);
  auto ab = from_json<AharonovBohmConfig>(json{{"slit", {{"p0", 3.0}}}, {"flux", 0.5}});
  EXPECT_EQ(ab.slit.p0, 3.0);
  EXPECT_THROW(from_json<AharonovBohmConfig>(json{{"slit", {{"q", 3.0}}}}), ConfigError);
  auto s = schema_of<HarmonicConfig>();
  EXPECT_EQ(s["properties"]["omega"]["type"], "number");
  EXPECT_EQ(s["properties"]["dim"]["type"], "integer");
  EXPECT_EQ(config_hash(j), config_hash(to_json(b)));
  EXPECT_NE(config_hash(j), config_hash(to_json(BoxConfig{})));
}
