#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mpw/core.hpp"

namespace mpw {

using Vec3 = Eigen::Vector3d;
using Spinor = Eigen::Vector2cd;
using Mat2 = Eigen::Matrix2cd;
using Spinor4 = Eigen::Matrix<cplx, 4, 1>;
using Mat4 = Eigen::Matrix4cd;

struct AnticommutatorReport {
  double delta_error = 0;  // max |{a_j, a_k} - 2 delta_jk I|
  double eta_error = 0;    // max |{a_j, a_k} - 2 eta_jk I|, eta = diag(1,-1,-1,-1)
};

inline std::array<Mat2, 3> pauli_matrices() {
  Mat2 s1, s2, s3;
  s1 << 0, 1, 1, 0;
  s2 << 0, -I, I, 0;
  s3 << 1, 0, 0, -1;
  return {s1, s2, s3};
}

// gamma^0 = diag(I, -I), gamma^n = [[0, s_n], [s_n, 0]]
inline std::array<Mat4, 4> dirac_matrices() {
  auto s = pauli_matrices();
  std::array<Mat4, 4> g;
  g[0] = Mat4::Zero();
  g[0].topLeftCorner<2, 2>() = Mat2::Identity();
  g[0].bottomRightCorner<2, 2>() = -Mat2::Identity();
  for (int n = 0; n < 3; ++n) {
    g[n + 1] = Mat4::Zero();
    g[n + 1].topRightCorner<2, 2>() = s[n];
    g[n + 1].bottomLeftCorner<2, 2>() = s[n];
  }
  return g;
}

template <class M, std::size_t N>
AnticommutatorReport anticommutators(const std::array<M, N>& a) {
  AnticommutatorReport r;
  const M id = M::Identity();
  for (std::size_t j = 0; j < N; ++j)
    for (std::size_t k = 0; k < N; ++k) {
      M ac = a[j] * a[k] + a[k] * a[j];
      double d = j == k ? 2.0 : 0.0;
      double eta = j != k ? 0.0 : (j == 0 ? 2.0 : -2.0);
      r.delta_error = std::max(r.delta_error, (ac - d * id).cwiseAbs().maxCoeff());
      r.eta_error = std::max(r.eta_error, (ac - eta * id).cwiseAbs().maxCoeff());
    }
  return r;
}

inline AnticommutatorReport pauli_algebra() { return anticommutators(pauli_matrices()); }
inline AnticommutatorReport dirac_algebra() { return anticommutators(dirac_matrices()); }

inline Vec3 direction(double alpha, double beta) {
  return Vec3(std::sin(beta) * std::cos(alpha), std::sin(beta) * std::sin(alpha), std::cos(beta));
}

// (alpha, beta) of a unit vector, alpha = 0 on the poles
inline std::pair<double, double> angles(const Vec3& n) {
  const double beta = std::acos(std::clamp(n[2], -1.0, 1.0));
  const double alpha = std::hypot(n[0], n[1]) < 1e-12 ? 0.0 : std::atan2(n[1], n[0]);
  return {alpha, beta};
}

inline Mat2 sigma_dot(const Vec3& n) {
  auto s = pauli_matrices();
  return n[0] * s[0] + n[1] * s[1] + n[2] * s[2];
}

struct Eigenspinors {
  Spinor up, down;
};

inline Eigenspinors eigenspinors(double alpha, double beta) {
  Eigenspinors e;
  e.up << std::cos(beta / 2), std::exp(I * alpha) * std::sin(beta / 2);
  e.down << -std::exp(-I * alpha) * std::sin(beta / 2), std::cos(beta / 2);
  return e;
}

inline Eigenspinors eigenspinors(const Vec3& n) {
  if (std::abs(n.norm() - 1) > 1e-10) throw std::invalid_argument("direction must be a unit vector");
  auto [a, b] = angles(n);
  return eigenspinors(a, b);
}

// E_o gamma^0 + c sum_n gamma^n p_n
inline Mat4 dirac_hamiltonian(const Vec3& p, double rest_energy, double c = 1) {
  auto g = dirac_matrices();
  Mat4 h = rest_energy * g[0];
  for (int n = 0; n < 3; ++n) h += c * p[n] * g[n + 1];
  return h;
}

struct RelativisticSpinors {
  Spinor4 plus_up, plus_down, minus_up, minus_down;
  double E_plus = 0, E_minus = 0;
  double norm = 1;  // N_+ = N_-
};

// xi^+ = (chi; c S.p / D+ chi) / N,  xi^- = (c S.p / D- chi; chi) / N, chi along p
inline RelativisticSpinors relativistic_eigenspinors(const Vec3& p, double rest_energy, double c = 1) {
  RelativisticSpinors r;
  const double p2 = p.squaredNorm();
  r.E_plus = std::sqrt(rest_energy * rest_energy + p2 * c * c);
  r.E_minus = -r.E_plus;
  const double dp = r.E_plus + rest_energy, dm = r.E_minus - rest_energy;
  if (dp == 0 || dm == 0) throw DegenerateSystem("relativistic eigenspinors need nonzero energy gaps");
  r.norm = std::sqrt(1 + c * c * p2 / (dp * dp));
  const Vec3 n = p2 > 0 ? Vec3(p / std::sqrt(p2)) : Vec3(0, 0, 1);
  const Eigenspinors chi = eigenspinors(n);
  const Mat2 sp = sigma_dot(p);
  auto plus = [&](const Spinor& x) {
    Spinor4 v;
    v << x, c * sp * x / dp;
    return Spinor4(v / r.norm);
  };
  auto minus = [&](const Spinor& x) {
    Spinor4 v;
    v << c * sp * x / dm, x;
    return Spinor4(v / r.norm);
  };
  r.plus_up = plus(chi.up);
  r.plus_down = plus(chi.down);
  r.minus_up = minus(chi.up);
  r.minus_down = minus(chi.down);
  return r;
}

inline Mat4 spectral_sum(const RelativisticSpinors& r) {
  auto o = [](const Spinor4& v) { return Mat4(v * v.adjoint()); };
  return r.E_plus * (o(r.plus_up) + o(r.plus_down)) + r.E_minus * (o(r.minus_up) + o(r.minus_down));
}

inline Eigen::Vector4cd kron(const Spinor& a, const Spinor& b) {
  Eigen::Vector4cd v;
  v << a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1];
  return v;
}

inline Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return m;
}

// (chi_up x chi_down - chi_down x chi_up) / sqrt 2 for the initial direction
inline Eigen::Vector4cd singlet(double alpha_o, double beta_o) {
  auto e = eigenspinors(alpha_o, beta_o);
  return (kron(e.up, e.down) - kron(e.down, e.up)) / std::sqrt(2.0);
}

// filtered pair (S.n1 x S.n2) applied to the initial pair, projected on it
inline double epr_correlation(const Vec3& n1, const Vec3& n2, double alpha_o = 0, double beta_o = 0) {
  const Eigen::Vector4cd s = singlet(alpha_o, beta_o);
  const Eigen::Vector4cd f = kron(sigma_dot(n1), sigma_dot(n2)) * s;
  return s.dot(f).real();
}

template <class Corr>
double chsh(const Corr& E, const Vec3& n1, const Vec3& n2, const Vec3& n3, const Vec3& n4) {
  return std::abs(E(n1, n2) - E(n1, n4) + E(n3, n2) + E(n3, n4));
}

inline double chsh(const Vec3& n1, const Vec3& n2, const Vec3& n3, const Vec3& n4) {
  return chsh([](const Vec3& a, const Vec3& b) { return epr_correlation(a, b); }, n1, n2, n3, n4);
}

// coplanar detectors at 0, 45, 90, 135 degrees, ordered (n1, n2, n3, n4) = (0, 45, 90, 135)
// with S = |E(0,45) - E(0,135) + E(90,45) + E(90,135)|
inline std::array<Vec3, 4> chsh_angles() {
  std::array<Vec3, 4> n;
  const double deg[] = {0, 45, 90, 135};
  for (int i = 0; i < 4; ++i) n[i] = direction(0, deg[i] * pi / 180);
  return n;
}

// counter-based SplitMix64
struct CounterRng {
  std::uint64_t seed = 0;

  std::uint64_t at(std::uint64_t i) const {
    std::uint64_t z = seed + (i + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  double uniform(std::uint64_t i) const { return (at(i) >> 11) * 0x1.0p-53; }
};

// A1 = sign(n1.l), A2 = -sign(n2.l), l uniform on the sphere
inline double bell_binary_model(const Vec3& n1, const Vec3& n2, std::uint64_t samples,
                                std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("sample count must be positive");
  CounterRng rng{seed};
  double sum = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    const double z = 2 * rng.uniform(2 * s) - 1;
    const double a = 2 * pi * rng.uniform(2 * s + 1);
    const double r = std::sqrt(std::max(0.0, 1 - z * z));
    const Vec3 l(r * std::cos(a), r * std::sin(a), z);
    const double a1 = n1.dot(l) >= 0 ? 1 : -1;
    const double a2 = n2.dot(l) >= 0 ? -1 : 1;
    sum += a1 * a2;
  }
  return sum / double(samples);
}

inline double bell_chsh(const std::array<Vec3, 4>& n, std::uint64_t samples, std::uint64_t seed) {
  auto E = [&](const Vec3& a, const Vec3& b) { return bell_binary_model(a, b, samples, seed); };
  return chsh(E, n[0], n[1], n[2], n[3]);
}

}  // namespace mpw
