#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mpw {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define MPW_ERROR(Name)                          \
  struct Name : Error {                          \
    using Error::Error;                          \
  }

MPW_ERROR(SingularMetric);
MPW_ERROR(StencilOutOfDomain);
MPW_ERROR(EventLoop);
MPW_ERROR(NonFiniteState);
MPW_ERROR(CausticTime);
MPW_ERROR(EmptyBranchSet);
MPW_ERROR(DomainMismatch);
MPW_ERROR(GridTooCoarse);
MPW_ERROR(GridMismatch);
MPW_ERROR(ZeroInitialDensity);
MPW_ERROR(OutcomeOutOfRange);
MPW_ERROR(NoRoots);
MPW_ERROR(GaugeViolation);
MPW_ERROR(DegenerateSystem);
MPW_ERROR(OriginBranchPoint);
MPW_ERROR(SolverDivergence);
MPW_ERROR(ConfigError);
MPW_ERROR(CheckFailed);

#undef MPW_ERROR

inline bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// 5-point central derivative of a scalar function along one axis
template <class F>
auto central_diff(F&& f, const Vec& x, int axis, double h) {
  Vec a = x, b = x, c = x, d = x;
  a[axis] += 2 * h;
  b[axis] += h;
  c[axis] -= h;
  d[axis] -= 2 * h;
  return (-f(a) + 8.0 * f(b) - 8.0 * f(c) + f(d)) / (12.0 * h);
}

template <class F>
CVec numeric_gradient(F&& f, const Vec& x, double h) {
  CVec g(x.size());
  for (int n = 0; n < x.size(); ++n) g[n] = cplx(central_diff(f, x, n, h));
  return g;
}

}  // namespace mpw
