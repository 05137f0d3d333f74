#pragma once

#include <vector>

#include "mpw/core.hpp"

namespace mpw {

// physicists' Hermite polynomial H_k(z)
inline double hermite_polynomial(int k, double z) {
  if (k < 0) throw std::invalid_argument("negative Hermite index");
  double h0 = 1, h1 = 2 * z;
  if (k == 0) return h0;
  for (int n = 1; n < k; ++n) {
    double h2 = 2 * z * h1 - 2 * n * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

// Psi_0..Psi_K at x, scale = M omega / hbar
inline std::vector<double> hermite_functions(int K, double x, double scale = 1.0) {
  if (K < 0) throw std::invalid_argument("negative Hermite index");
  const double z = std::sqrt(scale) * x;
  std::vector<double> psi(K + 1);
  psi[0] = std::pow(scale / pi, 0.25) * std::exp(-0.5 * z * z);
  if (K >= 1) psi[1] = std::sqrt(2.0) * z * psi[0];
  for (int k = 1; k < K; ++k)
    psi[k + 1] = std::sqrt(2.0 / (k + 1)) * z * psi[k] - std::sqrt(double(k) / (k + 1)) * psi[k - 1];
  return psi;
}

inline double hermite_function(int k, double x, double scale = 1.0) {
  return hermite_functions(k, x, scale)[k];
}

}  // namespace mpw
