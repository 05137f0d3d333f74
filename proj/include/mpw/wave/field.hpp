#pragma once

#include <set>
#include <vector>

#include "mpw/wave/grid.hpp"

namespace mpw {

struct WaveField {
  Grid grid;
  int components = 1;
  std::vector<cplx> values;  // node-major, components contiguous
  double time = 0;
  double hbar = 1;
  bool normalized = false;
  std::set<std::size_t> flagged;  // nodes skipped at branch points

  WaveField() = default;
  WaveField(Grid g, int comps = 1, double t = 0, double hb = 1)
      : grid(std::move(g)), components(comps), values(grid.size() * comps, 0.0), time(t), hbar(hb) {}

  cplx& operator()(std::size_t node, int c = 0) { return values[node * components + c]; }
  cplx operator()(std::size_t node, int c = 0) const { return values[node * components + c]; }

  double abs2(std::size_t node) const {
    double s = 0;
    for (int c = 0; c < components; ++c) s += std::norm((*this)(node, c));
    return s;
  }

  double norm2() const {
    double s = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) s += grid.weight(i) * abs2(i);
    return s;
  }

  double norm() const { return std::sqrt(norm2()); }

  // trapezoid inner product <this, o>
  cplx inner(const WaveField& o) const {
    if (!grid.same_as(o.grid) || components != o.components)
      throw GridMismatch("wave fields live on different grids");
    cplx s = 0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (int c = 0; c < components; ++c) s += grid.weight(i) * std::conj((*this)(i, c)) * o(i, c);
    return s;
  }

  WaveField normalized_copy() const {
    double n = norm();
    if (!(n > 0)) throw std::invalid_argument("cannot normalize a zero wave");
    WaveField w = *this;
    for (auto& v : w.values) v /= n;
    w.normalized = true;
    return w;
  }

  void scale(cplx s) {
    for (auto& v : values) v *= s;
  }
};

}  // namespace mpw
