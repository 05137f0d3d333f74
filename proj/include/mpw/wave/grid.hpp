#pragma once

#include <vector>

#include "mpw/core.hpp"

namespace mpw {

// regular grid, inclusive endpoints, first axis slowest
struct Grid {
  Vec origin;
  Vec spacing;
  std::vector<std::size_t> extents;

  static Grid uniform(const std::vector<std::pair<double, double>>& bounds,
                      const std::vector<std::size_t>& nodes) {
    if (bounds.size() != nodes.size() || bounds.empty())
      throw std::invalid_argument("grid bounds and node counts disagree");
    Grid g;
    const int d = static_cast<int>(bounds.size());
    g.origin.resize(d);
    g.spacing.resize(d);
    g.extents = nodes;
    for (int n = 0; n < d; ++n) {
      if (nodes[n] < 2) throw std::invalid_argument("grid axis needs at least two nodes");
      if (!(bounds[n].second > bounds[n].first)) throw std::invalid_argument("empty grid axis");
      g.origin[n] = bounds[n].first;
      g.spacing[n] = (bounds[n].second - bounds[n].first) / double(nodes[n] - 1);
    }
    return g;
  }

  static Grid line(double a, double b, std::size_t n) { return uniform({{a, b}}, {n}); }

  // cube of side 2*half centred on c with n nodes per axis
  static Grid cube(const Vec& c, double half, std::size_t n) {
    std::vector<std::pair<double, double>> b;
    for (int i = 0; i < c.size(); ++i) b.push_back({c[i] - half, c[i] + half});
    return uniform(b, std::vector<std::size_t>(c.size(), n));
  }

  int dim() const { return static_cast<int>(extents.size()); }

  std::size_t size() const {
    std::size_t s = 1;
    for (auto e : extents) s *= e;
    return s;
  }

  std::vector<std::size_t> multi_index(std::size_t idx) const {
    std::vector<std::size_t> m(extents.size());
    for (int n = dim() - 1; n >= 0; --n) {
      m[n] = idx % extents[n];
      idx /= extents[n];
    }
    return m;
  }

  std::size_t flat(const std::vector<std::size_t>& m) const {
    std::size_t idx = 0;
    for (int n = 0; n < dim(); ++n) idx = idx * extents[n] + m[n];
    return idx;
  }

  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int n = dim() - 1; n > axis; --n) s *= extents[n];
    return s;
  }

  Vec point(std::size_t idx) const {
    auto m = multi_index(idx);
    Vec x(dim());
    for (int n = 0; n < dim(); ++n) x[n] = origin[n] + spacing[n] * double(m[n]);
    return x;
  }

  double coord(int axis, std::size_t i) const { return origin[axis] + spacing[axis] * double(i); }

  bool on_boundary(std::size_t idx) const {
    auto m = multi_index(idx);
    for (int n = 0; n < dim(); ++n)
      if (m[n] == 0 || m[n] + 1 == extents[n]) return true;
    return false;
  }

  // trapezoid weight of a node
  double weight(std::size_t idx) const {
    auto m = multi_index(idx);
    double w = 1;
    for (int n = 0; n < dim(); ++n) {
      double f = (m[n] == 0 || m[n] + 1 == extents[n]) ? 0.5 : 1.0;
      w *= f * spacing[n];
    }
    return w;
  }

  double max_spacing() const { return spacing.maxCoeff(); }

  bool same_as(const Grid& o, double tol = 1e-12) const {
    if (extents != o.extents) return false;
    return (origin - o.origin).cwiseAbs().maxCoeff() <= tol * (1 + origin.cwiseAbs().maxCoeff()) &&
           (spacing - o.spacing).cwiseAbs().maxCoeff() <= tol * spacing.maxCoeff();
  }

  Grid scaled(double factor) const {
    std::vector<std::pair<double, double>> b;
    std::vector<std::size_t> n;
    for (int i = 0; i < dim(); ++i) {
      b.push_back({origin[i], origin[i] + spacing[i] * double(extents[i] - 1)});
      n.push_back(static_cast<std::size_t>(std::llround(double(extents[i] - 1) * factor)) + 1);
    }
    return uniform(b, n);
  }
};

}  // namespace mpw
