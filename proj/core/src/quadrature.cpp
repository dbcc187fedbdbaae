// Copyright (c) the msfem2d1d authors
// SPDX-License-Identifier: Apache-2.0
#include "msfem/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace msfem {

GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  GaussRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  // Newton iteration on the Legendre polynomial, seeded with the Chebyshev
  // estimate; converges to machine precision in a handful of steps.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.points[i] = -x;
    rule.weights[i] = w;
    rule.points[n - 1 - i] = x;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.points[n / 2] = 0.0;
  return rule;
}

namespace {

std::vector<TriQuadPoint> make_triangle_rule(int degree) {
  // Duffy map: (u, v) in [0,1]^2 -> (x, y) = (u, v(1-u)), Jacobian (1-u).
  // A total-degree-d polynomial becomes degree <= d+1 per direction.
  int n = (degree + 3) / 2;
  GaussRule g = gauss_legendre(n);
  std::vector<TriQuadPoint> pts;
  pts.reserve(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    double u = 0.5 * (g.points[i] + 1.0);
    double wu = 0.5 * g.weights[i];
    for (int j = 0; j < n; ++j) {
      double v = 0.5 * (g.points[j] + 1.0);
      double wv = 0.5 * g.weights[j];
      double x = u;
      double y = v * (1.0 - u);
      TriQuadPoint q;
      q.l1 = x;
      q.l2 = y;
      q.l0 = 1.0 - x - y;
      q.w = wu * wv * (1.0 - u);
      pts.push_back(q);
    }
  }
  return pts;
}

} // namespace

const std::vector<TriQuadPoint>& triangle_rule(int degree) {
  if (degree < 0 || degree > 40) throw std::invalid_argument("triangle_rule: unsupported degree");
  static std::map<int, std::vector<TriQuadPoint>> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(degree);
  if (it == cache.end()) it = cache.emplace(degree, make_triangle_rule(degree)).first;
  return it->second;
}

} // namespace msfem
