// Copyright (c) the msfem2d1d authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

namespace msfem {

// Gauss-Legendre rule on [-1, 1], exact for polynomials of degree 2n-1.
struct GaussRule {
  std::vector<double> points;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int n);

// Quadrature point on the reference triangle {l0 + l1 + l2 = 1, li >= 0}.
// Reference weights sum to 1/2; physical weights are w * 2 * |T|.
struct TriQuadPoint {
  double l0, l1, l2;
  double w;
};

// Rule exact for bivariate polynomials up to the given total degree
// (Duffy-collapsed tensor Gauss; robust for any degree).
const std::vector<TriQuadPoint>& triangle_rule(int degree);

} // namespace msfem
