// Copyright (c) the msfem2d1d authors
// SPDX-License-Identifier: Apache-2.0
#include "msfem/reference.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace msfem {

double slab_losses(double sigma, double mu, double d_fe, double frequency,
                   double h_magnitude) {
  if (sigma <= 0.0 || mu <= 0.0 || d_fe <= 0.0)
    throw std::invalid_argument("slab_losses: material parameters must be positive");
  if (frequency < 0.0) throw std::invalid_argument("slab_losses: negative frequency");
  if (frequency == 0.0) return 0.0;
  const double rho = 1.0 / sigma;
  const double omega = 2.0 * std::numbers::pi * frequency;
  const double delta = std::sqrt(2.0 * rho / (omega * mu));
  const double xi = d_fe / delta;
  return rho * h_magnitude * h_magnitude / delta * (std::sinh(xi) - std::sin(xi)) /
         (std::cosh(xi) + std::cos(xi));
}

OverkillReference make_overkill(const ProblemSetup& base, int levels) {
  if (levels < 1) throw std::invalid_argument("make_overkill: levels must be >= 1");
  OverkillReference ref;
  ref.setup = base;
  // one level halves the mesh size: two bisection sweeps
  for (int i = 0; i < 2 * levels; ++i) ref.setup.mesh = ref.setup.mesh.uniform_refine();
  ref.setup.nodal_order = std::min(base.nodal_order + 1, 3);
  ref.setup.edge_order = std::min(base.edge_order + 1, 2);
  ref.solution = solve_msfem(ref.setup);
  return ref;
}

} // namespace msfem
