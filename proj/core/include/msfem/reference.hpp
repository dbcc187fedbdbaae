// Copyright (c) the msfem2d1d authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "msfem/assembly.hpp"

namespace msfem {

// Time-averaged eddy-current losses per unit sheet-plane area of one
// infinite lamination of thickness d_fe under a tangential field of peak
// amplitude h_magnitude, in W/m^2. Standard 1D skin-effect solution.
double slab_losses(double sigma, double mu, double d_fe, double frequency,
                   double h_magnitude);

// Reference state on a uniformly refined mesh with raised element orders
// (capped at nodal order 3 / edge order 2). Each level halves the mesh
// size, i.e. runs two bisection sweeps; levels >= 1.
struct OverkillReference {
  ProblemSetup setup;
  MsfemSolution solution;
};

OverkillReference make_overkill(const ProblemSetup& base, int levels = 1);

} // namespace msfem
