// Copyright (c) the msfem2d1d authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "msfem/fespace.hpp"
#include "msfem/linsolve.hpp"
#include "msfem/sources.hpp"
#include "msfem/thickness.hpp"

#include <memory>
#include <string>
#include <vector>

namespace msfem {

// Material data of one mesh region.
struct Material {
  double sigma = 0.0; // S/m
  double mu = 0.0;    // H/m
};

// Complete description of one eddy-current problem. `air.mu` doubles as the
// permeability of the insulation layers inside the laminate.
struct ProblemSetup {
  Mesh2D mesh;
  ThicknessProfile profile;
  Material conductor; // sigma > 0 required
  Material air;       // sigma == 0 required
  double frequency = 0.0; // Hz; time convention e^{+i omega t}
  BiotSavartSource source;
  int nodal_order = 2; // Phi0 and equilibration spaces
  int edge_order = 1;  // T2 space

  double omega() const;
  // Throws ParseError when a field is out of range or the mesh has no
  // conductor region.
  void validate() const;
};

// Offsets of the named DOF blocks inside one solution vector.
struct BlockLayout {
  std::vector<std::string> names;
  std::vector<Eigen::Index> sizes;

  Eigen::Index offset(std::size_t block) const;
  Eigen::Index total() const;
};

// Assembled linear system. Essential constraints and gauges are folded in
// symmetrically: constrained rows and columns are cleared, the diagonal is
// set to one and the right-hand side entry to zero, so solutions carry exact
// zeros at the listed DOFs and A = A^T is preserved.
struct SparseSystem {
  SparseMatrixXc a;
  VectorXc b;
  BlockLayout layout;
  std::vector<Eigen::Index> constrained; // sorted global DOF indices
  bool real_valued = false; // true for the equilibration saddle systems
};

// Solved state of the main problem.
struct MsfemSolution {
  std::shared_ptr<const HCurlSpace> t2_space;
  std::shared_ptr<const H1Space> phi0_space;
  VectorXc t2;
  VectorXc phi0;
};

// Main system plus the spaces that give its DOF blocks meaning.
// Block layout: [t2, phi0].
struct MsfemSystem {
  std::shared_ptr<const HCurlSpace> t2_space;
  std::shared_ptr<const H1Space> phi0_space;
  SparseSystem system;

  MsfemSolution split(const VectorXc& x) const;
};

// Weak form of the T-Phi problem over the cross-section. Per-period
// thickness-direction integrals enter through CoefficientTable; tangential
// T2 is pinned on the conductor rim; Phi0 is fixed on symmetry-tagged
// boundary edges, or at a single outer-boundary DOF when the mesh has no
// symmetry edges.
MsfemSystem assemble_msfem(const ProblemSetup& setup);

// assemble_msfem + sparse LU + split.
MsfemSolution solve_msfem(const ProblemSetup& setup);

// One equilibration saddle problem. Block layout: [gamma, phi, psi], all
// three on `space` (conductor support, nodal order of the setup). psi is the
// stream-function Lagrange multiplier; phi and psi carry a one-DOF gauge per
// conductor component, the mass block pins gamma without any gauge.
struct EquilibrationSystem {
  std::shared_ptr<const H1Space> space;
  SparseSystem system;
};

// Flux-recovery problem for the phi0/phi1_hat current components: unknowns
// (gamma0, Phi1). Throws std::invalid_argument when `solution` lives on a
// different mesh than `setup`.
EquilibrationSystem assemble_equilibration_1(const ProblemSetup& setup,
                                             const MsfemSolution& solution);

// Flux-recovery problem for the phi2/phi3_hat current components: unknowns
// (gamma2, Phi3).
EquilibrationSystem assemble_equilibration_2(const ProblemSetup& setup,
                                             const MsfemSolution& solution);

} // namespace msfem
