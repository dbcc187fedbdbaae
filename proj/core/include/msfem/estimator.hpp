// Copyright (c) the msfem2d1d authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "msfem/assembly.hpp"

#include <array>
#include <functional>
#include <optional>
#include <vector>

namespace msfem {

// Recovered current potentials of both flux problems, all on one nodal
// space with conductor support.
struct EquilibratedFlux {
  std::shared_ptr<const H1Space> space;
  VectorXc gamma0, phi1, psi1; // problem 1: phi0 / phi1_hat components
  VectorXc gamma2, phi3, psi2; // problem 2: phi2 / phi3_hat components
};

// Assembles and solves both flux-recovery saddle problems. They are
// independent; with MSFEM_NUM_THREADS > 1 they run concurrently.
EquilibratedFlux solve_equilibration(const ProblemSetup& setup,
                                     const MsfemSolution& solution);

// Dual-norm residuals of the two equilibrium constraints, relative to the
// corresponding constraint load (absolute when the load vanishes).
std::array<double, 2> constraint_residuals(const ProblemSetup& setup,
                                           const MsfemSolution& solution,
                                           const EquilibratedFlux& flux);

// Current density in factored form: J = K r(x,y) phi1_hat(z) + z_hat c(x,y)
// phi2(z). Both callbacks take a conductor triangle id and barycentric
// coordinates.
struct CurrentField {
  std::function<Vector2c(int, const double*)> in_plane; // r
  std::function<Complex(int, const double*)> axial;     // c
};

// rho-weighted squared norm of a current field over the conductor,
// thickness direction integrated in closed form.
double loss_norm_sq(const ProblemSetup& setup, const CurrentField& field,
                    int quad_degree);

// Same for the eddy-current density of a solved state, where r is the
// rotated tangential field (-T2_y, T2_x) and c = curl2D T2.
double loss_norm_sq(const ProblemSetup& setup, const MsfemSolution& solution);

// Time-averaged eddy-current losses of the solved state (peak phasors):
// 0.5 * loss_norm_sq.
double msfem_losses(const ProblemSetup& setup, const MsfemSolution& solution);

// Elementwise estimator contributions over the conductor triangles.
struct IndicatorField {
  std::vector<int> cells;      // conductor triangle ids of the mesh
  std::vector<double> eta_sq;  // aligned with `cells`, each >= 0
  double total_sq = 0.0;
};

// rho-weighted squared distance between the recovered equilibrated current
// and the MSFEM current, evaluated per triangle from the thickness
// coefficient table. Throws std::logic_error when an element integral is
// more negative than numerical noise (-1e-12 of the total) allows.
IndicatorField evaluate_indicators(const ProblemSetup& setup,
                                   const MsfemSolution& solution,
                                   const EquilibratedFlux& flux);

struct MarkResult {
  std::vector<int> cells; // triangles selected for refinement
  bool converged = false; // all indicators were zero
};

// Threshold marking: selects { T : eta_sq_T >= threshold * max eta_sq }.
MarkResult mark(const IndicatorField& indicators, double threshold = 0.5);

// Squared loss-norm error of `solution` against a reference state on the
// same mesh or a bisection refinement of it, accumulated per triangle of
// the solution mesh. Throws std::invalid_argument for non-nested meshes.
struct ErrorField {
  std::vector<int> cells;     // conductor triangle ids (solution mesh)
  std::vector<double> err_sq; // aligned with `cells`
  double total_sq = 0.0;
};

ErrorField true_error_field(const ProblemSetup& setup,
                            const MsfemSolution& solution,
                            const MsfemSolution& reference);

double true_error_sq(const ProblemSetup& setup, const MsfemSolution& solution,
                     const MsfemSolution& reference);

// One adaptive (or uniform) refinement run.
struct AdaptiveOptions {
  int max_iterations = 10;        // refinement steps after the initial solve
  Eigen::Index dof_budget = 0;    // stop before exceeding this (0: no budget)
  double mark_threshold = 0.5;
  bool uniform = false;           // uniform sweeps instead of marking
  bool with_reference = false;    // post-hoc overkill errors
  int reference_levels = 2;       // overkill h-halvings past the final mesh
};

struct AdaptiveRow {
  int iteration = 0;
  Eigen::Index n_dof = 0;   // main-system DOFs
  double eta_total = 0.0;   // sqrt of the estimator total
  std::optional<double> error;      // loss-norm error vs overkill
  std::optional<double> efficiency; // eta_total / error
};

struct AdaptiveResult {
  std::vector<AdaptiveRow> history;
  std::vector<Mesh2D> meshes;             // one per iteration
  std::vector<MsfemSolution> solutions;   // one per iteration
  std::vector<IndicatorField> indicators; // one per iteration
  bool converged = false;                 // stopped on all-zero indicators
};

// solve -> equilibrate -> evaluate -> mark -> refine, until the iteration
// cap or DOF budget. With `with_reference`, errors are measured after the
// loop against one overkill solve on a refinement of the final mesh.
AdaptiveResult adaptive_loop(const ProblemSetup& setup,
                             const AdaptiveOptions& options = {});

} // namespace msfem
