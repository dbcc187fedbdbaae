// Copyright (c) the msfem2d1d authors
// SPDX-License-Identifier: Apache-2.0
#include "msfem/estimator.hpp"

#include "msfem/linsolve.hpp"
#include "msfem/quadrature.hpp"
#include "msfem/reference.hpp"
#include "msfem/thickness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <set>
#include <stdexcept>
#include <utility>

namespace msfem {

namespace {

int env_threads() {
  const char* s = std::getenv("MSFEM_NUM_THREADS");
  if (!s) return 1;
  char* end = nullptr;
  const long v = std::strtol(s, &end, 10);
  if (end == s || v < 1) return 1;
  return static_cast<int>(std::min(v, 256L));
}

SparseMatrixXd real_part(const SparseMatrixXc& a) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(a.nonZeros()));
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrixXc::InnerIterator it(a, k); it; ++it)
      if (it.value().real() != 0.0)
        trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                           it.value().real());
  SparseMatrixXd out(a.rows(), a.cols());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

VectorXc solve_block_system(const SparseSystem& sys) {
  if (sys.real_valued) return RealSparseFactor(real_part(sys.a)).solve(sys.b);
  return solve_sparse(sys.a, sys.b);
}

double re_dot(const Vector2c& x, const Vector2c& y) { return x.dot(y).real(); }

Point2 physical_point(const Mesh2D& mesh, int t, const double lambda[3]) {
  const Triangle& tri = mesh.triangle(t);
  return lambda[0] * mesh.vertex(tri.v[0]) + lambda[1] * mesh.vertex(tri.v[1]) +
         lambda[2] * mesh.vertex(tri.v[2]);
}

void barycentric(const Mesh2D& mesh, int t, const Point2& p, double lambda[3]) {
  const Triangle& tri = mesh.triangle(t);
  const Point2& a = mesh.vertex(tri.v[0]);
  Eigen::Matrix2d m;
  m.col(0) = mesh.vertex(tri.v[1]) - a;
  m.col(1) = mesh.vertex(tri.v[2]) - a;
  const Eigen::Vector2d x = m.inverse() * (p - a);
  lambda[1] = x[0];
  lambda[2] = x[1];
  lambda[0] = 1.0 - x[0] - x[1];
}

std::vector<int> conductor_cells(const Mesh2D& mesh) {
  std::vector<int> cells;
  for (int t = 0; t < mesh.triangle_count(); ++t)
    if (mesh.triangle(t).region == RegionTag::conductor) cells.push_back(t);
  return cells;
}

// Plain stiffness matrix on the flux space with one gauge DOF pinned per
// conductor component; SPD on the gauged space.
RealSparseFactor gauged_stiffness(const H1Space& space) {
  const Mesh2D& mesh = space.mesh();
  const int nl = space.local_size();
  std::vector<Eigen::Vector2d> grads(static_cast<size_t>(nl));
  std::vector<Eigen::Triplet<double>> trips;
  const auto& rule = triangle_rule(std::max(2 * (space.order() - 1), 0));
  const std::vector<int> gauge = space.gauge_dofs();
  const std::set<int> fixed(gauge.begin(), gauge.end());
  for (int t : space.active_cells()) {
    const std::span<const int> dofs = space.cell_dofs(t);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(nl, nl);
    for (const TriQuadPoint& q : rule) {
      const double lambda[3] = {q.l0, q.l1, q.l2};
      const double w = q.w * 2.0 * mesh.area(t);
      space.basis_gradients(t, lambda, grads.data());
      for (int i = 0; i < nl; ++i)
        for (int j = 0; j < nl; ++j) local(i, j) += w * grads[i].dot(grads[j]);
    }
    for (int i = 0; i < nl; ++i)
      for (int j = 0; j < nl; ++j)
        if (!fixed.count(dofs[i]) && !fixed.count(dofs[j]))
          trips.emplace_back(dofs[i], dofs[j], local(i, j));
  }
  for (int d : gauge) trips.emplace_back(d, d, 1.0);
  SparseMatrixXd s(space.dof_count(), space.dof_count());
  s.setFromTriplets(trips.begin(), trips.end());
  return RealSparseFactor(s);
}

} // namespace

EquilibratedFlux solve_equilibration(const ProblemSetup& setup,
                                     const MsfemSolution& solution) {
  auto run = [&](int which) {
    EquilibrationSystem es = which == 1 ? assemble_equilibration_1(setup, solution)
                                        : assemble_equilibration_2(setup, solution);
    VectorXc x = solve_block_system(es.system);
    return std::pair(es.space, std::move(x));
  };
  std::pair<std::shared_ptr<const H1Space>, VectorXc> r1, r2;
  if (env_threads() > 1) {
    auto second = std::async(std::launch::async, run, 2);
    r1 = run(1);
    r2 = second.get();
  } else {
    r1 = run(1);
    r2 = run(2);
  }
  const Eigen::Index n1 = r1.first->dof_count();
  EquilibratedFlux flux;
  flux.space = r1.first;
  flux.gamma0 = r1.second.segment(0, n1);
  flux.phi1 = r1.second.segment(n1, n1);
  flux.psi1 = r1.second.segment(2 * n1, n1);
  flux.gamma2 = r2.second.segment(0, n1);
  flux.phi3 = r2.second.segment(n1, n1);
  flux.psi2 = r2.second.segment(2 * n1, n1);
  return flux;
}

std::array<double, 2> constraint_residuals(const ProblemSetup& setup,
                                           const MsfemSolution& solution,
                                           const EquilibratedFlux& flux) {
  const H1Space& space = *flux.space;
  const Mesh2D& mesh = space.mesh();
  if (!mesh.same_mesh(setup.mesh) || !mesh.same_mesh(solution.t2_space->mesh()))
    throw std::invalid_argument("constraint_residuals: mesh mismatch");
  const int n1 = space.dof_count();
  const int nl = space.local_size();
  const Complex iwmu(0.0, setup.omega() * setup.conductor.mu);

  // Multiplier-block stiffness and the two constraint loads, with the same
  // quadrature the saddle assembly uses.
  std::vector<Eigen::Vector2d> grads(static_cast<size_t>(nl));
  std::vector<Eigen::Triplet<double>> trips;
  VectorXc f1 = VectorXc::Zero(n1);
  VectorXc f2 = VectorXc::Zero(n1);
  const int deg = std::max(setup.nodal_order, setup.edge_order);
  const auto& rule = triangle_rule(2 * deg);
  const auto& rule_source = triangle_rule(deg + 2);
  for (int t : space.active_cells()) {
    const std::span<const int> dofs = space.cell_dofs(t);
    for (const TriQuadPoint& q : rule) {
      const double lambda[3] = {q.l0, q.l1, q.l2};
      const double w = q.w * 2.0 * mesh.area(t);
      space.basis_gradients(t, lambda, grads.data());
      const Vector2c g0 = solution.phi0_space->eval_grad(solution.phi0, t, lambda);
      const Vector2c t2 = solution.t2_space->eval(solution.t2, t, lambda);
      for (int i = 0; i < nl; ++i) {
        const Eigen::Vector2d rot = rot_from_grad(grads[i]);
        f1[dofs[i]] -= w * iwmu * (g0.x() * rot.x() + g0.y() * rot.y());
        f2[dofs[i]] -= w * iwmu * (t2.x() * rot.x() + t2.y() * rot.y());
        for (int j = 0; j < nl; ++j)
          trips.emplace_back(dofs[i], dofs[j], w * grads[i].dot(grads[j]));
      }
    }
    for (const TriQuadPoint& q : rule_source) {
      const double lambda[3] = {q.l0, q.l1, q.l2};
      const double w = q.w * 2.0 * mesh.area(t);
      const Eigen::Vector2d h = setup.source.field(physical_point(mesh, t, lambda));
      if (h.isZero(0.0)) continue;
      space.basis_gradients(t, lambda, grads.data());
      for (int i = 0; i < nl; ++i)
        f1[dofs[i]] -= w * iwmu * rot_from_grad(grads[i]).dot(h);
    }
  }
  SparseMatrixXd s(n1, n1);
  s.setFromTriplets(trips.begin(), trips.end());

  const VectorXc r1 = s * (flux.gamma0 - flux.phi1) - f1;
  const VectorXc r2 = s * (flux.gamma2 - flux.phi3) - f2;

  const std::vector<int> gauge = space.gauge_dofs();
  const RealSparseFactor fac = gauged_stiffness(space);
  auto dual_norm = [&](VectorXc v) {
    for (int d : gauge) v[d] = Complex(0.0);
    const VectorXc z = fac.solve(v);
    return std::sqrt(std::max(0.0, v.dot(z).real()));
  };
  auto relative = [&](const VectorXc& r, const VectorXc& f) {
    const double nr = dual_norm(r);
    const double nf = dual_norm(f);
    return nf > 0.0 ? nr / nf : nr;
  };
  return {relative(r1, f1), relative(r2, f2)};
}

double loss_norm_sq(const ProblemSetup& setup, const CurrentField& field,
                    int quad_degree) {
  const ThicknessProfile& profile = setup.profile;
  const CoefficientTable tab = coefficient_table(1.0 / setup.conductor.sigma, 0.0, profile);
  const auto& rule = triangle_rule(quad_degree);
  double acc = 0.0;
  for (int t : conductor_cells(setup.mesh)) {
    for (const TriQuadPoint& q : rule) {
      const double lambda[3] = {q.l0, q.l1, q.l2};
      const double w = q.w * 2.0 * setup.mesh.area(t);
      const Vector2c r = field.in_plane(t, lambda);
      const Complex c = field.axial(t, lambda);
      acc += w * (tab.phi2_prime_sq * r.squaredNorm() + tab.phi2_sq * std::norm(c));
    }
  }
  return acc;
}

double loss_norm_sq(const ProblemSetup& setup, const MsfemSolution& solution) {
  if (!solution.t2_space->mesh().same_mesh(setup.mesh))
    throw std::invalid_argument("loss_norm_sq: mesh mismatch");
  CurrentField field;
  field.in_plane = [&](int t, const double* lambda) {
    const Vector2c v = solution.t2_space->eval(solution.t2, t, lambda);
    return Vector2c(-v.y(), v.x());
  };
  field.axial = [&](int t, const double* lambda) {
    return solution.t2_space->eval_curl(solution.t2, t, lambda);
  };
  return loss_norm_sq(setup, field, 2 * solution.t2_space->order());
}

double msfem_losses(const ProblemSetup& setup, const MsfemSolution& solution) {
  return 0.5 * loss_norm_sq(setup, solution);
}

IndicatorField evaluate_indicators(const ProblemSetup& setup,
                                   const MsfemSolution& solution,
                                   const EquilibratedFlux& flux) {
  const H1Space& space = *flux.space;
  const Mesh2D& mesh = space.mesh();
  if (!mesh.same_mesh(setup.mesh) || !mesh.same_mesh(solution.t2_space->mesh()))
    throw std::invalid_argument("evaluate_indicators: mesh mismatch");
  const int n1 = space.dof_count();
  for (const VectorXc* v : {&flux.gamma0, &flux.phi1, &flux.gamma2, &flux.phi3})
    if (v->size() != n1)
      throw std::invalid_argument("evaluate_indicators: malformed flux vectors");

  const ThicknessProfile& profile = setup.profile;
  const double sigma = setup.conductor.sigma;
  const CoefficientTable ts = coefficient_table(sigma, 0.0, profile);
  const CoefficientTable tr = coefficient_table(1.0 / sigma, 0.0, profile);
  const CoefficientTable tu = coefficient_table(1.0, 0.0, profile);
  const double k2 = profile.K();
  const auto& rule = triangle_rule(2 * std::max(setup.nodal_order, setup.edge_order));

  IndicatorField out;
  out.cells = space.active_cells();
  out.eta_sq.assign(out.cells.size(), 0.0);
  double noise_scale = 0.0; // sum of absolute term contributions
  for (size_t ci = 0; ci < out.cells.size(); ++ci) {
    const int t = out.cells[ci];
    double val = 0.0;
    double mag = 0.0;
    for (const TriQuadPoint& q : rule) {
      const double lambda[3] = {q.l0, q.l1, q.l2};
      const double w = q.w * 2.0 * mesh.area(t);
      const Vector2c g1 = space.eval_grad(flux.phi1, t, lambda);
      const Vector2c g3 = space.eval_grad(flux.phi3, t, lambda);
      const Complex c0 = space.eval(flux.gamma0, t, lambda);
      const Complex c2 = space.eval(flux.gamma2, t, lambda);
      const Vector2c t2 = solution.t2_space->eval(solution.t2, t, lambda);
      const Vector2c r(-t2.y(), t2.x());
      const Complex cc = solution.t2_space->eval_curl(solution.t2, t, lambda);
      const double terms[12] = {
          ts.phi1_hat_sq * g1.squaredNorm(),
          ts.phi3_hat_sq * g3.squaredNorm(),
          2.0 * ts.phi1_hat_phi3_hat * re_dot(g1, g3),
          -2.0 * k2 * tu.phi1_hat_sq * re_dot(g1, r),
          -2.0 * k2 * tu.phi1_hat_phi3_hat * re_dot(g3, r),
          tr.phi2_prime_sq * r.squaredNorm(),
          ts.phi0_sq_sheet * std::norm(c0),
          2.0 * ts.phi0_phi2 * (c0 * std::conj(c2)).real(),
          ts.phi2_sq * std::norm(c2),
          -2.0 * tu.phi0_phi2 * (c0 * std::conj(cc)).real(),
          -2.0 * tu.phi2_sq * (c2 * std::conj(cc)).real(),
          tr.phi2_sq * std::norm(cc),
      };
      for (double term : terms) {
        val += w * term;
        mag += w * std::abs(term);
      }
    }
    out.eta_sq[ci] = val;
    noise_scale += mag;
  }
  const double neg_tol = 1e-12 * noise_scale;
  for (double& v : out.eta_sq) {
    if (v < -neg_tol)
      throw std::logic_error("evaluate_indicators: negative element integral beyond roundoff");
    v = std::max(v, 0.0);
    out.total_sq += v;
  }
  return out;
}

MarkResult mark(const IndicatorField& indicators, double threshold) {
  if (!(threshold > 0.0) || !(threshold <= 1.0))
    throw std::invalid_argument("mark: threshold must be in (0, 1]");
  if (indicators.cells.size() != indicators.eta_sq.size())
    throw std::invalid_argument("mark: malformed indicator field");
  MarkResult result;
  double mx = 0.0;
  for (double v : indicators.eta_sq) mx = std::max(mx, v);
  if (mx == 0.0) {
    result.converged = true;
    return result;
  }
  for (size_t i = 0; i < indicators.cells.size(); ++i)
    if (indicators.eta_sq[i] >= threshold * mx) result.cells.push_back(indicators.cells[i]);
  return result;
}

ErrorField true_error_field(const ProblemSetup& setup, const MsfemSolution& solution,
                            const MsfemSolution& reference) {
  const Mesh2D& ms = solution.t2_space->mesh();
  const Mesh2D& mr = reference.t2_space->mesh();
  if (!mr.is_descendant_of(ms))
    throw std::invalid_argument(
        "true_error_field: reference mesh is not a refinement of the solution mesh");

  const CoefficientTable tr =
      coefficient_table(1.0 / setup.conductor.sigma, 0.0, setup.profile);
  ErrorField out;
  out.cells = conductor_cells(ms);
  out.err_sq.assign(out.cells.size(), 0.0);
  std::vector<int> slot(static_cast<size_t>(ms.triangle_count()), -1);
  for (size_t i = 0; i < out.cells.size(); ++i) slot[out.cells[i]] = static_cast<int>(i);

  const bool same = mr.same_mesh(ms);
  const auto& rule = triangle_rule(
      2 * std::max(solution.t2_space->order(), reference.t2_space->order()));
  for (int t : conductor_cells(mr)) {
    const int ta = mr.ancestor_triangle(ms, t);
    double acc = 0.0;
    for (const TriQuadPoint& q : rule) {
      const double lambda[3] = {q.l0, q.l1, q.l2};
      const double w = q.w * 2.0 * mr.area(t);
      double lam[3] = {q.l0, q.l1, q.l2};
      if (!same) barycentric(ms, ta, physical_point(mr, t, lambda), lam);
      const Vector2c dt = reference.t2_space->eval(reference.t2, t, lambda) -
                          solution.t2_space->eval(solution.t2, ta, lam);
      const Complex dc = reference.t2_space->eval_curl(reference.t2, t, lambda) -
                         solution.t2_space->eval_curl(solution.t2, ta, lam);
      acc += w * (tr.phi2_prime_sq * dt.squaredNorm() + tr.phi2_sq * std::norm(dc));
    }
    out.err_sq[static_cast<size_t>(slot[ta])] += acc;
  }
  for (double v : out.err_sq) out.total_sq += v;
  return out;
}

double true_error_sq(const ProblemSetup& setup, const MsfemSolution& solution,
                     const MsfemSolution& reference) {
  return true_error_field(setup, solution, reference).total_sq;
}

AdaptiveResult adaptive_loop(const ProblemSetup& setup, const AdaptiveOptions& options) {
  if (options.max_iterations < 0)
    throw std::invalid_argument("adaptive_loop: negative iteration cap");
  AdaptiveResult res;
  Mesh2D mesh = setup.mesh;
  for (int it = 0;; ++it) {
    ProblemSetup s = setup;
    s.mesh = mesh;
    MsfemSolution sol = solve_msfem(s);
    EquilibratedFlux flux = solve_equilibration(s, sol);
    IndicatorField ind = evaluate_indicators(s, sol, flux);

    AdaptiveRow row;
    row.iteration = it;
    row.n_dof = sol.t2_space->dof_count() + sol.phi0_space->dof_count();
    row.eta_total = std::sqrt(ind.total_sq);
    res.history.push_back(row);
    res.meshes.push_back(mesh);
    res.solutions.push_back(std::move(sol));
    res.indicators.push_back(std::move(ind));

    if (it >= options.max_iterations) break;
    const MarkResult mk = mark(res.indicators.back(), options.mark_threshold);
    if (mk.converged) {
      res.converged = true;
      break;
    }
    const Mesh2D next = options.uniform
                            ? mesh.uniform_refine()
                            : mesh.refine(std::set<int>(mk.cells.begin(), mk.cells.end()));
    if (options.dof_budget > 0) {
      const HCurlSpace tn(next, setup.edge_order);
      const H1Space pn(next, setup.nodal_order);
      if (tn.dof_count() + pn.dof_count() > options.dof_budget) break;
    }
    mesh = next;
  }

  if (options.with_reference) {
    ProblemSetup fin = setup;
    fin.mesh = res.meshes.back();
    const OverkillReference ref = make_overkill(fin, options.reference_levels);
    for (size_t i = 0; i < res.history.size(); ++i) {
      ProblemSetup si = setup;
      si.mesh = res.meshes[i];
      const double err = std::sqrt(true_error_sq(si, res.solutions[i], ref.solution));
      res.history[i].error = err;
      if (err > 0.0) res.history[i].efficiency = res.history[i].eta_total / err;
    }
  }
  return res;
}

} // namespace msfem
