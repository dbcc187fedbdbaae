// Copyright (c) the msfem2d1d authors
// SPDX-License-Identifier: Apache-2.0
#include "msfem/assembly.hpp"

#include "msfem/errors.hpp"
#include "msfem/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace msfem {

double ProblemSetup::omega() const { return 2.0 * M_PI * frequency; }

void ProblemSetup::validate() const {
  if (mesh.empty()) throw ParseError("problem setup: mesh not set");
  if (!(profile.d_fe > 0.0))
    throw ParseError("problem setup: thickness profile not set");
  if (!(conductor.sigma > 0.0))
    throw ParseError("conductor conductivity must be positive");
  if (air.sigma != 0.0)
    throw ParseError("air region conductivity must be zero");
  if (!(conductor.mu > 0.0) || !(air.mu > 0.0))
    throw ParseError("permeabilities must be positive");
  if (!(frequency >= 0.0) || !std::isfinite(frequency))
    throw ParseError("frequency must be finite and nonnegative");
  if (nodal_order < 1 || nodal_order > 3)
    throw ParseError("nodal order must be 1, 2 or 3");
  if (edge_order < 1 || edge_order > 2)
    throw ParseError("edge order must be 1 or 2");
  const auto& tris = mesh.triangles();
  const bool has_conductor =
      std::any_of(tris.begin(), tris.end(), [](const Triangle& t) {
        return t.region == RegionTag::conductor;
      });
  if (!has_conductor) throw ParseError("mesh has no conductor region");
}

Eigen::Index BlockLayout::offset(std::size_t block) const {
  return std::accumulate(sizes.begin(), sizes.begin() + block, Eigen::Index(0));
}

Eigen::Index BlockLayout::total() const {
  return std::accumulate(sizes.begin(), sizes.end(), Eigen::Index(0));
}

MsfemSolution MsfemSystem::split(const VectorXc& x) const {
  if (x.size() != system.layout.total())
    throw std::invalid_argument("split: vector does not match layout");
  MsfemSolution sol;
  sol.t2_space = t2_space;
  sol.phi0_space = phi0_space;
  sol.t2 = x.segment(0, t2_space->dof_count());
  sol.phi0 = x.segment(t2_space->dof_count(), phi0_space->dof_count());
  return sol;
}

namespace {

Point2 physical_point(const Mesh2D& mesh, int t, const double lambda[3]) {
  const Triangle& tri = mesh.triangle(t);
  return lambda[0] * mesh.vertex(tri.v[0]) + lambda[1] * mesh.vertex(tri.v[1]) +
         lambda[2] * mesh.vertex(tri.v[2]);
}

Complex cdot(const Vector2c& a, const Eigen::Vector2d& b) {
  return a.x() * b.x() + a.y() * b.y();
}

// Clears constrained rows/columns from the triplets, pins the diagonal and
// zeroes the right-hand side, then compresses. Keeps A = A^T exactly.
SparseSystem build_system(Eigen::Index n,
                          std::vector<Eigen::Triplet<Complex>>& triplets,
                          VectorXc b, BlockLayout layout,
                          std::vector<Eigen::Index> fixed, bool real_valued) {
  std::sort(fixed.begin(), fixed.end());
  fixed.erase(std::unique(fixed.begin(), fixed.end()), fixed.end());
  std::vector<char> is_fixed(n, 0);
  for (Eigen::Index d : fixed) is_fixed[d] = 1;
  std::erase_if(triplets, [&](const Eigen::Triplet<Complex>& t) {
    return is_fixed[t.row()] || is_fixed[t.col()];
  });
  for (Eigen::Index d : fixed) {
    triplets.emplace_back(d, d, Complex(1.0));
    b[d] = Complex(0.0);
  }
  SparseSystem sys;
  sys.a.resize(n, n);
  sys.a.setFromTriplets(triplets.begin(), triplets.end());
  sys.a.makeCompressed();
  sys.b = std::move(b);
  sys.layout = std::move(layout);
  sys.constrained = std::move(fixed);
  sys.real_valued = real_valued;
  return sys;
}

void scatter(std::vector<Eigen::Triplet<Complex>>& triplets,
             std::span<const int> rows, std::span<const int> cols,
             Eigen::Index row_offset, Eigen::Index col_offset,
             const Eigen::MatrixXcd& local) {
  for (Eigen::Index i = 0; i < local.rows(); ++i)
    for (Eigen::Index j = 0; j < local.cols(); ++j)
      if (local(i, j) != Complex(0.0))
        triplets.emplace_back(row_offset + rows[i], col_offset + cols[j],
                              local(i, j));
}

} // namespace

MsfemSystem assemble_msfem(const ProblemSetup& setup) {
  setup.validate();
  const Mesh2D& mesh = setup.mesh;
  auto t2_space = std::make_shared<HCurlSpace>(mesh, setup.edge_order);
  auto phi0_space = std::make_shared<H1Space>(mesh, setup.nodal_order);
  const Eigen::Index nt = t2_space->dof_count();
  const Eigen::Index np = phi0_space->dof_count();
  const Eigen::Index n = nt + np;
  BlockLayout layout{{"t2", "phi0"}, {nt, np}};

  const Complex iw(0.0, setup.omega());
  const double rho = 1.0 / setup.conductor.sigma;
  const CoefficientTable rho_c = coefficient_table(rho, 0.0, setup.profile);
  const CoefficientTable mu_c =
      coefficient_table(setup.conductor.mu, setup.air.mu, setup.profile);
  const CoefficientTable mu_a =
      coefficient_table(setup.air.mu, setup.air.mu, setup.profile);

  const int basis_deg = std::max(setup.edge_order, setup.nodal_order);
  const auto& rule_matrix = triangle_rule(2 * basis_deg);
  const auto& rule_source = triangle_rule(basis_deg + 2);

  const int lt = t2_space->local_size();
  const int lp = phi0_space->local_size();
  std::vector<Eigen::Vector2d> tv(lt), pg(lp);
  std::vector<double> tc(lt), pv(lp);

  std::vector<Eigen::Triplet<Complex>> triplets;
  VectorXc b = VectorXc::Zero(n);

  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const bool cond = mesh.triangle(t).region == RegionTag::conductor;
    const double jac = 2.0 * mesh.area(t);
    const auto pd = phi0_space->cell_dofs(t);
    const double c_pp = cond ? mu_c.phi0_sq_full : mu_a.phi0_sq_full;

    Eigen::MatrixXd grad_grad = Eigen::MatrixXd::Zero(lp, lp);
    Eigen::MatrixXd t_dot_t = Eigen::MatrixXd::Zero(lt, lt);
    Eigen::MatrixXd curl_curl = Eigen::MatrixXd::Zero(lt, lt);
    Eigen::MatrixXd t_dot_grad = Eigen::MatrixXd::Zero(lt, lp);

    for (const TriQuadPoint& q : rule_matrix) {
      const double lambda[3] = {q.l0, q.l1, q.l2};
      const double w = q.w * jac;
      phi0_space->basis_gradients(t, lambda, pg.data());
      for (int i = 0; i < lp; ++i)
        for (int j = 0; j <= i; ++j) grad_grad(i, j) += w * pg[i].dot(pg[j]);
      if (cond) {
        t2_space->basis_values(t, lambda, tv.data());
        t2_space->basis_curls(t, lambda, tc.data());
        for (int i = 0; i < lt; ++i) {
          for (int j = 0; j <= i; ++j) {
            t_dot_t(i, j) += w * tv[i].dot(tv[j]);
            curl_curl(i, j) += w * tc[i] * tc[j];
          }
          for (int j = 0; j < lp; ++j) t_dot_grad(i, j) += w * tv[i].dot(pg[j]);
        }
      }
    }
    grad_grad = grad_grad.selfadjointView<Eigen::Lower>();
    t_dot_t = t_dot_t.selfadjointView<Eigen::Lower>();
    curl_curl = curl_curl.selfadjointView<Eigen::Lower>();

    scatter(triplets, pd, pd, nt, nt,
            ((iw * c_pp) * grad_grad.cast<Complex>()).eval());
    if (cond) {
      const auto td = t2_space->cell_dofs(t);
      const Eigen::MatrixXcd att =
          (rho_c.phi2_prime_sq + iw * mu_c.phi2_sq) * t_dot_t.cast<Complex>() +
          rho_c.phi2_sq * curl_curl.cast<Complex>();
      scatter(triplets, td, td, 0, 0, att);
      const Eigen::MatrixXcd atp =
          (iw * mu_c.phi0_phi2) * t_dot_grad.cast<Complex>();
      scatter(triplets, td, pd, 0, nt, atp);
      scatter(triplets, pd, td, nt, 0, atp.transpose().eval());
    }

    // Biot-Savart right-hand side; the field is not polynomial, so it gets
    // its own rule.
    if (iw != Complex(0.0)) {
      for (const TriQuadPoint& q : rule_source) {
        const double lambda[3] = {q.l0, q.l1, q.l2};
        const double w = q.w * jac;
        const Eigen::Vector2d h = setup.source.field(physical_point(mesh, t, lambda));
        if (h.isZero(0.0)) continue;
        phi0_space->basis_gradients(t, lambda, pg.data());
        for (int j = 0; j < lp; ++j)
          b[nt + pd[j]] -= iw * c_pp * w * h.dot(pg[j]);
        if (cond) {
          t2_space->basis_values(t, lambda, tv.data());
          const auto td = t2_space->cell_dofs(t);
          for (int i = 0; i < lt; ++i)
            b[td[i]] -= iw * mu_c.phi0_phi2 * w * h.dot(tv[i]);
        }
      }
    }
  }

  // Essential constraints: tangential T2 on the conductor rim, Phi0 on
  // symmetry planes (fallback: one outer-boundary DOF as gauge).
  std::vector<Eigen::Index> fixed;
  std::vector<int> rim;
  for (int e = 0; e < mesh.edge_count(); ++e)
    if (mesh.is_conductor_rim_edge(e)) rim.push_back(e);
  for (int d : t2_space->edge_dofs(rim)) fixed.push_back(d);
  std::vector<int> phi_fixed = phi0_space->boundary_dofs(BoundaryTag::symmetry);
  if (phi_fixed.empty()) {
    const std::vector<int> outer = phi0_space->boundary_dofs(BoundaryTag::outer);
    phi_fixed = outer.empty()
                    ? phi0_space->gauge_dofs()
                    : std::vector<int>{*std::min_element(outer.begin(), outer.end())};
  }
  for (int d : phi_fixed) fixed.push_back(nt + d);

  MsfemSystem out;
  out.t2_space = t2_space;
  out.phi0_space = phi0_space;
  out.system = build_system(n, triplets, std::move(b), std::move(layout),
                            std::move(fixed), false);
  return out;
}

MsfemSolution solve_msfem(const ProblemSetup& setup) {
  const MsfemSystem sys = assemble_msfem(setup);
  return sys.split(solve_sparse(sys.system.a, sys.system.b));
}

namespace {

EquilibrationSystem assemble_equilibration(const ProblemSetup& setup,
                                           const MsfemSolution& sol,
                                           bool first_problem) {
  setup.validate();
  if (!sol.t2_space || !sol.phi0_space ||
      !sol.t2_space->mesh().same_mesh(setup.mesh) ||
      !sol.phi0_space->mesh().same_mesh(setup.mesh))
    throw std::invalid_argument(
        "equilibration: solution mesh does not match setup mesh");
  if (sol.t2.size() != sol.t2_space->dof_count() ||
      sol.phi0.size() != sol.phi0_space->dof_count())
    throw std::invalid_argument("equilibration: malformed solution vectors");

  const Mesh2D& mesh = setup.mesh;
  auto space =
      std::make_shared<H1Space>(mesh, setup.nodal_order, Support::conductor);
  const Eigen::Index n1 = space->dof_count();
  const Eigen::Index n = 3 * n1;
  BlockLayout layout{{"gamma", "phi", "psi"}, {n1, n1, n1}};

  const CoefficientTable sig =
      coefficient_table(setup.conductor.sigma, 0.0, setup.profile);
  const CoefficientTable unit = coefficient_table(1.0, 0.0, setup.profile);
  const double w_mass = first_problem ? sig.phi0_sq_sheet : sig.phi2_sq;
  const double w_stiff = first_problem ? sig.phi1_hat_sq : sig.phi3_hat_sq;
  const Complex iwmu = Complex(0.0, setup.omega()) * setup.conductor.mu;

  const int basis_deg = std::max(setup.edge_order, setup.nodal_order);
  const auto& rule_matrix = triangle_rule(2 * basis_deg);
  const auto& rule_source = triangle_rule(basis_deg + 2);

  const int lp = space->local_size();
  std::vector<double> pv(lp);
  std::vector<Eigen::Vector2d> pg(lp);

  std::vector<Eigen::Triplet<Complex>> triplets;
  VectorXc b = VectorXc::Zero(n);

  for (int t : space->active_cells()) {
    const double jac = 2.0 * mesh.area(t);
    const auto pd = space->cell_dofs(t);

    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(lp, lp);
    Eigen::MatrixXd stiff = Eigen::MatrixXd::Zero(lp, lp);
    for (const TriQuadPoint& q : rule_matrix) {
      const double lambda[3] = {q.l0, q.l1, q.l2};
      const double w = q.w * jac;
      space->basis_values(t, lambda, pv.data());
      space->basis_gradients(t, lambda, pg.data());
      for (int i = 0; i < lp; ++i)
        for (int j = 0; j <= i; ++j) {
          mass(i, j) += w * pv[i] * pv[j];
          stiff(i, j) += w * pg[i].dot(pg[j]);
        }
    }
    mass = mass.selfadjointView<Eigen::Lower>();
    stiff = stiff.selfadjointView<Eigen::Lower>();

    scatter(triplets, pd, pd, 0, 0, (w_mass * mass).cast<Complex>().eval());
    scatter(triplets, pd, pd, n1, n1, (w_stiff * stiff).cast<Complex>().eval());
    const Eigen::MatrixXcd s_c = stiff.cast<Complex>();
    scatter(triplets, pd, pd, 0, 2 * n1, s_c);
    scatter(triplets, pd, pd, 2 * n1, 0, s_c);
    scatter(triplets, pd, pd, n1, 2 * n1, -s_c);
    scatter(triplets, pd, pd, 2 * n1, n1, -s_c);

    // polynomial right-hand side parts (T2, curl T2, grad Phi0)
    for (const TriQuadPoint& q : rule_matrix) {
      const double lambda[3] = {q.l0, q.l1, q.l2};
      const double w = q.w * jac;
      space->basis_values(t, lambda, pv.data());
      space->basis_gradients(t, lambda, pg.data());
      if (first_problem) {
        const Vector2c t2 = sol.t2_space->eval(sol.t2, t, lambda);
        const Vector2c rot_t2(-t2.y(), t2.x());
        const Vector2c g0 = sol.phi0_space->eval_grad(sol.phi0, t, lambda);
        const double k_phi1 = setup.profile.K() * unit.phi1_hat_sq;
        for (int j = 0; j < lp; ++j) {
          b[n1 + pd[j]] += w * k_phi1 * cdot(rot_t2, pg[j]);
          b[2 * n1 + pd[j]] -= w * iwmu * cdot(g0, rot_from_grad(pg[j]));
        }
      } else {
        const Vector2c t2 = sol.t2_space->eval(sol.t2, t, lambda);
        const Complex curl_t2 = sol.t2_space->eval_curl(sol.t2, t, lambda);
        for (int j = 0; j < lp; ++j) {
          b[pd[j]] += w * unit.phi2_sq * curl_t2 * pv[j];
          b[2 * n1 + pd[j]] -= w * iwmu * cdot(t2, rot_from_grad(pg[j]));
        }
      }
    }
    // Biot-Savart part of the constraint right-hand side (problem 1 only)
    if (first_problem && iwmu != Complex(0.0)) {
      for (const TriQuadPoint& q : rule_source) {
        const double lambda[3] = {q.l0, q.l1, q.l2};
        const double w = q.w * jac;
        const Eigen::Vector2d h = setup.source.field(physical_point(mesh, t, lambda));
        if (h.isZero(0.0)) continue;
        space->basis_gradients(t, lambda, pg.data());
        for (int j = 0; j < lp; ++j)
          b[2 * n1 + pd[j]] -= w * iwmu * rot_from_grad(pg[j]).dot(h);
      }
    }
  }

  // One gauge DOF per conductor component for phi and psi; the mass block
  // pins gamma without a gauge.
  std::vector<Eigen::Index> fixed;
  for (int d : space->gauge_dofs()) {
    fixed.push_back(n1 + d);
    fixed.push_back(2 * n1 + d);
  }

  EquilibrationSystem out;
  out.space = space;
  out.system = build_system(n, triplets, std::move(b), std::move(layout),
                            std::move(fixed), true);
  return out;
}

} // namespace

EquilibrationSystem assemble_equilibration_1(const ProblemSetup& setup,
                                             const MsfemSolution& solution) {
  return assemble_equilibration(setup, solution, true);
}

EquilibrationSystem assemble_equilibration_2(const ProblemSetup& setup,
                                             const MsfemSolution& solution) {
  return assemble_equilibration(setup, solution, false);
}

} // namespace msfem
