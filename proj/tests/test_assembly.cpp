// Copyright (c) the msfem2d1d authors
// SPDX-License-Identifier: Apache-2.0
#include "msfem/assembly.hpp"

#include "helpers.hpp"
#include "msfem/errors.hpp"
#include "msfem/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

using namespace msfem;
using msfem::test::barycentric;
using msfem::test::locate;

namespace {

constexpr double mu0 = 4e-7 * M_PI;

ProblemSetup bench_materials() {
  ProblemSetup s;
  s.profile = ThicknessProfile(0.475e-3, 0.025e-3);
  s.conductor = {2.08e6, 1000.0 * mu0};
  s.air = {0.0, mu0};
  s.frequency = 50.0;
  return s;
}

Mesh2D two_tri_conductor(BoundaryTag tag) {
  return Mesh2D::rectangle(
      1.0, 1.0, 1, 1, [](double, double) { return RegionTag::conductor; },
      {tag, tag, tag, tag});
}

// Independent P1 / Whitney evaluation from vertex coordinates only.
struct TriBasis {
  const Mesh2D& mesh;
  int t;
  Point2 p[3];
  Eigen::Vector2d glam[3];
  double area;

  TriBasis(const Mesh2D& m, int tri) : mesh(m), t(tri) {
    for (int k = 0; k < 3; ++k) p[k] = m.vertex(m.triangle(tri).v[k]);
    const Eigen::Vector2d e1 = p[1] - p[0], e2 = p[2] - p[0];
    area = 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector2d opp = p[(k + 2) % 3] - p[(k + 1) % 3];
      glam[k] = Eigen::Vector2d(-opp.y(), opp.x()) / (2.0 * area);
    }
  }

  Point2 point(const double l[3]) const {
    return l[0] * p[0] + l[1] * p[1] + l[2] * p[2];
  }

  // Whitney function of the edge opposite local vertex k, oriented from the
  // smaller to the larger global vertex id.
  Eigen::Vector2d whitney(int k, const double l[3]) const {
    int u = (k + 1) % 3, v = (k + 2) % 3;
    if (mesh.triangle(t).v[u] > mesh.triangle(t).v[v]) std::swap(u, v);
    return l[u] * glam[v] - l[v] * glam[u];
  }

  double whitney_curl(int k) const {
    int u = (k + 1) % 3, v = (k + 2) % 3;
    if (mesh.triangle(t).v[u] > mesh.triangle(t).v[v]) std::swap(u, v);
    return 2.0 * (glam[u].x() * glam[v].y() - glam[u].y() * glam[v].x());
  }
};

// Dense reference assembly of the main problem for order-1 spaces with a
// uniform source field, quadrature degree 10. Coefficients are spelled out
// by hand instead of going through CoefficientTable.
struct DenseMain {
  Eigen::MatrixXcd a;
  VectorXc b;
};

DenseMain dense_main_oracle(const ProblemSetup& s, const HCurlSpace& t2s,
                            const H1Space& p0s, const Eigen::Vector2d& h) {
  const Mesh2D& mesh = s.mesh;
  const double d_fe = s.profile.d_fe, d0 = s.profile.d0;
  const double rho = 1.0 / s.conductor.sigma;
  const double c_tt = 2.0 * rho / d_fe;           // bar(rho phi2'^2)
  const double c_cc = rho * d_fe / 5.0;           // bar(rho phi2^2)
  const double c_pp = s.conductor.mu * d_fe + s.air.mu * d0;
  const double c_t2 = s.conductor.mu * d_fe / 5.0; // bar(mu phi2^2)
  const double c_x = -std::sqrt(6.0) * d_fe * s.conductor.mu / 6.0;
  const Complex iw(0.0, 2.0 * M_PI * s.frequency);

  const Eigen::Index nt = t2s.dof_count(), np = p0s.dof_count();
  DenseMain out;
  out.a = Eigen::MatrixXcd::Zero(nt + np, nt + np);
  out.b = VectorXc::Zero(nt + np);

  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const TriBasis tb(mesh, t);
    int tdof[3], pdof[3];
    for (int k = 0; k < 3; ++k) {
      tdof[k] = t2s.edge_dofs({mesh.triangle_edges(t)[k]})[0];
      pdof[k] = p0s.cell_dofs(t)[k];
    }
    for (const TriQuadPoint& q : triangle_rule(10)) {
      const double l[3] = {q.l0, q.l1, q.l2};
      const double w = q.w * 2.0 * tb.area;
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          out.a(tdof[i], tdof[j]) +=
              w * ((c_tt + iw * c_t2) * tb.whitney(i, l).dot(tb.whitney(j, l)) +
                   c_cc * tb.whitney_curl(i) * tb.whitney_curl(j));
          out.a(tdof[i], nt + pdof[j]) +=
              w * iw * c_x * tb.whitney(i, l).dot(tb.glam[j]);
          out.a(nt + pdof[i], tdof[j]) +=
              w * iw * c_x * tb.glam[i].dot(tb.whitney(j, l));
          out.a(nt + pdof[i], nt + pdof[j]) +=
              w * iw * c_pp * tb.glam[i].dot(tb.glam[j]);
        }
        out.b[tdof[i]] -= w * iw * c_x * h.dot(tb.whitney(i, l));
        out.b[nt + pdof[i]] -= w * iw * c_pp * h.dot(tb.glam[i]);
      }
    }
  }
  return out;
}

void eliminate_dense(DenseMain& d, const std::vector<Eigen::Index>& fixed) {
  for (Eigen::Index k : fixed) {
    d.a.row(k).setZero();
    d.a.col(k).setZero();
    d.a(k, k) = 1.0;
    d.b[k] = 0.0;
  }
}

void compare_system(const SparseSystem& sys, const DenseMain& oracle) {
  const double scale =
      std::max(oracle.a.cwiseAbs().maxCoeff(), 1e-30);
  Eigen::MatrixXcd dense = Eigen::MatrixXcd(sys.a);
  REQUIRE(dense.rows() == oracle.a.rows());
  CHECK((dense - oracle.a).cwiseAbs().maxCoeff() <= 1e-12 * scale);
  const double bscale = std::max(oracle.b.cwiseAbs().maxCoeff(), 1e-30);
  CHECK((sys.b - oracle.b).cwiseAbs().maxCoeff() <= 1e-12 * bscale);
}

} // namespace

TEST_CASE("main system matches a dense hand-coefficient oracle") {
  // Variant 1: plain outer boundary. The whole rim pins T2 and one outer
  // DOF gauges Phi0, so the conductor-region entries are audited through
  // the interior edge and the free Phi0 DOFs.
  for (const BoundaryTag tag : {BoundaryTag::outer, BoundaryTag::symmetry}) {
    CAPTURE(static_cast<int>(tag));
    ProblemSetup s = bench_materials();
    s.mesh = two_tri_conductor(tag);
    s.nodal_order = 1;
    s.edge_order = 1;
    const Eigen::Vector2d h(0.8, -0.45);
    s.source = BiotSavartSource::uniform(h);

    const MsfemSystem sys = assemble_msfem(s);
    DenseMain oracle = dense_main_oracle(s, *sys.t2_space, *sys.phi0_space, h);
    eliminate_dense(oracle, sys.system.constrained);
    compare_system(sys.system, oracle);
  }
}

TEST_CASE("zero frequency keeps only the resistive terms") {
  ProblemSetup s = bench_materials();
  s.mesh = two_tri_conductor(BoundaryTag::outer);
  s.frequency = 0.0;
  s.nodal_order = 1;
  s.edge_order = 1;
  s.source = BiotSavartSource::uniform({1.0, 0.0});
  const MsfemSystem sys = assemble_msfem(s);

  const Eigen::Index nt = sys.t2_space->dof_count();
  std::vector<char> fixed(sys.system.a.rows(), 0);
  for (Eigen::Index d : sys.system.constrained) fixed[d] = 1;
  for (int k = 0; k < sys.system.a.outerSize(); ++k) {
    for (SparseMatrixXc::InnerIterator it(sys.system.a, k); it; ++it) {
      CHECK(it.value().imag() == 0.0);
      // no Phi0 coupling is left: off-gauge Phi0 rows are empty
      if (it.row() >= nt && !fixed[it.row()]) CHECK(it.value() == Complex(0.0));
    }
  }
  CHECK(sys.system.b.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zero excitation gives the zero solution") {
  ProblemSetup s = bench_materials();
  s.mesh = two_tri_conductor(BoundaryTag::symmetry);
  s.source = BiotSavartSource::uniform({0.0, 0.0});
  s.nodal_order = 1;
  s.edge_order = 1;
  const MsfemSolution sol = solve_msfem(s);
  CHECK(sol.t2.cwiseAbs().maxCoeff() == 0.0);
  CHECK(sol.phi0.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("uniform excitation on a symmetric patch is solved exactly") {
  // All-symmetry boundary emulates an infinite sheet: the discrete solution
  // is the uniform field t = -i w bar(mu phi0 phi2) H / (bar(rho phi2'^2)
  // + i w bar(mu phi2^2)) with Phi0 = 0, on every mesh.
  ProblemSetup s = bench_materials();
  s.mesh = uniform_refine(two_tri_conductor(BoundaryTag::symmetry));
  const Eigen::Vector2d h(1.0, 0.0);
  s.source = BiotSavartSource::uniform(h);

  const double d_fe = s.profile.d_fe;
  const double rho = 1.0 / s.conductor.sigma;
  const Complex iw(0.0, s.omega());
  const Complex t_exact = -iw * (-std::sqrt(6.0) * d_fe * s.conductor.mu / 6.0) /
                          (2.0 * rho / d_fe + iw * s.conductor.mu * d_fe / 5.0);

  const MsfemSolution sol = solve_msfem(s);
  CHECK(sol.phi0.cwiseAbs().maxCoeff() <= 1e-12 * std::abs(t_exact));
  for (int t : sol.t2_space->active_cells()) {
    const double l[3] = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    const Vector2c v = sol.t2_space->eval(sol.t2, t, l);
    CHECK(std::abs(v.x() - t_exact) <= 1e-12 * std::abs(t_exact));
    CHECK(std::abs(v.y()) <= 1e-12 * std::abs(t_exact));
  }
}

TEST_CASE("assembled matrices are complex symmetric to the last bit") {
  ProblemSetup s = bench_materials();
  s.mesh = Mesh2D::rectangle(
      1.0, 1.0, 4, 4,
      [](double x, double y) {
        return (std::abs(x - 0.5) < 0.3 && std::abs(y - 0.5) < 0.3)
                   ? RegionTag::conductor
                   : RegionTag::air;
      },
      {BoundaryTag::symmetry, BoundaryTag::symmetry, BoundaryTag::outer,
       BoundaryTag::outer});
  s.source = BiotSavartSource::uniform({1.0, 0.5});
  s.nodal_order = 2;
  s.edge_order = 2;

  const MsfemSystem sys = assemble_msfem(s);
  const SparseMatrixXc diff =
      SparseMatrixXc(sys.system.a - SparseMatrixXc(sys.system.a.transpose()));
  CHECK(diff.coeffs().abs().maxCoeff() == 0.0);

  const MsfemSolution sol = sys.split(solve_sparse(sys.system.a, sys.system.b));
  const EquilibrationSystem eq1 = assemble_equilibration_1(s, sol);
  const EquilibrationSystem eq2 = assemble_equilibration_2(s, sol);
  for (const EquilibrationSystem* eq : {&eq1, &eq2}) {
    const SparseMatrixXc d2 = SparseMatrixXc(
        eq->system.a - SparseMatrixXc(eq->system.a.transpose()));
    CHECK(d2.coeffs().abs().maxCoeff() == 0.0);
    CHECK(eq->system.real_valued);
    // multiplier-multiplier block is exactly zero
    const Eigen::Index n1 = eq->system.layout.sizes[0];
    for (int k = 0; k < eq->system.a.outerSize(); ++k)
      for (SparseMatrixXc::InnerIterator it(eq->system.a, k); it; ++it) {
        CHECK(it.value().imag() == 0.0);
        if (it.row() >= 2 * n1 && it.col() >= 2 * n1 && it.row() != it.col())
          CHECK(it.value() == Complex(0.0));
      }
  }
}

TEST_CASE("galerkin residual of the solved main system is tiny") {
  ProblemSetup s = bench_materials();
  s.mesh = Mesh2D::rectangle(
      1.0, 1.0, 4, 4, [](double, double) { return RegionTag::conductor; },
      {BoundaryTag::symmetry, BoundaryTag::symmetry, BoundaryTag::outer,
       BoundaryTag::outer});
  s.source = BiotSavartSource::uniform({1.0, 0.0});
  const MsfemSystem sys = assemble_msfem(s);
  const VectorXc x = solve_sparse(sys.system.a, sys.system.b);
  const double rel = (sys.system.a * x - sys.system.b).lpNorm<Eigen::Infinity>() /
                     sys.system.b.lpNorm<Eigen::Infinity>();
  CHECK(rel <= 1e-10);
}

namespace {

// Dense oracle of one equilibration saddle problem, order-1 space, fields
// evaluated through independent P1/Whitney code.
struct DenseSaddle {
  Eigen::MatrixXcd a;
  VectorXc b;
};

DenseSaddle dense_saddle_oracle(const ProblemSetup& s, const MsfemSolution& sol,
                                const H1Space& space, bool first,
                                const Eigen::Vector2d& h) {
  const Mesh2D& mesh = s.mesh;
  const double d_fe = s.profile.d_fe;
  const double sig = s.conductor.sigma;
  const double k_fac = 2.0 * std::sqrt(6.0) / (d_fe * d_fe);
  const double w_mass = first ? sig * d_fe : sig * d_fe / 5.0;
  const double w_stiff =
      first ? sig * d_fe * d_fe * d_fe / 12.0
            : 17.0 * sig * d_fe * d_fe * d_fe / 840.0;
  const Complex iwmu(0.0, 2.0 * M_PI * s.frequency * s.conductor.mu);

  const Eigen::Index n1 = space.dof_count();
  DenseSaddle out;
  out.a = Eigen::MatrixXcd::Zero(3 * n1, 3 * n1);
  out.b = VectorXc::Zero(3 * n1);

  for (int t : space.active_cells()) {
    const TriBasis tb(mesh, t);
    int tdof[3], pdof[3];
    for (int k = 0; k < 3; ++k) {
      tdof[k] = sol.t2_space->edge_dofs({mesh.triangle_edges(t)[k]})[0];
      pdof[k] = space.cell_dofs(t)[k];
    }
    for (const TriQuadPoint& q : triangle_rule(10)) {
      const double l[3] = {q.l0, q.l1, q.l2};
      const double w = q.w * 2.0 * tb.area;
      // independent reconstruction of the MSFEM fields at the point
      Vector2c t2 = Vector2c::Zero();
      Complex curl_t2 = 0.0;
      for (int k = 0; k < 3; ++k) {
        t2 += sol.t2[tdof[k]] * tb.whitney(k, l);
        curl_t2 += sol.t2[tdof[k]] * tb.whitney_curl(k);
      }
      Vector2c g0 = Vector2c::Zero();
      for (int k = 0; k < 3; ++k)
        g0 += sol.phi0[sol.phi0_space->cell_dofs(t)[k]] * tb.glam[k];

      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          const double sij = tb.glam[i].dot(tb.glam[j]);
          out.a(pdof[i], pdof[j]) += w * w_mass * l[i] * l[j];
          out.a(n1 + pdof[i], n1 + pdof[j]) += w * w_stiff * sij;
          out.a(pdof[i], 2 * n1 + pdof[j]) += w * sij;
          out.a(2 * n1 + pdof[i], pdof[j]) += w * sij;
          out.a(n1 + pdof[i], 2 * n1 + pdof[j]) -= w * sij;
          out.a(2 * n1 + pdof[i], n1 + pdof[j]) -= w * sij;
        }
        const Eigen::Vector2d rot(tb.glam[i].y(), -tb.glam[i].x());
        if (first) {
          const Vector2c r(-t2.y(), t2.x());
          out.b[n1 + pdof[i]] += w * k_fac * (d_fe * d_fe * d_fe / 12.0) *
                                 (r.x() * tb.glam[i].x() + r.y() * tb.glam[i].y());
          out.b[2 * n1 + pdof[i]] -=
              w * iwmu *
              ((g0.x() + h.x()) * rot.x() + (g0.y() + h.y()) * rot.y());
        } else {
          out.b[pdof[i]] += w * (d_fe / 5.0) * curl_t2 * l[i];
          out.b[2 * n1 + pdof[i]] -=
              w * iwmu * (t2.x() * rot.x() + t2.y() * rot.y());
        }
      }
    }
  }
  return out;
}

} // namespace

TEST_CASE("equilibration systems match a dense hand-coefficient oracle") {
  ProblemSetup s = bench_materials();
  s.mesh = two_tri_conductor(BoundaryTag::symmetry);
  s.nodal_order = 1;
  s.edge_order = 1;
  const Eigen::Vector2d h(0.7, -0.3);
  s.source = BiotSavartSource::uniform(h);

  // synthetic state: random complex coefficients on the real spaces
  const MsfemSystem main_sys = assemble_msfem(s);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  MsfemSolution sol;
  sol.t2_space = main_sys.t2_space;
  sol.phi0_space = main_sys.phi0_space;
  sol.t2 = VectorXc::Zero(main_sys.t2_space->dof_count());
  sol.phi0 = VectorXc::Zero(main_sys.phi0_space->dof_count());
  for (Eigen::Index i = 0; i < sol.t2.size(); ++i)
    sol.t2[i] = Complex(uni(rng), uni(rng));
  for (Eigen::Index i = 0; i < sol.phi0.size(); ++i)
    sol.phi0[i] = Complex(uni(rng), uni(rng));

  for (const bool first : {true, false}) {
    CAPTURE(first);
    const EquilibrationSystem eq =
        first ? assemble_equilibration_1(s, sol) : assemble_equilibration_2(s, sol);
    DenseSaddle oracle = dense_saddle_oracle(s, sol, *eq.space, first, h);
    DenseMain as_main{std::move(oracle.a), std::move(oracle.b)};
    eliminate_dense(as_main, eq.system.constrained);
    compare_system(eq.system, as_main);
  }
}

TEST_CASE("equilibration with a zero state has a zero response") {
  ProblemSetup s = bench_materials();
  s.mesh = two_tri_conductor(BoundaryTag::symmetry);
  s.source = BiotSavartSource::uniform({0.0, 0.0});
  const MsfemSolution sol = solve_msfem(s);
  const EquilibrationSystem eq1 = assemble_equilibration_1(s, sol);
  CHECK(eq1.system.b.cwiseAbs().maxCoeff() == 0.0);
  const EquilibrationSystem eq2 = assemble_equilibration_2(s, sol);
  CHECK(eq2.system.b.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("equilibration rejects a solution from another mesh") {
  ProblemSetup s = bench_materials();
  s.mesh = two_tri_conductor(BoundaryTag::symmetry);
  s.source = BiotSavartSource::uniform({1.0, 0.0});
  const MsfemSolution sol = solve_msfem(s);
  ProblemSetup refined = s;
  refined.mesh = uniform_refine(s.mesh);
  CHECK_THROWS_AS(assemble_equilibration_1(refined, sol), std::invalid_argument);
  CHECK_THROWS_AS(assemble_equilibration_2(refined, sol), std::invalid_argument);
}

TEST_CASE("setup validation rejects broken configurations") {
  ProblemSetup s = bench_materials();
  CHECK_THROWS_AS(s.validate(), ParseError); // no mesh yet
  s.mesh = Mesh2D::rectangle(1, 1, 1, 1,
                             [](double, double) { return RegionTag::air; });
  CHECK_THROWS_AS(s.validate(), ParseError); // no conductor
  s.mesh = two_tri_conductor(BoundaryTag::outer);
  s.validate();
  ProblemSetup bad = s;
  bad.conductor.sigma = 0.0;
  CHECK_THROWS_AS(bad.validate(), ParseError);
  bad = s;
  bad.air.sigma = 1.0;
  CHECK_THROWS_AS(bad.validate(), ParseError);
  bad = s;
  bad.frequency = -1.0;
  CHECK_THROWS_AS(bad.validate(), ParseError);
  bad = s;
  bad.nodal_order = 4;
  CHECK_THROWS_AS(bad.validate(), ParseError);
}

TEST_CASE("vertex renumbering leaves the physical fields unchanged") {
  // Same geometry, vertices stored in reverse order: edge orientations flip
  // wherever the id order flips, and the recovered fields must not move.
  auto region = [](double x, double y) {
    return (x > 0.249 && x < 0.751 && y > 0.249 && y < 0.751)
               ? RegionTag::conductor
               : RegionTag::air;
  };
  ProblemSetup sa = bench_materials();
  sa.mesh = Mesh2D::rectangle(1.0, 1.0, 4, 4, region,
                              {BoundaryTag::symmetry, BoundaryTag::symmetry,
                               BoundaryTag::outer, BoundaryTag::outer});
  sa.source = BiotSavartSource::uniform({1.0, 0.0});

  // rebuild the same mesh with permuted vertex ids
  const int nv = sa.mesh.vertex_count();
  auto perm = [nv](int v) { return nv - 1 - v; };
  std::vector<Point2> verts(nv);
  for (int v = 0; v < nv; ++v) verts[perm(v)] = sa.mesh.vertex(v);
  std::vector<Triangle> tris = sa.mesh.triangles();
  for (Triangle& t : tris) {
    for (int& v : t.v) v = perm(v);
    t.parent = -1;
  }
  std::map<EdgeKey, BoundaryTag> tags;
  for (int e = 0; e < sa.mesh.edge_count(); ++e)
    if (auto tag = sa.mesh.boundary_tag(e))
      tags.emplace(EdgeKey(perm(sa.mesh.edges()[e].a), perm(sa.mesh.edges()[e].b)),
                   *tag);
  ProblemSetup sb = sa;
  sb.mesh = Mesh2D::from_arrays(std::move(verts), std::move(tris), std::move(tags));

  const MsfemSolution a = solve_msfem(sa);
  const MsfemSolution b = solve_msfem(sb);

  const EquilibrationSystem eq2a = assemble_equilibration_2(sa, a);
  const EquilibrationSystem eq2b = assemble_equilibration_2(sb, b);
  const VectorXc xa = solve_sparse(msfem::test::to_real(eq2a.system.a), eq2a.system.b);
  const VectorXc xb = solve_sparse(msfem::test::to_real(eq2b.system.a), eq2b.system.b);
  const Eigen::Index n1a = eq2a.system.layout.sizes[0];
  const Eigen::Index n1b = eq2b.system.layout.sizes[0];

  double t2_scale = a.t2.cwiseAbs().maxCoeff();
  for (int t : a.t2_space->active_cells()) {
    const Point2 p = sa.mesh.centroid(t);
    const double la[3] = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    const int tb = locate(sb.mesh, p);
    const auto lb = barycentric(sb.mesh, tb, p);

    const Vector2c va = a.t2_space->eval(a.t2, t, la);
    const Vector2c vb = b.t2_space->eval(b.t2, tb, lb.data());
    CHECK((va - vb).norm() <= 1e-8 * t2_scale);

    // gamma2 and grad Phi3 are gauge-free physical fields
    const Complex ga = eq2a.space->eval(xa.segment(0, n1a), t, la);
    const Complex gb = eq2b.space->eval(xb.segment(0, n1b), tb, lb.data());
    CHECK(std::abs(ga - gb) <= 1e-8 * (std::abs(ga) + 1e-30));
    const Vector2c pa = eq2a.space->eval_grad(xa.segment(n1a, n1a), t, la);
    const Vector2c pb = eq2b.space->eval_grad(xb.segment(n1b, n1b), tb, lb.data());
    CHECK((pa - pb).norm() <= 1e-8 * (pa.norm() + 1e-30));
  }
}

TEST_CASE("nested refinement preserves the energy of a transferred solution") {
  auto region = [](double x, double y) {
    return (x > 1.0 / 3 - 1e-9 && x < 2.0 / 3 + 1e-9 && y > 1.0 / 3 - 1e-9 &&
            y < 2.0 / 3 + 1e-9)
               ? RegionTag::conductor
               : RegionTag::air;
  };
  ProblemSetup coarse = bench_materials();
  coarse.mesh = Mesh2D::rectangle(1.0, 1.0, 6, 6, region);
  coarse.source = BiotSavartSource::uniform({1.0, 0.25});
  coarse.edge_order = 1; // order-2 edge functions are not nested
  coarse.nodal_order = 2;

  const MsfemSystem csys = assemble_msfem(coarse);
  const VectorXc xc = solve_sparse(csys.system.a, csys.system.b);
  const MsfemSolution csol = csys.split(xc);

  ProblemSetup fine = coarse;
  fine.mesh = uniform_refine(coarse.mesh);
  const MsfemSystem fsys = assemble_msfem(fine);

  VectorXc xf(fsys.system.layout.total());
  xf << msfem::test::prolong_hcurl1(*csys.t2_space, *fsys.t2_space, csol.t2),
      msfem::test::prolong_h1(*csys.phi0_space, *fsys.phi0_space, csol.phi0);

  const Complex ec = xc.cwiseProduct(csys.system.a * xc).sum();
  const Complex ef = xf.cwiseProduct(fsys.system.a * xf).sum();
  CHECK(std::abs(ef - ec) <= 1e-10 * std::abs(ec));

  // the source functional transfers identically as well
  const Complex lc = xc.cwiseProduct(csys.system.b).sum();
  const Complex lf = xf.cwiseProduct(fsys.system.b).sum();
  CHECK(std::abs(lf - lc) <= 1e-10 * std::abs(lc));
}
