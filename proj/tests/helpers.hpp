// Copyright (c) the msfem2d1d authors
// SPDX-License-Identifier: Apache-2.0
//
// Shared helpers for the test binaries: barycentric lookups and nested
// coarse-to-fine solution transfer, implemented independently of the library
// assembly path.
#pragma once

#include "msfem/fespace.hpp"
#include "msfem/linsolve.hpp"
#include "msfem/quadrature.hpp"

#include <array>
#include <stdexcept>

namespace msfem::test {

inline std::array<double, 3> barycentric(const Mesh2D& mesh, int t,
                                         const Point2& p) {
  const Triangle& tri = mesh.triangle(t);
  const Point2& a = mesh.vertex(tri.v[0]);
  const Point2& b = mesh.vertex(tri.v[1]);
  const Point2& c = mesh.vertex(tri.v[2]);
  Eigen::Matrix2d m;
  m.col(0) = b - a;
  m.col(1) = c - a;
  const Eigen::Vector2d x = m.inverse() * (p - a);
  return {1.0 - x[0] - x[1], x[0], x[1]};
}

// Triangle of `mesh` containing p (brute force; tests only).
inline int locate(const Mesh2D& mesh, const Point2& p, double tol = 1e-12) {
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto l = barycentric(mesh, t, p);
    if (l[0] >= -tol && l[1] >= -tol && l[2] >= -tol) return t;
  }
  throw std::runtime_error("locate: point outside mesh");
}

// Lagrange transfer onto a refinement: every fine DOF point lies inside an
// ancestor cell where the coarse function is a polynomial.
inline VectorXc prolong_h1(const H1Space& coarse, const H1Space& fine,
                           const VectorXc& u) {
  VectorXc out = VectorXc::Zero(fine.dof_count());
  for (int tf : fine.active_cells()) {
    const int tc = fine.mesh().ancestor_triangle(coarse.mesh(), tf);
    for (int dof : fine.cell_dofs(tf)) {
      const auto l = barycentric(coarse.mesh(), tc, fine.dof_point(dof));
      out[dof] = coarse.eval(u, tc, l.data());
    }
  }
  return out;
}

// Whitney transfer: fine edge circulations of the coarse field, two-point
// Gauss along each edge (exact, the coarse field is linear on the segment).
inline VectorXc prolong_hcurl1(const HCurlSpace& coarse, const HCurlSpace& fine,
                               const VectorXc& u) {
  if (coarse.order() != 1 || fine.order() != 1)
    throw std::invalid_argument("prolong_hcurl1: order-1 spaces only");
  const Mesh2D& fm = fine.mesh();
  VectorXc out = VectorXc::Zero(fine.dof_count());
  const GaussRule g2 = gauss_legendre(2);
  for (int e = 0; e < fm.edge_count(); ++e) {
    const std::vector<int> dofs = fine.edge_dofs({e});
    if (dofs.empty()) continue;
    const auto [t0, t1] = fm.edge_triangles(e);
    const int tf = fine.cell_active(t0) ? t0 : t1;
    const int tc = fm.ancestor_triangle(coarse.mesh(), tf);
    const Point2& pa = fm.vertex(fm.edges()[e].a);
    const Point2& pb = fm.vertex(fm.edges()[e].b);
    Complex circ = 0.0;
    for (int q = 0; q < 2; ++q) {
      const double s = 0.5 * (1.0 + g2.points[q]);
      const auto l = barycentric(coarse.mesh(), tc, pa + s * (pb - pa));
      const Vector2c v = coarse.eval(u, tc, l.data());
      circ += 0.5 * g2.weights[q] * (v.x() * (pb - pa).x() + v.y() * (pb - pa).y());
    }
    out[dofs[0]] = circ;
  }
  return out;
}

// Real part of a sparse complex matrix as a real sparse matrix.
inline SparseMatrixXd to_real(const SparseMatrixXc& a) {
  std::vector<Eigen::Triplet<double>> trips;
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrixXc::InnerIterator it(a, k); it; ++it)
      trips.emplace_back(it.row(), it.col(), it.value().real());
  SparseMatrixXd out(a.rows(), a.cols());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

} // namespace msfem::test
