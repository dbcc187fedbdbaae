// Copyright (c) the msfem2d1d authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "msfem/mesh.hpp"

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace msfem {

using Complex = std::complex<double>;
using VectorXc = Eigen::VectorXcd;
using Vector2c = Eigen::Vector2cd;

// A space either covers the whole mesh or only conductor triangles.
enum class Support { full_mesh, conductor };

// Per-triangle affine geometry: barycentric gradients and area.
struct CellGeometry {
  std::array<Eigen::Vector2d, 3> grad_lambda;
  double area = 0.0;
};
CellGeometry cell_geometry(const Mesh2D& mesh, int t);

// In-plane rotation used by the stream-function constraint:
// rot psi = (d_y psi, -d_x psi).
inline Vector2c rot_from_grad(const Vector2c& grad) { return Vector2c(grad.y(), -grad.x()); }
inline Eigen::Vector2d rot_from_grad(const Eigen::Vector2d& grad) {
  return Eigen::Vector2d(grad.y(), -grad.x());
}

// Scalar Lagrange space of order 1, 2 or 3. Dof order: vertex dofs, then edge
// dofs (order >= 2; two per edge for order 3, sorted along the global edge
// direction), then cell dofs (order 3). Only entities touching active cells
// carry dofs.
class H1Space {
 public:
  H1Space() = default;
  H1Space(Mesh2D mesh, int order, Support support = Support::full_mesh);

  const Mesh2D& mesh() const;
  int order() const;
  Support support() const;
  int dof_count() const;
  int local_size() const { return (order_ + 1) * (order_ + 2) / 2; }

  bool cell_active(int t) const;
  const std::vector<int>& active_cells() const;
  std::span<const int> cell_dofs(int t) const;

  // All local basis values at a barycentric point (size local_size()).
  void basis_values(int t, const double lambda[3], double* out) const;
  // Physical-space gradients of the local basis on cell t.
  void basis_gradients(int t, const double lambda[3], Eigen::Vector2d* out) const;

  // Location of the Lagrange node of a dof.
  Point2 dof_point(int dof) const;

  // Dofs whose nodes lie on boundary edges carrying the given tag.
  std::vector<int> boundary_dofs(BoundaryTag tag) const;
  // One dof per connected component of the support, lowest vertex dof each.
  // Used to pin fields that are only determined up to a constant.
  std::vector<int> gauge_dofs() const;

  Complex eval(const VectorXc& u, int t, const double lambda[3]) const;
  Vector2c eval_grad(const VectorXc& u, int t, const double lambda[3]) const;

  // Lagrange interpolation: evaluate f at every dof node.
  VectorXc interpolate(const std::function<Complex(const Point2&)>& f) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> p_;
  int order_ = 0;
};

// H(curl)-conforming edge space, order 1 or 2.
//
// Order 1 has one dof per edge: the Whitney function
//   W_ab = lambda_a grad(lambda_b) - lambda_b grad(lambda_a)
// for the globally sorted edge (a < b), so neighbouring triangles agree on
// the sign without per-cell flips.
//
// Order 2 adds grad(lambda_a lambda_b) per edge and the two interior bubbles
// lambda_1 lambda_2 grad(lambda_0) and lambda_2 lambda_0 grad(lambda_1),
// whose tangential trace vanishes on every edge. The local space contains
// all linear vector fields; curls span the full linear space.
class HCurlSpace {
 public:
  HCurlSpace() = default;
  HCurlSpace(Mesh2D mesh, int order, Support support = Support::conductor);

  const Mesh2D& mesh() const;
  int order() const;
  Support support() const;
  int dof_count() const;
  int local_size() const { return order_ == 1 ? 3 : 8; }

  bool cell_active(int t) const;
  const std::vector<int>& active_cells() const;
  std::span<const int> cell_dofs(int t) const;

  void basis_values(int t, const double lambda[3], Eigen::Vector2d* out) const;
  // Scalar 2D curls (d_x u_y - d_y u_x) of the local basis.
  void basis_curls(int t, const double lambda[3], double* out) const;

  // Edge-attached dofs of the given mesh edges (the interior bubbles have no
  // tangential trace and are never constrained).
  std::vector<int> edge_dofs(const std::vector<int>& edges) const;

  Vector2c eval(const VectorXc& u, int t, const double lambda[3]) const;
  Complex eval_curl(const VectorXc& u, int t, const double lambda[3]) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> p_;
  int order_ = 0;
};

} // namespace msfem
