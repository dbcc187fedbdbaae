// Copyright (c) the msfem2d1d authors
// SPDX-License-Identifier: Apache-2.0
#include "msfem/fespace.hpp"

#include <algorithm>
#include <stdexcept>

namespace msfem {

CellGeometry cell_geometry(const Mesh2D& mesh, int t) {
  const auto& tri = mesh.triangle(t);
  CellGeometry g;
  g.area = mesh.area(t);
  for (int i = 0; i < 3; ++i) {
    Point2 d = mesh.vertex(tri.v[(i + 2) % 3]) - mesh.vertex(tri.v[(i + 1) % 3]);
    g.grad_lambda[i] = Eigen::Vector2d(-d.y(), d.x()) / (2.0 * g.area);
  }
  return g;
}

namespace {

bool tri_active(const Mesh2D& mesh, int t, Support support) {
  return support == Support::full_mesh || mesh.triangle(t).region == RegionTag::conductor;
}

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

} // namespace

// ---------------------------------------------------------------------------
// H1Space

struct H1Space::Impl {
  Mesh2D mesh;
  int order = 1;
  Support support = Support::full_mesh;

  std::vector<char> active_flag;   // per triangle
  std::vector<int> active;         // active triangle ids
  std::vector<int> cell_pos;       // triangle -> index into active, -1
  std::vector<int> vertex_dof;     // -1 when the vertex carries no dof
  std::vector<int> edge_dof0;      // first dof of an edge (-1 when absent)
  std::vector<int> cell_dof;       // order 3 bubble dof (-1 when absent)
  int ndof = 0;
  int local = 0;
  std::vector<int> dofs_flat;      // active-cell-major cell dofs
  // Local vertex indices (u, v) of each cell edge, sorted by global vertex id.
  std::vector<std::array<std::array<int, 2>, 3>> edge_lv;
  std::vector<Point2> dof_points;
  std::vector<CellGeometry> geom;  // per triangle
};

H1Space::H1Space(Mesh2D mesh, int order, Support support) : order_(order) {
  if (order < 1 || order > 3) throw std::invalid_argument("H1Space: order must be 1, 2 or 3");
  auto p = std::make_shared<Impl>();
  p->mesh = mesh;
  p->order = order;
  p->support = support;
  p->local = local_size();

  const int nt = mesh.triangle_count();
  p->active_flag.assign(nt, 0);
  p->cell_pos.assign(nt, -1);
  for (int t = 0; t < nt; ++t) {
    if (!tri_active(mesh, t, support)) continue;
    p->active_flag[t] = 1;
    p->cell_pos[t] = static_cast<int>(p->active.size());
    p->active.push_back(t);
  }

  p->vertex_dof.assign(mesh.vertex_count(), -1);
  p->edge_dof0.assign(mesh.edge_count(), -1);
  p->cell_dof.assign(nt, -1);

  int next = 0;
  for (int t : p->active)
    for (int v : mesh.triangle(t).v)
      if (p->vertex_dof[v] < 0) p->vertex_dof[v] = 0; // mark
  for (int v = 0; v < mesh.vertex_count(); ++v)
    if (p->vertex_dof[v] == 0) {
      p->vertex_dof[v] = next++;
      p->dof_points.push_back(mesh.vertex(v));
    }
  if (order >= 2) {
    int per_edge = order - 1;
    for (int t : p->active)
      for (int e : mesh.triangle_edges(t))
        if (p->edge_dof0[e] < 0) {
          p->edge_dof0[e] = next;
          next += per_edge;
          auto key = mesh.edges()[e];
          Point2 a = mesh.vertex(key.a), b = mesh.vertex(key.b);
          if (order == 2) {
            p->dof_points.push_back(0.5 * (a + b));
          } else {
            p->dof_points.push_back(a + (b - a) / 3.0);
            p->dof_points.push_back(a + 2.0 * (b - a) / 3.0);
          }
        }
  }
  if (order == 3) {
    for (int t : p->active) {
      p->cell_dof[t] = next++;
      p->dof_points.push_back(mesh.centroid(t));
    }
  }
  p->ndof = next;

  p->geom.resize(nt);
  for (int t = 0; t < nt; ++t) p->geom[t] = cell_geometry(mesh, t);

  p->dofs_flat.resize(p->active.size() * p->local);
  p->edge_lv.resize(p->active.size());
  for (size_t a = 0; a < p->active.size(); ++a) {
    int t = p->active[a];
    const auto& tri = mesh.triangle(t);
    int* dofs = p->dofs_flat.data() + a * p->local;
    for (int i = 0; i < 3; ++i) dofs[i] = p->vertex_dof[tri.v[i]];
    auto edges = mesh.triangle_edges(t);
    for (int k = 0; k < 3; ++k) {
      int u = (k + 1) % 3, v = (k + 2) % 3;
      if (tri.v[u] > tri.v[v]) std::swap(u, v);
      p->edge_lv[a][k] = {u, v};
      if (order == 2) dofs[3 + k] = p->edge_dof0[edges[k]];
      if (order == 3) {
        dofs[3 + 2 * k] = p->edge_dof0[edges[k]];
        dofs[3 + 2 * k + 1] = p->edge_dof0[edges[k]] + 1;
      }
    }
    if (order == 3) dofs[9] = p->cell_dof[t];
  }

  p_ = std::move(p);
}

const Mesh2D& H1Space::mesh() const { return p_->mesh; }
int H1Space::order() const { return order_; }
Support H1Space::support() const { return p_->support; }
int H1Space::dof_count() const { return p_->ndof; }
bool H1Space::cell_active(int t) const { return p_->active_flag[t] != 0; }
const std::vector<int>& H1Space::active_cells() const { return p_->active; }

std::span<const int> H1Space::cell_dofs(int t) const {
  int a = p_->cell_pos[t];
  if (a < 0) throw std::invalid_argument("H1Space::cell_dofs: inactive cell");
  return {p_->dofs_flat.data() + static_cast<size_t>(a) * p_->local,
          static_cast<size_t>(p_->local)};
}

void H1Space::basis_values(int t, const double lambda[3], double* out) const {
  const double l0 = lambda[0], l1 = lambda[1], l2 = lambda[2];
  switch (order_) {
    case 1:
      out[0] = l0;
      out[1] = l1;
      out[2] = l2;
      return;
    case 2: {
      out[0] = l0 * (2 * l0 - 1);
      out[1] = l1 * (2 * l1 - 1);
      out[2] = l2 * (2 * l2 - 1);
      const double l[3] = {l0, l1, l2};
      for (int k = 0; k < 3; ++k) out[3 + k] = 4 * l[(k + 1) % 3] * l[(k + 2) % 3];
      return;
    }
    default: {
      const double l[3] = {l0, l1, l2};
      for (int i = 0; i < 3; ++i) out[i] = 0.5 * l[i] * (3 * l[i] - 1) * (3 * l[i] - 2);
      int a = p_->cell_pos[t];
      if (a < 0) throw std::invalid_argument("H1Space::basis_values: inactive cell");
      for (int k = 0; k < 3; ++k) {
        auto [u, v] = p_->edge_lv[a][k];
        out[3 + 2 * k] = 4.5 * l[u] * l[v] * (3 * l[u] - 1);
        out[3 + 2 * k + 1] = 4.5 * l[u] * l[v] * (3 * l[v] - 1);
      }
      out[9] = 27 * l0 * l1 * l2;
      return;
    }
  }
}

void H1Space::basis_gradients(int t, const double lambda[3], Eigen::Vector2d* out) const {
  const auto& g = p_->geom[t].grad_lambda;
  const double l[3] = {lambda[0], lambda[1], lambda[2]};
  switch (order_) {
    case 1:
      for (int i = 0; i < 3; ++i) out[i] = g[i];
      return;
    case 2:
      for (int i = 0; i < 3; ++i) out[i] = (4 * l[i] - 1) * g[i];
      for (int k = 0; k < 3; ++k) {
        int u = (k + 1) % 3, v = (k + 2) % 3;
        out[3 + k] = 4 * (l[v] * g[u] + l[u] * g[v]);
      }
      return;
    default: {
      for (int i = 0; i < 3; ++i)
        out[i] = 0.5 * (27 * l[i] * l[i] - 18 * l[i] + 2) * g[i];
      int a = p_->cell_pos[t];
      if (a < 0) throw std::invalid_argument("H1Space::basis_gradients: inactive cell");
      for (int k = 0; k < 3; ++k) {
        auto [u, v] = p_->edge_lv[a][k];
        out[3 + 2 * k] = 4.5 * (l[v] * (6 * l[u] - 1) * g[u] + l[u] * (3 * l[u] - 1) * g[v]);
        out[3 + 2 * k + 1] = 4.5 * (l[v] * (3 * l[v] - 1) * g[u] + l[u] * (6 * l[v] - 1) * g[v]);
      }
      out[9] = 27 * (l[1] * l[2] * g[0] + l[0] * l[2] * g[1] + l[0] * l[1] * g[2]);
      return;
    }
  }
}

Point2 H1Space::dof_point(int dof) const { return p_->dof_points.at(dof); }

std::vector<int> H1Space::boundary_dofs(BoundaryTag tag) const {
  std::vector<int> dofs;
  const auto& mesh = p_->mesh;
  for (int e = 0; e < mesh.edge_count(); ++e) {
    if (mesh.boundary_tag(e) != tag) continue;
    auto key = mesh.edges()[e];
    if (p_->vertex_dof[key.a] >= 0) dofs.push_back(p_->vertex_dof[key.a]);
    if (p_->vertex_dof[key.b] >= 0) dofs.push_back(p_->vertex_dof[key.b]);
    if (p_->edge_dof0.size() && p_->edge_dof0[e] >= 0)
      for (int k = 0; k < order_ - 1; ++k) dofs.push_back(p_->edge_dof0[e] + k);
  }
  std::sort(dofs.begin(), dofs.end());
  dofs.erase(std::unique(dofs.begin(), dofs.end()), dofs.end());
  return dofs;
}

std::vector<int> H1Space::gauge_dofs() const {
  if (p_->ndof == 0) return {};
  if (p_->support == Support::full_mesh) return {0};
  std::vector<int> comp;
  int ncomp = p_->mesh.conductor_components(comp);
  std::vector<int> best(ncomp, p_->ndof);
  for (int t : p_->active) {
    int c = comp[t];
    for (int v : p_->mesh.triangle(t).v) best[c] = std::min(best[c], p_->vertex_dof[v]);
  }
  std::sort(best.begin(), best.end());
  return best;
}

Complex H1Space::eval(const VectorXc& u, int t, const double lambda[3]) const {
  double vals[10];
  basis_values(t, lambda, vals);
  auto dofs = cell_dofs(t);
  Complex s = 0;
  for (int i = 0; i < p_->local; ++i) s += u[dofs[i]] * vals[i];
  return s;
}

Vector2c H1Space::eval_grad(const VectorXc& u, int t, const double lambda[3]) const {
  Eigen::Vector2d grads[10];
  basis_gradients(t, lambda, grads);
  auto dofs = cell_dofs(t);
  Vector2c s = Vector2c::Zero();
  for (int i = 0; i < p_->local; ++i) s += u[dofs[i]] * grads[i];
  return s;
}

VectorXc H1Space::interpolate(const std::function<Complex(const Point2&)>& f) const {
  VectorXc u(p_->ndof);
  for (int i = 0; i < p_->ndof; ++i) u[i] = f(p_->dof_points[i]);
  return u;
}

// ---------------------------------------------------------------------------
// HCurlSpace

struct HCurlSpace::Impl {
  Mesh2D mesh;
  int order = 1;
  Support support = Support::conductor;

  std::vector<char> active_flag;
  std::vector<int> active;
  std::vector<int> cell_pos;
  std::vector<int> edge_dof0; // -1 when the edge carries no dofs
  std::vector<int> cell_dof0; // order 2 bubbles
  int ndof = 0;
  int local = 0;
  std::vector<int> dofs_flat;
  std::vector<std::array<std::array<int, 2>, 3>> edge_lv;
  std::vector<CellGeometry> geom;
};

HCurlSpace::HCurlSpace(Mesh2D mesh, int order, Support support) : order_(order) {
  if (order < 1 || order > 2) throw std::invalid_argument("HCurlSpace: order must be 1 or 2");
  auto p = std::make_shared<Impl>();
  p->mesh = mesh;
  p->order = order;
  p->support = support;
  p->local = local_size();

  const int nt = mesh.triangle_count();
  p->active_flag.assign(nt, 0);
  p->cell_pos.assign(nt, -1);
  for (int t = 0; t < nt; ++t) {
    if (!tri_active(mesh, t, support)) continue;
    p->active_flag[t] = 1;
    p->cell_pos[t] = static_cast<int>(p->active.size());
    p->active.push_back(t);
  }

  p->edge_dof0.assign(mesh.edge_count(), -1);
  p->cell_dof0.assign(nt, -1);
  int next = 0;
  const int per_edge = order; // Whitney plus, for order 2, the edge gradient
  for (int t : p->active)
    for (int e : mesh.triangle_edges(t))
      if (p->edge_dof0[e] < 0) {
        p->edge_dof0[e] = next;
        next += per_edge;
      }
  if (order == 2)
    for (int t : p->active) {
      p->cell_dof0[t] = next;
      next += 2;
    }
  p->ndof = next;

  p->geom.resize(nt);
  for (int t = 0; t < nt; ++t) p->geom[t] = cell_geometry(mesh, t);

  p->dofs_flat.resize(p->active.size() * p->local);
  p->edge_lv.resize(p->active.size());
  for (size_t a = 0; a < p->active.size(); ++a) {
    int t = p->active[a];
    const auto& tri = mesh.triangle(t);
    int* dofs = p->dofs_flat.data() + a * p->local;
    auto edges = mesh.triangle_edges(t);
    for (int k = 0; k < 3; ++k) {
      int u = (k + 1) % 3, v = (k + 2) % 3;
      if (tri.v[u] > tri.v[v]) std::swap(u, v);
      p->edge_lv[a][k] = {u, v};
      dofs[k] = p->edge_dof0[edges[k]];
      if (order == 2) dofs[3 + k] = p->edge_dof0[edges[k]] + 1;
    }
    if (order == 2) {
      dofs[6] = p->cell_dof0[t];
      dofs[7] = p->cell_dof0[t] + 1;
    }
  }

  p_ = std::move(p);
}

const Mesh2D& HCurlSpace::mesh() const { return p_->mesh; }
int HCurlSpace::order() const { return order_; }
Support HCurlSpace::support() const { return p_->support; }
int HCurlSpace::dof_count() const { return p_->ndof; }
bool HCurlSpace::cell_active(int t) const { return p_->active_flag[t] != 0; }
const std::vector<int>& HCurlSpace::active_cells() const { return p_->active; }

std::span<const int> HCurlSpace::cell_dofs(int t) const {
  int a = p_->cell_pos[t];
  if (a < 0) throw std::invalid_argument("HCurlSpace::cell_dofs: inactive cell");
  return {p_->dofs_flat.data() + static_cast<size_t>(a) * p_->local,
          static_cast<size_t>(p_->local)};
}

void HCurlSpace::basis_values(int t, const double lambda[3], Eigen::Vector2d* out) const {
  int a = p_->cell_pos[t];
  if (a < 0) throw std::invalid_argument("HCurlSpace::basis_values: inactive cell");
  const auto& g = p_->geom[t].grad_lambda;
  const double l[3] = {lambda[0], lambda[1], lambda[2]};
  for (int k = 0; k < 3; ++k) {
    auto [u, v] = p_->edge_lv[a][k];
    out[k] = l[u] * g[v] - l[v] * g[u];
    if (order_ == 2) out[3 + k] = l[v] * g[u] + l[u] * g[v];
  }
  if (order_ == 2) {
    out[6] = l[1] * l[2] * g[0];
    out[7] = l[2] * l[0] * g[1];
  }
}

void HCurlSpace::basis_curls(int t, const double lambda[3], double* out) const {
  int a = p_->cell_pos[t];
  if (a < 0) throw std::invalid_argument("HCurlSpace::basis_curls: inactive cell");
  const auto& g = p_->geom[t].grad_lambda;
  const double l[3] = {lambda[0], lambda[1], lambda[2]};
  for (int k = 0; k < 3; ++k) {
    auto [u, v] = p_->edge_lv[a][k];
    out[k] = 2.0 * cross2(g[u], g[v]);
    if (order_ == 2) out[3 + k] = 0.0;
  }
  if (order_ == 2) {
    out[6] = cross2(l[2] * g[1] + l[1] * g[2], g[0]);
    out[7] = cross2(l[0] * g[2] + l[2] * g[0], g[1]);
  }
}

std::vector<int> HCurlSpace::edge_dofs(const std::vector<int>& edges) const {
  std::vector<int> dofs;
  for (int e : edges) {
    int d0 = p_->edge_dof0.at(e);
    if (d0 < 0) continue;
    dofs.push_back(d0);
    if (order_ == 2) dofs.push_back(d0 + 1);
  }
  std::sort(dofs.begin(), dofs.end());
  dofs.erase(std::unique(dofs.begin(), dofs.end()), dofs.end());
  return dofs;
}

Vector2c HCurlSpace::eval(const VectorXc& u, int t, const double lambda[3]) const {
  Eigen::Vector2d vals[8];
  basis_values(t, lambda, vals);
  auto dofs = cell_dofs(t);
  Vector2c s = Vector2c::Zero();
  for (int i = 0; i < p_->local; ++i) s += u[dofs[i]] * vals[i];
  return s;
}

Complex HCurlSpace::eval_curl(const VectorXc& u, int t, const double lambda[3]) const {
  double vals[8];
  basis_curls(t, lambda, vals);
  auto dofs = cell_dofs(t);
  Complex s = 0;
  for (int i = 0; i < p_->local; ++i) s += u[dofs[i]] * vals[i];
  return s;
}

} // namespace msfem
