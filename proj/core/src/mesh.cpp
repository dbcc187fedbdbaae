// Copyright (c) the msfem2d1d authors
// SPDX-License-Identifier: Apache-2.0
#include "msfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace msfem {

struct Mesh2D::Data {
  std::vector<Point2> vertices;
  std::vector<Triangle> triangles;
  std::map<EdgeKey, BoundaryTag> boundary_tags;

  // Derived connectivity.
  std::vector<EdgeKey> edges;
  std::map<EdgeKey, int> edge_index;
  std::vector<std::array<int, 2>> edge_tris;
  std::vector<std::array<int, 3>> tri_edges;
  std::vector<double> areas;
  double total_area = 0.0;

  std::shared_ptr<const Mesh2D> parent;
};

namespace {

double signed_area(const Point2& a, const Point2& b, const Point2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

} // namespace

Mesh2D Mesh2D::finalize(std::vector<Point2> vertices, std::vector<Triangle> triangles,
                        std::map<EdgeKey, BoundaryTag> boundary_tags,
                        std::shared_ptr<const Mesh2D> parent) {
  auto d = std::make_shared<Data>();
  d->vertices = std::move(vertices);
  d->triangles = std::move(triangles);
  d->boundary_tags = std::move(boundary_tags);
  d->parent = std::move(parent);

  const int nv = static_cast<int>(d->vertices.size());
  const int nt = static_cast<int>(d->triangles.size());
  if (nt == 0) throw std::invalid_argument("Mesh2D: empty triangle list");

  d->areas.resize(nt);
  for (int t = 0; t < nt; ++t) {
    const auto& tri = d->triangles[t];
    for (int k = 0; k < 3; ++k)
      if (tri.v[k] < 0 || tri.v[k] >= nv)
        throw std::invalid_argument("Mesh2D: triangle vertex index out of range");
    double a = signed_area(d->vertices[tri.v[0]], d->vertices[tri.v[1]], d->vertices[tri.v[2]]);
    if (!(a > 0.0))
      throw std::invalid_argument("Mesh2D: triangle " + std::to_string(t) +
                                  " is degenerate or negatively oriented");
    d->areas[t] = a;
    d->total_area += a;
  }

  for (int t = 0; t < nt; ++t) {
    const auto& tri = d->triangles[t];
    for (int k = 0; k < 3; ++k) {
      EdgeKey e(tri.v[(k + 1) % 3], tri.v[(k + 2) % 3]);
      d->edge_index.emplace(e, 0);
    }
  }
  d->edges.reserve(d->edge_index.size());
  for (auto& [key, idx] : d->edge_index) {
    idx = static_cast<int>(d->edges.size());
    d->edges.push_back(key);
  }
  d->edge_tris.assign(d->edges.size(), {-1, -1});
  d->tri_edges.resize(nt);
  for (int t = 0; t < nt; ++t) {
    const auto& tri = d->triangles[t];
    for (int k = 0; k < 3; ++k) {
      EdgeKey e(tri.v[(k + 1) % 3], tri.v[(k + 2) % 3]);
      int ei = d->edge_index.at(e);
      d->tri_edges[t][k] = ei;
      auto& inc = d->edge_tris[ei];
      if (inc[0] < 0)
        inc[0] = t;
      else if (inc[1] < 0)
        inc[1] = t;
      else
        throw std::invalid_argument("Mesh2D: edge shared by more than two triangles");
    }
  }

  // Boundary tags must cover exactly the boundary edges.
  for (const auto& [key, tag] : d->boundary_tags) {
    (void)tag;
    if (d->edge_index.find(key) == d->edge_index.end())
      throw std::invalid_argument("Mesh2D: boundary tag on nonexistent edge");
  }
  for (size_t ei = 0; ei < d->edges.size(); ++ei) {
    bool boundary = d->edge_tris[ei][1] < 0;
    bool tagged = d->boundary_tags.count(d->edges[ei]) > 0;
    if (boundary && !tagged)
      throw std::invalid_argument("Mesh2D: boundary edge without a boundary tag");
    if (!boundary && tagged)
      throw std::invalid_argument("Mesh2D: interior edge carries a boundary tag");
  }

  // The mesh must be edge-connected (gauge fixing assumes one component).
  {
    std::vector<int> group(nt);
    std::iota(group.begin(), group.end(), 0);
    std::function<int(int)> find = [&](int x) {
      while (group[x] != x) x = group[x] = group[group[x]];
      return x;
    };
    for (const auto& inc : d->edge_tris)
      if (inc[1] >= 0) group[find(inc[0])] = find(inc[1]);
    int root = find(0);
    for (int t = 1; t < nt; ++t)
      if (find(t) != root) throw std::invalid_argument("Mesh2D: mesh is not edge-connected");
  }

  return Mesh2D(std::move(d));
}

Mesh2D Mesh2D::rectangle(double width, double height, int nx, int ny,
                         const std::function<RegionTag(double, double)>& region_fn,
                         const std::array<BoundaryTag, 4>& side_tags) {
  if (!(width > 0.0) || !(height > 0.0))
    throw std::invalid_argument("Mesh2D::rectangle: dimensions must be positive");
  if (nx < 1 || ny < 1) throw std::invalid_argument("Mesh2D::rectangle: nx, ny must be >= 1");

  std::vector<Point2> vertices;
  vertices.reserve(static_cast<size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      vertices.emplace_back(width * i / nx, height * j / ny);
  auto vid = [&](int i, int j) { return j * (nx + 1) + i; };

  std::vector<Triangle> triangles;
  triangles.reserve(static_cast<size_t>(nx) * ny * 2);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), e = vid(i, j + 1);
      RegionTag region = region_fn(width * (i + 0.5) / nx, height * (j + 0.5) / ny);
      // Cell split along the diagonal a-c; the diagonal is the refinement edge
      // of both halves, so the initial mesh is bisection-compatible.
      Triangle t1;
      t1.v = {c, a, b};
      t1.region = region;
      Triangle t2;
      t2.v = {a, c, e};
      t2.region = region;
      triangles.push_back(t1);
      triangles.push_back(t2);
    }
  }

  std::map<EdgeKey, BoundaryTag> tags;
  for (int j = 0; j < ny; ++j) {
    tags.emplace(EdgeKey(vid(0, j), vid(0, j + 1)), side_tags[0]);
    tags.emplace(EdgeKey(vid(nx, j), vid(nx, j + 1)), side_tags[1]);
  }
  for (int i = 0; i < nx; ++i) {
    tags.emplace(EdgeKey(vid(i, 0), vid(i + 1, 0)), side_tags[2]);
    tags.emplace(EdgeKey(vid(i, ny), vid(i + 1, ny)), side_tags[3]);
  }

  return finalize(std::move(vertices), std::move(triangles), std::move(tags), nullptr);
}

Mesh2D Mesh2D::from_arrays(std::vector<Point2> vertices, std::vector<Triangle> triangles,
                           std::map<EdgeKey, BoundaryTag> boundary_tags) {
  return finalize(std::move(vertices), std::move(triangles), std::move(boundary_tags), nullptr);
}

int Mesh2D::vertex_count() const { return static_cast<int>(d_->vertices.size()); }
int Mesh2D::triangle_count() const { return static_cast<int>(d_->triangles.size()); }
int Mesh2D::edge_count() const { return static_cast<int>(d_->edges.size()); }
const std::vector<Point2>& Mesh2D::vertices() const { return d_->vertices; }
const std::vector<Triangle>& Mesh2D::triangles() const { return d_->triangles; }
const Point2& Mesh2D::vertex(int v) const { return d_->vertices.at(v); }
const Triangle& Mesh2D::triangle(int t) const { return d_->triangles.at(t); }
const std::vector<EdgeKey>& Mesh2D::edges() const { return d_->edges; }

int Mesh2D::edge_index(EdgeKey e) const {
  auto it = d_->edge_index.find(e);
  return it == d_->edge_index.end() ? -1 : it->second;
}

std::array<int, 2> Mesh2D::edge_triangles(int edge) const { return d_->edge_tris.at(edge); }
std::array<int, 3> Mesh2D::triangle_edges(int t) const { return d_->tri_edges.at(t); }

bool Mesh2D::is_boundary_edge(int edge) const { return d_->edge_tris.at(edge)[1] < 0; }

std::optional<BoundaryTag> Mesh2D::boundary_tag(int edge) const {
  auto it = d_->boundary_tags.find(d_->edges.at(edge));
  if (it == d_->boundary_tags.end()) return std::nullopt;
  return it->second;
}

bool Mesh2D::is_interface_edge(int edge) const {
  const auto& inc = d_->edge_tris.at(edge);
  if (inc[1] < 0) return false;
  return d_->triangles[inc[0]].region != d_->triangles[inc[1]].region;
}

bool Mesh2D::is_conductor_rim_edge(int edge) const {
  if (is_interface_edge(edge)) return true;
  const auto& inc = d_->edge_tris.at(edge);
  if (inc[1] >= 0) return false;
  if (d_->triangles[inc[0]].region != RegionTag::conductor) return false;
  return boundary_tag(edge) == BoundaryTag::outer;
}

double Mesh2D::area(int t) const { return d_->areas.at(t); }

Point2 Mesh2D::centroid(int t) const {
  const auto& tri = d_->triangles.at(t);
  return (d_->vertices[tri.v[0]] + d_->vertices[tri.v[1]] + d_->vertices[tri.v[2]]) / 3.0;
}

double Mesh2D::total_area() const { return d_->total_area; }

std::shared_ptr<const Mesh2D> Mesh2D::parent() const { return d_->parent; }

bool Mesh2D::is_descendant_of(const Mesh2D& ancestor) const {
  const Mesh2D* cur = this;
  while (cur) {
    if (cur->same_mesh(ancestor)) return true;
    cur = cur->d_->parent ? cur->d_->parent.get() : nullptr;
  }
  return false;
}

int Mesh2D::ancestor_triangle(const Mesh2D& ancestor, int t) const {
  const Mesh2D* cur = this;
  while (!cur->same_mesh(ancestor)) {
    t = cur->triangle(t).parent;
    if (t < 0) throw std::invalid_argument("ancestor_triangle: meshes are not nested");
    auto p = cur->d_->parent;
    if (!p) throw std::invalid_argument("ancestor_triangle: meshes are not nested");
    cur = p.get();
    // The parent handle must stay alive for the duration of the loop; Data
    // keeps shared ownership of the whole chain, so this is safe.
  }
  return t;
}

namespace {

// Working triangle during bisection. `parent` indexes the source mesh.
struct WorkTri {
  std::array<int, 3> v;
  RegionTag region;
  int parent;
  int generation;
  bool alive = true;
};

} // namespace

Mesh2D Mesh2D::refine(const std::set<int>& marked) const {
  if (marked.empty()) return *this;
  const int nt = triangle_count();
  for (int t : marked)
    if (t < 0 || t >= nt) throw std::invalid_argument("refine: marked triangle out of range");

  std::vector<Point2> verts = d_->vertices;
  std::map<EdgeKey, BoundaryTag> tags = d_->boundary_tags;

  std::vector<WorkTri> tris;
  tris.reserve(nt * 2);
  for (int t = 0; t < nt; ++t) {
    const auto& tri = d_->triangles[t];
    tris.push_back(WorkTri{tri.v, tri.region, t, tri.generation, true});
  }

  // Alive triangles incident to each edge.
  std::map<EdgeKey, std::array<int, 2>> incidence;
  auto attach = [&](EdgeKey e, int t) {
    auto [it, fresh] = incidence.emplace(e, std::array<int, 2>{t, -1});
    if (!fresh) {
      if (it->second[0] < 0)
        it->second[0] = t;
      else if (it->second[1] < 0)
        it->second[1] = t;
      else
        throw std::runtime_error("refine: nonconforming incidence");
    }
  };
  auto detach = [&](EdgeKey e, int t) {
    auto& inc = incidence.at(e);
    if (inc[0] == t)
      inc[0] = -1;
    else if (inc[1] == t)
      inc[1] = -1;
  };
  for (int t = 0; t < nt; ++t) {
    const auto& tri = d_->triangles[t];
    for (int k = 0; k < 3; ++k) attach(EdgeKey(tri.v[(k + 1) % 3], tri.v[(k + 2) % 3]), t);
  }

  std::map<EdgeKey, int> midpoint;
  auto midpoint_vertex = [&](EdgeKey e) {
    auto it = midpoint.find(e);
    if (it != midpoint.end()) return it->second;
    int m = static_cast<int>(verts.size());
    verts.push_back(0.5 * (verts[e.a] + verts[e.b]));
    midpoint.emplace(e, m);
    // A tagged boundary edge passes its tag to both halves.
    auto tag_it = tags.find(e);
    if (tag_it != tags.end()) {
      BoundaryTag tag = tag_it->second;
      tags.erase(tag_it);
      tags.emplace(EdgeKey(e.a, m), tag);
      tags.emplace(EdgeKey(m, e.b), tag);
    }
    return m;
  };

  auto ref_edge = [&](int t) { return EdgeKey(tris[t].v[0], tris[t].v[1]); };

  // Bisect one triangle: children A=(v2,v0,m), B=(v1,v2,m); the peak is the
  // new vertex and the old edges become the children's refinement edges.
  auto bisect = [&](int t, int m) {
    const auto v = tris[t].v;
    tris[t].alive = false;
    for (int k = 0; k < 3; ++k) detach(EdgeKey(v[(k + 1) % 3], v[(k + 2) % 3]), t);
    int ia = static_cast<int>(tris.size());
    tris.push_back(WorkTri{{v[2], v[0], m}, tris[t].region, tris[t].parent,
                           tris[t].generation + 1, true});
    int ib = static_cast<int>(tris.size());
    tris.push_back(WorkTri{{v[1], v[2], m}, tris[t].region, tris[t].parent,
                           tris[t].generation + 1, true});
    for (int child : {ia, ib}) {
      const auto& cv = tris[child].v;
      for (int k = 0; k < 3; ++k) attach(EdgeKey(cv[(k + 1) % 3], cv[(k + 2) % 3]), child);
    }
  };

  auto neighbor_across = [&](EdgeKey e, int t) {
    auto it = incidence.find(e);
    if (it == incidence.end()) return -1;
    if (it->second[0] == t) return it->second[1];
    return it->second[0];
  };

  size_t guard = 0;
  const size_t guard_limit = 64 * static_cast<size_t>(nt) + 1024;
  std::vector<int> stack;
  for (int seed : marked) {
    stack.push_back(seed);
    while (!stack.empty()) {
      if (++guard > guard_limit)
        throw std::runtime_error("refine: bisection closure did not terminate "
                                 "(incompatible refinement-edge assignment)");
      int t = stack.back();
      if (!tris[t].alive) {
        stack.pop_back();
        continue;
      }
      EdgeKey e = ref_edge(t);
      int n = neighbor_across(e, t);
      if (n >= 0 && !(ref_edge(n) == e)) {
        stack.push_back(n);
        continue;
      }
      int m = midpoint_vertex(e);
      bisect(t, m);
      if (n >= 0) bisect(n, m);
      stack.pop_back();
    }
  }

  std::vector<Triangle> out;
  out.reserve(tris.size());
  for (const auto& wt : tris) {
    if (!wt.alive) continue;
    Triangle tri;
    tri.v = wt.v;
    tri.region = wt.region;
    tri.parent = wt.parent;
    tri.generation = wt.generation;
    out.push_back(tri);
  }

  auto parent_handle = std::make_shared<const Mesh2D>(*this);
  return finalize(std::move(verts), std::move(out), std::move(tags), parent_handle);
}

Mesh2D Mesh2D::uniform_refine() const {
  std::set<int> all;
  for (int t = 0; t < triangle_count(); ++t) all.insert(t);
  return refine(all);
}

int Mesh2D::conductor_components(std::vector<int>& component_of_tri) const {
  const int nt = triangle_count();
  component_of_tri.assign(nt, -1);
  std::vector<int> group(nt);
  std::iota(group.begin(), group.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (group[x] != x) x = group[x] = group[group[x]];
    return x;
  };
  for (size_t ei = 0; ei < d_->edges.size(); ++ei) {
    const auto& inc = d_->edge_tris[ei];
    if (inc[1] < 0) continue;
    if (d_->triangles[inc[0]].region == RegionTag::conductor &&
        d_->triangles[inc[1]].region == RegionTag::conductor)
      group[find(inc[0])] = find(inc[1]);
  }
  std::map<int, int> compact;
  for (int t = 0; t < nt; ++t) {
    if (d_->triangles[t].region != RegionTag::conductor) continue;
    int r = find(t);
    auto [it, fresh] = compact.emplace(r, static_cast<int>(compact.size()));
    component_of_tri[t] = it->second;
  }
  const int ncomp = static_cast<int>(compact.size());

  // Euler characteristic check: each component must be a topological disk,
  // otherwise the stream-function multiplier space misses cohomology fields.
  std::vector<std::set<int>> comp_verts(ncomp);
  std::vector<std::set<int>> comp_edges(ncomp);
  std::vector<int> comp_tris(ncomp, 0);
  for (int t = 0; t < nt; ++t) {
    int c = component_of_tri[t];
    if (c < 0) continue;
    ++comp_tris[c];
    for (int k = 0; k < 3; ++k) {
      comp_verts[c].insert(d_->triangles[t].v[k]);
      comp_edges[c].insert(d_->tri_edges[t][k]);
    }
  }
  for (int c = 0; c < ncomp; ++c) {
    long chi = static_cast<long>(comp_verts[c].size()) -
               static_cast<long>(comp_edges[c].size()) + comp_tris[c];
    if (chi != 1)
      throw std::runtime_error(
          "conductor component " + std::to_string(c) +
          " is not simply connected (holes are not supported by the multiplier space)");
  }
  return ncomp;
}

double Mesh2D::min_angle() const {
  double best = M_PI;
  for (const auto& tri : d_->triangles) {
    for (int k = 0; k < 3; ++k) {
      Point2 a = d_->vertices[tri.v[k]];
      Point2 b = d_->vertices[tri.v[(k + 1) % 3]];
      Point2 c = d_->vertices[tri.v[(k + 2) % 3]];
      Point2 u = b - a, w = c - a;
      double ang = std::acos(std::clamp(u.dot(w) / (u.norm() * w.norm()), -1.0, 1.0));
      best = std::min(best, ang);
    }
  }
  return best * 180.0 / M_PI;
}

Mesh2D build_rect_mesh(double width, double height, int nx, int ny,
                       const std::function<RegionTag(double, double)>& region_fn,
                       const std::array<BoundaryTag, 4>& side_tags) {
  return Mesh2D::rectangle(width, height, nx, ny, region_fn, side_tags);
}

Mesh2D refine(const Mesh2D& mesh, const std::set<int>& marked) { return mesh.refine(marked); }
Mesh2D uniform_refine(const Mesh2D& mesh) { return mesh.uniform_refine(); }

} // namespace msfem
