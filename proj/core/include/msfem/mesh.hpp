// Copyright (c) the msfem2d1d authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace msfem {

using Point2 = Eigen::Vector2d;

enum class RegionTag : int { air = 0, conductor = 1 };
enum class BoundaryTag : int { outer = 0, symmetry = 1 };

// Triangle with positive (counter-clockwise) orientation. v[2] is the peak
// (newest vertex); the refinement edge for bisection is (v[0], v[1]).
struct Triangle {
  std::array<int, 3> v;
  RegionTag region = RegionTag::air;
  int parent = -1;    // triangle index in the parent mesh (-1 for root meshes)
  int generation = 0; // bisection depth from the root mesh
};

// Undirected edge identified by its sorted vertex pair.
struct EdgeKey {
  int a, b;
  EdgeKey(int u, int v) : a(u < v ? u : v), b(u < v ? v : u) {}
  bool operator<(const EdgeKey& o) const { return a < o.a || (a == o.a && b < o.b); }
  bool operator==(const EdgeKey& o) const { return a == o.a && b == o.b; }
};

// Conforming triangle mesh with region tags, boundary tags and refinement
// ancestry. Instances are immutable; refine() returns a new mesh that keeps a
// shared reference to its parent, so nested solution transfer can walk the
// parent chain. Copies are cheap (shared state).
class Mesh2D {
 public:
  Mesh2D() = default;

  // Structured rectangle [0,w] x [0,h] split into nx x ny cells, two triangles
  // each (refinement edge on the cell diagonal). region_fn is sampled at cell
  // centers. side_tags order: left, right, bottom, top.
  static Mesh2D rectangle(double width, double height, int nx, int ny,
                          const std::function<RegionTag(double, double)>& region_fn,
                          const std::array<BoundaryTag, 4>& side_tags = {
                              BoundaryTag::outer, BoundaryTag::outer,
                              BoundaryTag::outer, BoundaryTag::outer});

  // Mesh from raw arrays (text-format import). Validates orientation,
  // connectivity and boundary-tag coverage.
  static Mesh2D from_arrays(std::vector<Point2> vertices, std::vector<Triangle> triangles,
                            std::map<EdgeKey, BoundaryTag> boundary_tags);

  bool empty() const { return !d_; }
  int vertex_count() const;
  int triangle_count() const;
  int edge_count() const;

  const std::vector<Point2>& vertices() const;
  const std::vector<Triangle>& triangles() const;
  const Point2& vertex(int v) const;
  const Triangle& triangle(int t) const;

  // Edges in index order; each is a sorted vertex pair.
  const std::vector<EdgeKey>& edges() const;
  int edge_index(EdgeKey e) const; // -1 when absent
  // Triangles adjacent to an edge; second entry is -1 on the boundary.
  std::array<int, 2> edge_triangles(int edge) const;
  // The three edge indices of a triangle, opposite to local vertices 0,1,2.
  std::array<int, 3> triangle_edges(int t) const;

  bool is_boundary_edge(int edge) const;
  // Tag of a boundary edge; nullopt for interior edges.
  std::optional<BoundaryTag> boundary_tag(int edge) const;
  // Interior edge whose two triangles have different region tags.
  bool is_interface_edge(int edge) const;
  // Conductor rim: interface edges plus outer-tagged boundary edges of
  // conductor triangles. Symmetry-tagged edges are excluded.
  bool is_conductor_rim_edge(int edge) const;

  double area(int t) const;
  Point2 centroid(int t) const;
  double total_area() const;

  // Ancestry.
  std::shared_ptr<const Mesh2D> parent() const;
  bool same_mesh(const Mesh2D& other) const { return d_ == other.d_; }
  // True when `ancestor` appears in this mesh's parent chain (or is this mesh).
  bool is_descendant_of(const Mesh2D& ancestor) const;
  // Triangle of `ancestor` containing triangle t of this mesh.
  int ancestor_triangle(const Mesh2D& ancestor, int t) const;

  // Newest-vertex bisection of the marked triangles plus the conformity
  // closure. Empty marking returns the mesh unchanged.
  Mesh2D refine(const std::set<int>& marked) const;
  Mesh2D uniform_refine() const;

  // Conductor connectivity: component id per triangle (-1 for air) and the
  // number of components. Throws std::runtime_error for components with holes
  // (unsupported topology for the stream-function multiplier space).
  int conductor_components(std::vector<int>& component_of_tri) const;

  // Smallest interior angle over all triangles, in degrees.
  double min_angle() const;

 private:
  struct Data;
  std::shared_ptr<const Data> d_;
  explicit Mesh2D(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
  static Mesh2D finalize(std::vector<Point2> vertices, std::vector<Triangle> triangles,
                         std::map<EdgeKey, BoundaryTag> boundary_tags,
                         std::shared_ptr<const Mesh2D> parent);
};

// Free-function spellings used throughout the solver code.
Mesh2D build_rect_mesh(double width, double height, int nx, int ny,
                       const std::function<RegionTag(double, double)>& region_fn,
                       const std::array<BoundaryTag, 4>& side_tags);
Mesh2D refine(const Mesh2D& mesh, const std::set<int>& marked);
Mesh2D uniform_refine(const Mesh2D& mesh);

// Text mesh format (see README): sections "vertices", "triangles", "boundary"
// with counts; '#' starts a comment.
Mesh2D read_mesh(std::istream& in);
Mesh2D read_mesh_file(const std::string& path);
void write_mesh(const Mesh2D& mesh, std::ostream& out);
void write_mesh_file(const Mesh2D& mesh, const std::string& path);

// Legacy ASCII VTK unstructured-grid export with optional per-cell and
// per-vertex scalar fields.
struct VtkCellField {
  std::string name;
  std::vector<double> values; // one per triangle
};
struct VtkPointField {
  std::string name;
  std::vector<double> values; // one per vertex
};
void write_vtk(const Mesh2D& mesh, const std::string& path,
               const std::vector<VtkCellField>& cell_fields = {},
               const std::vector<VtkPointField>& point_fields = {});

} // namespace msfem
