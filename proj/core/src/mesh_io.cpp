// Copyright (c) the msfem2d1d authors
// SPDX-License-Identifier: Apache-2.0
#include "msfem/errors.hpp"
#include "msfem/mesh.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace msfem {

namespace {

// Token stream over the text format: whitespace-separated fields, '#' starts a
// comment to end of line. Tracks line numbers for diagnostics.
class TokenReader {
 public:
  explicit TokenReader(std::istream& in) : in_(in) {}

  std::string next(const char* what) {
    for (;;) {
      if (pos_ >= tokens_.size()) {
        if (!std::getline(in_, linebuf_)) throw ParseError(std::string("expected ") + what, line_);
        ++line_;
        auto hash = linebuf_.find('#');
        if (hash != std::string::npos) linebuf_.erase(hash);
        tokens_.clear();
        pos_ = 0;
        std::istringstream ls(linebuf_);
        std::string tok;
        while (ls >> tok) tokens_.push_back(tok);
        continue;
      }
      return tokens_[pos_++];
    }
  }

  long integer(const char* what) {
    std::string tok = next(what);
    size_t used = 0;
    long value = 0;
    try {
      value = std::stol(tok, &used);
    } catch (const std::exception&) {
      throw ParseError(std::string("expected integer for ") + what + ", got '" + tok + "'", line_);
    }
    if (used != tok.size())
      throw ParseError(std::string("expected integer for ") + what + ", got '" + tok + "'", line_);
    return value;
  }

  double real(const char* what) {
    std::string tok = next(what);
    size_t used = 0;
    double value = 0;
    try {
      value = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw ParseError(std::string("expected number for ") + what + ", got '" + tok + "'", line_);
    }
    if (used != tok.size())
      throw ParseError(std::string("expected number for ") + what + ", got '" + tok + "'", line_);
    return value;
  }

  void keyword(const char* word) {
    std::string tok = next(word);
    if (tok != word)
      throw ParseError(std::string("expected keyword '") + word + "', got '" + tok + "'", line_);
  }

  int line() const { return line_; }

 private:
  std::istream& in_;
  std::string linebuf_;
  std::vector<std::string> tokens_;
  size_t pos_ = 0;
  int line_ = 0;
};

} // namespace

Mesh2D read_mesh(std::istream& in) {
  TokenReader r(in);

  r.keyword("vertices");
  long nv = r.integer("vertex count");
  if (nv < 3) throw ParseError("vertex count must be >= 3", r.line());
  std::vector<Point2> vertices(nv);
  for (long i = 0; i < nv; ++i) {
    double x = r.real("vertex x");
    double y = r.real("vertex y");
    vertices[i] = Point2(x, y);
  }

  r.keyword("triangles");
  long nt = r.integer("triangle count");
  if (nt < 1) throw ParseError("triangle count must be >= 1", r.line());
  std::vector<Triangle> triangles(nt);
  for (long t = 0; t < nt; ++t) {
    Triangle tri;
    for (int k = 0; k < 3; ++k) {
      long v = r.integer("triangle vertex");
      if (v < 0 || v >= nv) throw ParseError("triangle vertex index out of range", r.line());
      tri.v[k] = static_cast<int>(v);
    }
    long region = r.integer("region tag");
    if (region != 0 && region != 1)
      throw ParseError("region tag must be 0 (air) or 1 (conductor)", r.line());
    tri.region = static_cast<RegionTag>(region);
    triangles[t] = tri;
  }

  r.keyword("boundary");
  long nb = r.integer("boundary edge count");
  std::map<EdgeKey, BoundaryTag> tags;
  for (long e = 0; e < nb; ++e) {
    long a = r.integer("boundary edge vertex");
    long b = r.integer("boundary edge vertex");
    if (a < 0 || a >= nv || b < 0 || b >= nv || a == b)
      throw ParseError("boundary edge vertex index out of range", r.line());
    long tag = r.integer("boundary tag");
    if (tag != 0 && tag != 1)
      throw ParseError("boundary tag must be 0 (outer) or 1 (symmetry)", r.line());
    tags.emplace(EdgeKey(static_cast<int>(a), static_cast<int>(b)),
                 static_cast<BoundaryTag>(tag));
  }

  try {
    return Mesh2D::from_arrays(std::move(vertices), std::move(triangles), std::move(tags));
  } catch (const std::invalid_argument& err) {
    throw ParseError(err.what());
  }
}

Mesh2D read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mesh file '" + path + "'");
  return read_mesh(in);
}

void write_mesh(const Mesh2D& mesh, std::ostream& out) {
  out << "# msfem2d1d mesh\n";
  out << "vertices " << mesh.vertex_count() << "\n";
  char buf[96];
  for (const auto& v : mesh.vertices()) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.x(), v.y());
    out << buf;
  }
  out << "triangles " << mesh.triangle_count() << "\n";
  for (const auto& t : mesh.triangles())
    out << t.v[0] << " " << t.v[1] << " " << t.v[2] << " " << static_cast<int>(t.region) << "\n";
  long nb = 0;
  for (int e = 0; e < mesh.edge_count(); ++e)
    if (mesh.is_boundary_edge(e)) ++nb;
  out << "boundary " << nb << "\n";
  for (int e = 0; e < mesh.edge_count(); ++e) {
    if (!mesh.is_boundary_edge(e)) continue;
    auto key = mesh.edges()[e];
    out << key.a << " " << key.b << " " << static_cast<int>(*mesh.boundary_tag(e)) << "\n";
  }
}

void write_mesh_file(const Mesh2D& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_mesh(mesh, out);
  if (!out) throw std::runtime_error("failed writing mesh to '" + path + "'");
}

void write_vtk(const Mesh2D& mesh, const std::string& path,
               const std::vector<VtkCellField>& cell_fields,
               const std::vector<VtkPointField>& point_fields) {
  for (const auto& f : cell_fields)
    if (f.values.size() != static_cast<size_t>(mesh.triangle_count()))
      throw std::invalid_argument("write_vtk: cell field '" + f.name + "' has wrong size");
  for (const auto& f : point_fields)
    if (f.values.size() != static_cast<size_t>(mesh.vertex_count()))
      throw std::invalid_argument("write_vtk: point field '" + f.name + "' has wrong size");

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");

  const long np = mesh.vertex_count();
  const long nc = mesh.triangle_count();
  char buf[128];
  out << "# vtk DataFile Version 3.0\n";
  out << "msfem2d1d\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << np << " double\n";
  for (const auto& v : mesh.vertices()) {
    std::snprintf(buf, sizeof buf, "%.9e %.9e 0\n", v.x(), v.y());
    out << buf;
  }
  out << "CELLS " << nc << " " << 4 * nc << "\n";
  for (const auto& t : mesh.triangles())
    out << "3 " << t.v[0] << " " << t.v[1] << " " << t.v[2] << "\n";
  out << "CELL_TYPES " << nc << "\n";
  for (long c = 0; c < nc; ++c) out << "5\n";

  out << "CELL_DATA " << nc << "\n";
  out << "SCALARS region int 1\n";
  out << "LOOKUP_TABLE default\n";
  for (const auto& t : mesh.triangles()) out << static_cast<int>(t.region) << "\n";
  for (const auto& f : cell_fields) {
    out << "SCALARS " << f.name << " double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (double v : f.values) {
      std::snprintf(buf, sizeof buf, "%.9e\n", v);
      out << buf;
    }
  }
  if (!point_fields.empty()) {
    out << "POINT_DATA " << np << "\n";
    for (const auto& f : point_fields) {
      out << "SCALARS " << f.name << " double 1\n";
      out << "LOOKUP_TABLE default\n";
      for (double v : f.values) {
        std::snprintf(buf, sizeof buf, "%.9e\n", v);
        out << buf;
      }
    }
  }
  if (!out) throw std::runtime_error("failed writing VTK to '" + path + "'");
}

} // namespace msfem
