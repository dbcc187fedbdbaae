// Copyright (c) the msfem2d1d authors
// SPDX-License-Identifier: Apache-2.0
#include "msfem/config.hpp"

#include "msfem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

namespace msfem {

namespace {

constexpr double kMu0 = 4e-7 * std::numbers::pi;

struct ValueAt {
  std::string text;
  int line = -1;
};

double parse_double(const ValueAt& v, const std::string& key) {
  std::istringstream ss(v.text);
  double x;
  if (!(ss >> x) || !(ss >> std::ws).eof())
    throw ParseError("expected a number for '" + key + "'", v.line);
  return x;
}

int parse_int(const ValueAt& v, const std::string& key) {
  std::istringstream ss(v.text);
  long x;
  if (!(ss >> x) || !(ss >> std::ws).eof())
    throw ParseError("expected an integer for '" + key + "'", v.line);
  return static_cast<int>(x);
}

std::vector<double> parse_doubles(const ValueAt& v, const std::string& key, size_t n) {
  std::istringstream ss(v.text);
  std::vector<double> out;
  double x;
  while (ss >> x) out.push_back(x);
  if (!(ss >> std::ws).eof() || out.size() != n)
    throw ParseError("expected " + std::to_string(n) + " numbers for '" + key + "'",
                     v.line);
  return out;
}

BoundaryTag parse_tag(const std::string& word, int line) {
  if (word == "outer") return BoundaryTag::outer;
  if (word == "symmetry") return BoundaryTag::symmetry;
  throw ParseError("unknown boundary tag '" + word + "' (outer|symmetry)", line);
}

std::string trim(const std::string& s) {
  const size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct Rect {
  double x0, y0, x1, y1;
  bool contains(double x, double y) const {
    return x >= x0 && x <= x1 && y >= y0 && y <= y1;
  }
};

// Collected raw keys; semantic assembly happens once the file is read.
struct RawConfig {
  std::optional<ValueAt> width, height, nx, ny, mesh_file, boundary;
  std::vector<ValueAt> conductor;
  std::optional<ValueAt> d, fill_factor, d_fe, d0;
  std::optional<ValueAt> sigma, mu_r, mu_r_air;
  std::optional<ValueAt> frequency, uniform_h, gauss_points;
  std::vector<ValueAt> wires, regions;
  std::optional<ValueAt> nodal_order, edge_order;
  std::optional<ValueAt> threshold, max_iterations, dof_budget;
};

void store_unique(std::optional<ValueAt>& slot, const ValueAt& v, const std::string& key) {
  if (slot) throw ParseError("duplicate key '" + key + "'", v.line);
  slot = v;
}

void collect(RawConfig& raw, const std::string& section, const std::string& key,
             const ValueAt& v) {
  auto unknown = [&]() -> void {
    throw ParseError("unknown key '" + key + "' in section [" + section + "]", v.line);
  };
  if (section == "geometry") {
    if (key == "width") store_unique(raw.width, v, key);
    else if (key == "height") store_unique(raw.height, v, key);
    else if (key == "nx") store_unique(raw.nx, v, key);
    else if (key == "ny") store_unique(raw.ny, v, key);
    else if (key == "conductor") raw.conductor.push_back(v);
    else if (key == "boundary") store_unique(raw.boundary, v, key);
    else if (key == "mesh_file") store_unique(raw.mesh_file, v, key);
    else unknown();
  } else if (section == "sheet") {
    if (key == "d") store_unique(raw.d, v, key);
    else if (key == "fill_factor") store_unique(raw.fill_factor, v, key);
    else if (key == "d_fe") store_unique(raw.d_fe, v, key);
    else if (key == "d0") store_unique(raw.d0, v, key);
    else unknown();
  } else if (section == "materials") {
    if (key == "sigma") store_unique(raw.sigma, v, key);
    else if (key == "mu_r") store_unique(raw.mu_r, v, key);
    else if (key == "mu_r_air") store_unique(raw.mu_r_air, v, key);
    else unknown();
  } else if (section == "excitation") {
    if (key == "frequency") store_unique(raw.frequency, v, key);
    else if (key == "uniform_h") store_unique(raw.uniform_h, v, key);
    else if (key == "wire") raw.wires.push_back(v);
    else if (key == "region") raw.regions.push_back(v);
    else if (key == "gauss_points") store_unique(raw.gauss_points, v, key);
    else unknown();
  } else if (section == "discretization") {
    if (key == "nodal_order") store_unique(raw.nodal_order, v, key);
    else if (key == "edge_order") store_unique(raw.edge_order, v, key);
    else unknown();
  } else if (section == "adaptivity") {
    if (key == "threshold") store_unique(raw.threshold, v, key);
    else if (key == "max_iterations") store_unique(raw.max_iterations, v, key);
    else if (key == "dof_budget") store_unique(raw.dof_budget, v, key);
    else unknown();
  } else {
    throw ParseError("unknown section [" + section + "]", v.line);
  }
}

Mesh2D build_geometry(const RawConfig& raw, const std::string& base_dir) {
  if (raw.mesh_file) {
    if (raw.width || raw.height || raw.nx || raw.ny || !raw.conductor.empty() ||
        raw.boundary)
      throw ParseError("mesh_file excludes the rectangle geometry keys",
                       raw.mesh_file->line);
    const std::filesystem::path p =
        std::filesystem::path(base_dir) / raw.mesh_file->text;
    return read_mesh_file(p.string());
  }
  for (const auto* req : {&raw.width, &raw.height, &raw.nx, &raw.ny})
    if (!*req)
      throw ParseError("geometry needs width, height, nx, ny (or mesh_file)");
  const double width = parse_double(*raw.width, "width");
  const double height = parse_double(*raw.height, "height");
  const int nx = parse_int(*raw.nx, "nx");
  const int ny = parse_int(*raw.ny, "ny");
  if (width <= 0.0 || height <= 0.0)
    throw ParseError("geometry.width and geometry.height must be positive",
                     raw.width->line);
  if (nx < 1 || ny < 1)
    throw ParseError("geometry.nx and geometry.ny must be at least 1", raw.nx->line);
  if (raw.conductor.empty())
    throw ParseError("geometry needs at least one conductor rectangle");
  std::vector<Rect> rects;
  for (const ValueAt& v : raw.conductor) {
    const std::vector<double> r = parse_doubles(v, "conductor", 4);
    if (r[2] <= r[0] || r[3] <= r[1])
      throw ParseError("conductor rectangle must have x0 < x1 and y0 < y1", v.line);
    rects.push_back({r[0], r[1], r[2], r[3]});
  }
  std::array<BoundaryTag, 4> tags = {BoundaryTag::outer, BoundaryTag::outer,
                                     BoundaryTag::outer, BoundaryTag::outer};
  if (raw.boundary) {
    std::istringstream ss(raw.boundary->text);
    std::string word;
    int i = 0;
    while (ss >> word) {
      if (i >= 4)
        throw ParseError("boundary needs exactly 4 tags (left right bottom top)",
                         raw.boundary->line);
      tags[i++] = parse_tag(word, raw.boundary->line);
    }
    if (i != 4)
      throw ParseError("boundary needs exactly 4 tags (left right bottom top)",
                       raw.boundary->line);
  }
  return build_rect_mesh(width, height, nx, ny,
                         [rects](double x, double y) {
                           for (const Rect& r : rects)
                             if (r.contains(x, y)) return RegionTag::conductor;
                           return RegionTag::air;
                         },
                         tags);
}

ThicknessProfile build_profile(const RawConfig& raw) {
  const bool fill_style = raw.d || raw.fill_factor;
  const bool split_style = raw.d_fe || raw.d0;
  if (fill_style && split_style)
    throw ParseError("sheet accepts either d + fill_factor or d_fe + d0, not both");
  try {
    if (fill_style) {
      if (!raw.d || !raw.fill_factor)
        throw ParseError("sheet needs both d and fill_factor");
      return ThicknessProfile::from_fill_factor(parse_double(*raw.d, "d"),
                                                parse_double(*raw.fill_factor, "fill_factor"));
    }
    if (!raw.d_fe) throw ParseError("sheet needs d + fill_factor or d_fe (+ d0)");
    return ThicknessProfile(parse_double(*raw.d_fe, "d_fe"),
                            raw.d0 ? parse_double(*raw.d0, "d0") : 0.0);
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("sheet: ") + e.what());
  }
}

BiotSavartSource build_source(const RawConfig& raw) {
  const bool has_currents = !raw.wires.empty() || !raw.regions.empty();
  if (raw.uniform_h && has_currents)
    throw ParseError("excitation accepts either uniform_h or wire/region sources",
                     raw.uniform_h->line);
  if (!raw.uniform_h && !has_currents)
    throw ParseError("excitation needs uniform_h or at least one wire/region");
  if (raw.uniform_h) {
    if (raw.gauss_points)
      throw ParseError("gauss_points applies only to region sources",
                       raw.gauss_points->line);
    const std::vector<double> h = parse_doubles(*raw.uniform_h, "uniform_h", 2);
    return BiotSavartSource::uniform(Eigen::Vector2d(h[0], h[1]));
  }
  std::vector<Wire> wires;
  for (const ValueAt& v : raw.wires) {
    const std::vector<double> w = parse_doubles(v, "wire", 3);
    wires.push_back({Point2(w[0], w[1]), w[2]});
  }
  std::vector<CurrentRegion> regions;
  for (const ValueAt& v : raw.regions) {
    const std::vector<double> r = parse_doubles(v, "region", 5);
    if (r[2] <= r[0] || r[3] <= r[1])
      throw ParseError("region rectangle must have x0 < x1 and y0 < y1", v.line);
    regions.push_back({Point2(r[0], r[1]), Point2(r[2], r[3]), r[4]});
  }
  try {
    return BiotSavartSource::from_currents(
        wires, regions,
        raw.gauss_points ? parse_int(*raw.gauss_points, "gauss_points") : 4);
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("excitation: ") + e.what());
  }
}

} // namespace

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

Config parse_config(std::istream& in, const std::string& base_dir) {
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  RawConfig raw;
  std::istringstream lines(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    const size_t hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line.erase(hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParseError("malformed section header '" + line + "'", lineno);
      section = trim(line.substr(1, line.size() - 2));
      static const char* known[] = {"geometry",   "sheet",          "materials",
                                    "excitation", "discretization", "adaptivity"};
      if (std::find(std::begin(known), std::end(known), section) == std::end(known))
        throw ParseError("unknown section [" + section + "]", lineno);
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected 'key = value', got '" + line + "'", lineno);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ParseError("expected 'key = value', got '" + line + "'", lineno);
    if (section.empty())
      throw ParseError("key '" + key + "' outside any section", lineno);
    collect(raw, section, key, ValueAt{value, lineno});
  }

  Config cfg;
  cfg.hash = fnv1a(text);
  cfg.setup.mesh = build_geometry(raw, base_dir);
  cfg.setup.profile = build_profile(raw);

  if (!raw.sigma) throw ParseError("materials needs sigma");
  const double sigma = parse_double(*raw.sigma, "sigma");
  if (sigma <= 0.0)
    throw ParseError("materials.sigma must be positive", raw.sigma->line);
  const double mu_r = raw.mu_r ? parse_double(*raw.mu_r, "mu_r") : 1.0;
  const double mu_r_air = raw.mu_r_air ? parse_double(*raw.mu_r_air, "mu_r_air") : 1.0;
  if (mu_r <= 0.0) throw ParseError("materials.mu_r must be positive", raw.mu_r->line);
  if (mu_r_air <= 0.0)
    throw ParseError("materials.mu_r_air must be positive", raw.mu_r_air->line);
  cfg.setup.conductor = {sigma, mu_r * kMu0};
  cfg.setup.air = {0.0, mu_r_air * kMu0};

  if (!raw.frequency) throw ParseError("excitation needs frequency");
  cfg.setup.frequency = parse_double(*raw.frequency, "frequency");
  if (!(cfg.setup.frequency >= 0.0) || !std::isfinite(cfg.setup.frequency))
    throw ParseError("excitation.frequency must be finite and non-negative",
                     raw.frequency->line);
  cfg.setup.source = build_source(raw);

  if (raw.nodal_order) cfg.setup.nodal_order = parse_int(*raw.nodal_order, "nodal_order");
  if (raw.edge_order) cfg.setup.edge_order = parse_int(*raw.edge_order, "edge_order");

  if (raw.threshold) {
    cfg.adaptivity.threshold = parse_double(*raw.threshold, "threshold");
    if (!(cfg.adaptivity.threshold > 0.0) || !(cfg.adaptivity.threshold <= 1.0))
      throw ParseError("adaptivity.threshold must be in (0, 1]", raw.threshold->line);
  }
  if (raw.max_iterations) {
    cfg.adaptivity.max_iterations = parse_int(*raw.max_iterations, "max_iterations");
    if (cfg.adaptivity.max_iterations < 0)
      throw ParseError("adaptivity.max_iterations must be non-negative",
                       raw.max_iterations->line);
  }
  if (raw.dof_budget) {
    cfg.adaptivity.dof_budget = parse_int(*raw.dof_budget, "dof_budget");
    if (cfg.adaptivity.dof_budget < 0)
      throw ParseError("adaptivity.dof_budget must be non-negative", raw.dof_budget->line);
  }

  cfg.setup.validate();
  return cfg;
}

Config parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'");
  const std::string dir = std::filesystem::path(path).parent_path().string();
  return parse_config(in, dir.empty() ? "." : dir);
}

} // namespace msfem
