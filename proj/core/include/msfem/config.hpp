// Copyright (c) the msfem2d1d authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "msfem/assembly.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace msfem {

struct AdaptivityConfig {
  double threshold = 0.5;     // marking fraction of the largest indicator
  int max_iterations = 10;
  Eigen::Index dof_budget = 0; // 0: unlimited
};

struct Config {
  ProblemSetup setup;
  AdaptivityConfig adaptivity;
  std::uint64_t hash = 0; // FNV-1a of the raw config bytes
};

// Problem description in an INI-style text file. Sections and keys:
//
//   [geometry]   width height nx ny conductor* boundary | mesh_file
//   [sheet]      d fill_factor | d_fe d0
//   [materials]  sigma mu_r mu_r_air
//   [excitation] frequency, then uniform_h | wire* | region*, gauss_points
//   [discretization] nodal_order edge_order
//   [adaptivity] threshold max_iterations dof_budget
//
// conductor = x0 y0 x1 y1 (repeatable; cells whose center lies in any listed
// rectangle are conductor), boundary = four tags (left right bottom top, each
// outer|symmetry), wire = x y current, region = x0 y0 x1 y1 current_density.
// '#' starts a comment. Unknown sections or keys are errors. mesh_file paths
// are resolved against base_dir.
Config parse_config(std::istream& in, const std::string& base_dir = ".");
Config parse_config_file(const std::string& path);

// 64-bit FNV-1a, the config-hash function recorded in run manifests.
std::uint64_t fnv1a(std::string_view bytes);

} // namespace msfem
