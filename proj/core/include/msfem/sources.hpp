// Copyright (c) the msfem2d1d authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "msfem/mesh.hpp"

#include <vector>

namespace msfem {

// Infinite straight wire along z through `position`, carrying `current` (A).
struct Wire {
  Point2 position = Point2::Zero();
  double current = 0.0;
};

// Axis-aligned rectangle carrying a uniform z-directed current density (A/m2).
struct CurrentRegion {
  Point2 lo = Point2::Zero();
  Point2 hi = Point2::Zero();
  double current_density = 0.0;
  double current() const { return current_density * (hi - lo).prod(); }
};

// Prescribed excitation field over the cross-section: either a fixed uniform
// in-plane field, or the Biot-Savart field of z-directed wires and
// rectangular current regions. Region integrals use tensor Gauss rules.
class BiotSavartSource {
 public:
  BiotSavartSource() = default; // zero field

  static BiotSavartSource uniform(const Eigen::Vector2d& h);
  static BiotSavartSource from_currents(std::vector<Wire> wires,
                                        std::vector<CurrentRegion> regions,
                                        int gauss_points = 4);

  // In-plane H_BS at a point (A/m). The source phasor is real.
  Eigen::Vector2d field(const Point2& x) const;

  bool is_uniform() const { return uniform_; }
  // Total z-current of all wires and regions (0 in uniform mode). A nonzero
  // net current is legal but worth a warning: the far field decays like 1/r.
  double net_current() const;

 private:
  bool uniform_ = false;
  Eigen::Vector2d h_ = Eigen::Vector2d::Zero();
  std::vector<Wire> wires_;
  std::vector<CurrentRegion> regions_;
  std::vector<double> gauss_pos_, gauss_w_; // scaled to [0,1]
};

} // namespace msfem
