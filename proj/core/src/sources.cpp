// Copyright (c) the msfem2d1d authors
// SPDX-License-Identifier: Apache-2.0
#include "msfem/sources.hpp"

#include "msfem/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace msfem {

namespace {

// Field of an infinite z-directed wire: I/(2 pi) * (-(y-y'), (x-x')) / r^2.
Eigen::Vector2d wire_field(const Point2& x, const Point2& pos, double current) {
  const Eigen::Vector2d r = x - pos;
  const double r2 = r.squaredNorm();
  if (r2 == 0.0) return Eigen::Vector2d::Zero(); // on the singularity
  const double s = current / (2.0 * M_PI * r2);
  return {-s * r.y(), s * r.x()};
}

} // namespace

BiotSavartSource BiotSavartSource::uniform(const Eigen::Vector2d& h) {
  BiotSavartSource src;
  src.uniform_ = true;
  src.h_ = h;
  return src;
}

BiotSavartSource BiotSavartSource::from_currents(
    std::vector<Wire> wires, std::vector<CurrentRegion> regions,
    int gauss_points) {
  if (gauss_points < 1 || gauss_points > 32)
    throw std::invalid_argument("BiotSavartSource: gauss_points out of range");
  BiotSavartSource src;
  src.wires_ = std::move(wires);
  src.regions_ = std::move(regions);
  for (const CurrentRegion& r : src.regions_) {
    if (!(r.hi.x() > r.lo.x()) || !(r.hi.y() > r.lo.y()))
      throw std::invalid_argument("BiotSavartSource: empty current region");
  }
  const GaussRule rule = gauss_legendre(gauss_points);
  for (int i = 0; i < gauss_points; ++i) {
    src.gauss_pos_.push_back(0.5 * (1.0 + rule.points[i]));
    src.gauss_w_.push_back(0.5 * rule.weights[i]);
  }
  return src;
}

Eigen::Vector2d BiotSavartSource::field(const Point2& x) const {
  if (uniform_) return h_;
  Eigen::Vector2d h = Eigen::Vector2d::Zero();
  for (const Wire& w : wires_) h += wire_field(x, w.position, w.current);
  for (const CurrentRegion& reg : regions_) {
    const Eigen::Vector2d ext = reg.hi - reg.lo;
    const double da = ext.prod();
    for (std::size_t i = 0; i < gauss_pos_.size(); ++i) {
      for (std::size_t j = 0; j < gauss_pos_.size(); ++j) {
        const Point2 p = reg.lo + Point2(gauss_pos_[i] * ext.x(),
                                         gauss_pos_[j] * ext.y());
        const double di = reg.current_density * da * gauss_w_[i] * gauss_w_[j];
        h += wire_field(x, p, di);
      }
    }
  }
  return h;
}

double BiotSavartSource::net_current() const {
  double total = 0.0;
  for (const Wire& w : wires_) total += w.current;
  for (const CurrentRegion& r : regions_) total += r.current();
  return total;
}

} // namespace msfem
