// Copyright (c) the msfem2d1d authors
// SPDX-License-Identifier: Apache-2.0
#include "msfem/thickness.hpp"

#include <cmath>
#include <stdexcept>

namespace msfem {

ThicknessProfile::ThicknessProfile(double d_fe_, double d0_) : d_fe(d_fe_), d0(d0_) {
  if (!(d_fe > 0.0)) throw std::invalid_argument("ThicknessProfile: d_fe must be positive");
  if (d0 < 0.0) throw std::invalid_argument("ThicknessProfile: d0 must be non-negative");
}

ThicknessProfile ThicknessProfile::from_fill_factor(double d, double fill) {
  if (!(d > 0.0)) throw std::invalid_argument("ThicknessProfile: d must be positive");
  if (!(fill > 0.0) || fill > 1.0)
    throw std::invalid_argument("ThicknessProfile: fill factor must be in (0, 1]");
  return ThicknessProfile(fill * d, (1.0 - fill) * d);
}

double ThicknessProfile::K() const { return 2.0 * std::sqrt(6.0) / (d_fe * d_fe); }

namespace {

// Returns s = 2z/d_fe and whether z lies in the sheet; throws outside the period.
bool locate(double z, const ThicknessProfile& p, double& s) {
  double half_period = 0.5 * p.d();
  double tol = 1e-12 * p.d();
  if (std::abs(z) > half_period + tol)
    throw std::domain_error("eval_shape: z outside the lamination period");
  s = 2.0 * z / p.d_fe;
  return std::abs(z) <= 0.5 * p.d_fe + tol;
}

[[noreturn]] void insulation_error(const char* name) {
  throw std::domain_error(std::string("eval_shape: ") + name +
                          " is only defined inside the sheet");
}

} // namespace

double eval_shape(ShapeFn fn, double z, const ThicknessProfile& profile) {
  double s = 0.0;
  bool in_sheet = locate(z, profile, s);
  switch (fn) {
    case ShapeFn::phi0:
      return 1.0;
    case ShapeFn::phi2:
      return in_sheet ? 0.5 * std::sqrt(1.5) * (s * s - 1.0) : 0.0;
    case ShapeFn::phi1_hat:
      if (!in_sheet) insulation_error("phi1_hat");
      return 0.5 * profile.d_fe * s;
    case ShapeFn::phi3_hat:
      if (!in_sheet) insulation_error("phi3_hat");
      return profile.d_fe * std::sqrt(6.0) / 8.0 * s * (s * s / 3.0 - 1.0);
  }
  throw std::invalid_argument("eval_shape: unknown shape function");
}

double eval_shape_deriv(ShapeFn fn, double z, const ThicknessProfile& profile) {
  double s = 0.0;
  bool in_sheet = locate(z, profile, s);
  double ds_dz = 2.0 / profile.d_fe;
  switch (fn) {
    case ShapeFn::phi0:
      return 0.0;
    case ShapeFn::phi2:
      return in_sheet ? std::sqrt(1.5) * s * ds_dz : 0.0;
    case ShapeFn::phi1_hat:
      if (!in_sheet) insulation_error("phi1_hat");
      return 1.0;
    case ShapeFn::phi3_hat:
      if (!in_sheet) insulation_error("phi3_hat");
      return profile.d_fe * std::sqrt(6.0) / 8.0 * (s * s - 1.0) * ds_dz;
  }
  throw std::invalid_argument("eval_shape_deriv: unknown shape function");
}

CoefficientTable coefficient_table(double kappa_fe, double kappa0,
                                   const ThicknessProfile& profile) {
  const double d = profile.d_fe;
  const double s6 = std::sqrt(6.0);
  CoefficientTable t;
  t.phi1_hat_sq = kappa_fe * d * d * d / 12.0;
  t.phi2_sq = kappa_fe * d / 5.0;
  t.phi2_prime_sq = 2.0 * kappa_fe / d;
  t.phi0_phi2 = -s6 * d * kappa_fe / 6.0;
  t.phi3_hat_sq = 17.0 * kappa_fe * d * d * d / 840.0;
  t.phi1_hat_phi3_hat = -s6 * kappa_fe * d * d * d / 60.0;
  t.phi0_sq_full = kappa_fe * d + kappa0 * profile.d0;
  t.phi0_sq_sheet = kappa_fe * d;
  return t;
}

} // namespace msfem
