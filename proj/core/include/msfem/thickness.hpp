// Copyright (c) the msfem2d1d authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace msfem {

// Laminated-sheet cross section: one iron sheet of thickness d_fe centered in a
// period of total thickness d_fe + d0 (d0 = insulation). All thickness
// coordinates z are measured from the sheet midplane; the sheet occupies
// |z| <= d_fe / 2.
struct ThicknessProfile {
  double d_fe = 0.0; // iron thickness
  double d0 = 0.0;   // insulation thickness (may be 0)

  ThicknessProfile() = default;
  ThicknessProfile(double d_fe_, double d0_);

  // From total period d and iron fill factor (d_fe = fill * d).
  static ThicknessProfile from_fill_factor(double d, double fill);

  double d() const { return d_fe + d0; }
  // Scaling constant relating phi2' to phi1_hat: phi2' = K * phi1_hat.
  double K() const;
};

// Thickness shape functions in s = 2 z / d_fe:
//   phi0 = 1 everywhere,
//   phi1_hat = (d_fe / 2) s            (sheet only),
//   phi2 = (1/2) sqrt(3/2) (s^2 - 1)   (0 in insulation),
//   phi3_hat = (d_fe sqrt(6) / 8) s (s^2/3 - 1)  (sheet only).
enum class ShapeFn { phi0, phi1_hat, phi2, phi3_hat };

// Value at thickness coordinate z in [-(d_fe+d0)/2, (d_fe+d0)/2].
// phi1_hat / phi3_hat are only defined in the sheet; evaluating them in the
// insulation throws std::domain_error. Points outside the period throw too.
double eval_shape(ShapeFn fn, double z, const ThicknessProfile& profile);

// d/dz of the shape functions, same domain rules. phi0' = 0, phi2' vanishes in
// the insulation, phi1_hat' = phi0 and phi3_hat' = phi2 in the sheet.
double eval_shape_deriv(ShapeFn fn, double z, const ThicknessProfile& profile);

// Closed-form thickness integrals bar(kappa f g) = integral over one period of
// kappa(z) f(z) g(z) dz, where kappa is kappa_fe in the sheet and kappa0 in
// the insulation. Only phi0^2 picks up an insulation contribution; the other
// entries involve sheet-supported functions.
struct CoefficientTable {
  double phi1_hat_sq = 0.0;      // bar(kappa phi1_hat^2)      = d_fe^3 kappa_fe / 12
  double phi2_sq = 0.0;          // bar(kappa phi2^2)          = d_fe kappa_fe / 5
  double phi2_prime_sq = 0.0;    // bar(kappa phi2'^2)         = 2 kappa_fe / d_fe
  double phi0_phi2 = 0.0;        // bar(kappa phi0 phi2)       = -sqrt(6) d_fe kappa_fe / 6
  double phi3_hat_sq = 0.0;      // bar(kappa phi3_hat^2)      = 17 d_fe^3 kappa_fe / 840
  double phi1_hat_phi3_hat = 0.0;// bar(kappa phi1_hat phi3_hat) = -sqrt(6) d_fe^3 kappa_fe / 60
  double phi0_sq_full = 0.0;     // kappa_fe d_fe + kappa0 d0  (main weak form)
  double phi0_sq_sheet = 0.0;    // kappa_fe d_fe              (equilibration, estimator)
};

CoefficientTable coefficient_table(double kappa_fe, double kappa0,
                                   const ThicknessProfile& profile);

} // namespace msfem
