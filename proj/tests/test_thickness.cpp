// Copyright (c) the msfem2d1d authors
// SPDX-License-Identifier: Apache-2.0
#include "msfem/thickness.hpp"

#include "msfem/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace msfem;

namespace {

// Quadrature route for the thickness integrals, fully independent of the
// closed forms: Gauss-Legendre on the sheet (and insulation for phi0^2),
// sampling eval_shape itself. Degree of any product here is <= 6, so n = 16
// nodes are exact to rounding.
double quad_sheet(ShapeFn f, ShapeFn g, double kappa_fe, const ThicknessProfile& p) {
  auto rule = gauss_legendre(16);
  double a = -p.d_fe / 2, b = p.d_fe / 2;
  double sum = 0;
  for (size_t q = 0; q < rule.points.size(); ++q) {
    double z = 0.5 * (a + b) + 0.5 * (b - a) * rule.points[q];
    sum += rule.weights[q] * eval_shape(f, z, p) * eval_shape(g, z, p);
  }
  return kappa_fe * 0.5 * (b - a) * sum;
}

double quad_phi0_sq_full(double kappa_fe, double kappa0, const ThicknessProfile& p) {
  double sheet = quad_sheet(ShapeFn::phi0, ShapeFn::phi0, kappa_fe, p);
  // phi0 = 1 in the insulation; integrate it there explicitly.
  auto rule = gauss_legendre(16);
  double ins = 0;
  double a = p.d_fe / 2, b = p.d() / 2;
  for (size_t q = 0; q < rule.points.size(); ++q) {
    double z = 0.5 * (a + b) + 0.5 * (b - a) * rule.points[q];
    ins += rule.weights[q] * eval_shape(ShapeFn::phi0, z, p) * eval_shape(ShapeFn::phi0, z, p);
  }
  return sheet + 2 * kappa0 * 0.5 * (b - a) * ins;
}

void check_rel(double got, double want, double tol = 1e-12) {
  double scale = std::max({std::abs(got), std::abs(want), 1e-300});
  CHECK(std::abs(got - want) / scale < tol);
}

} // namespace

TEST_CASE("shape function point values") {
  ThicknessProfile p(0.475e-3, 0.025e-3);

  CHECK(eval_shape(ShapeFn::phi0, 0.0, p) == 1.0);
  CHECK(eval_shape(ShapeFn::phi0, 0.24e-3, p) == 1.0); // insulation

  CHECK(eval_shape(ShapeFn::phi1_hat, 0.0, p) == 0.0);
  // phi1_hat(z) = z in the sheet; at the sheet surface z = d_fe/2.
  CHECK(eval_shape(ShapeFn::phi1_hat, p.d_fe / 2, p) == doctest::Approx(0.2375e-3).epsilon(1e-14));
  CHECK(eval_shape(ShapeFn::phi1_hat, -p.d_fe / 2, p) ==
        doctest::Approx(-0.2375e-3).epsilon(1e-14));

  CHECK(eval_shape(ShapeFn::phi2, p.d_fe / 2, p) == doctest::Approx(0.0));
  CHECK(eval_shape(ShapeFn::phi2, -p.d_fe / 2, p) == doctest::Approx(0.0));
  CHECK(eval_shape(ShapeFn::phi2, 0.0, p) ==
        doctest::Approx(-0.5 * std::sqrt(1.5)).epsilon(1e-14));
  CHECK(eval_shape(ShapeFn::phi2, 0.24e-3, p) == 0.0); // insulation

  CHECK(eval_shape(ShapeFn::phi3_hat, 0.0, p) == 0.0);
  CHECK(eval_shape(ShapeFn::phi3_hat, p.d_fe / 2, p) ==
        doctest::Approx(-p.d_fe * std::sqrt(6.0) / 12.0).epsilon(1e-14));
}

TEST_CASE("shape functions outside their domain throw") {
  ThicknessProfile p(0.475e-3, 0.025e-3);
  CHECK_THROWS_AS(eval_shape(ShapeFn::phi1_hat, 0.24e-3, p), std::domain_error);
  CHECK_THROWS_AS(eval_shape(ShapeFn::phi3_hat, -0.24e-3, p), std::domain_error);
  CHECK_THROWS_AS(eval_shape_deriv(ShapeFn::phi1_hat, 0.24e-3, p), std::domain_error);
  CHECK_THROWS_AS(eval_shape(ShapeFn::phi0, 0.3e-3, p), std::domain_error);
  CHECK_THROWS_AS(eval_shape(ShapeFn::phi2, -0.3e-3, p), std::domain_error);
}

TEST_CASE("derivative identities phi1_hat' = phi0, phi3_hat' = phi2, phi2' = K phi1_hat") {
  ThicknessProfile p(0.475e-3, 0.025e-3);
  CHECK(p.K() == doctest::Approx(2.0 * std::sqrt(6.0) / (p.d_fe * p.d_fe)).epsilon(1e-15));

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> zdist(-p.d_fe / 2, p.d_fe / 2);
  for (int k = 0; k < 50; ++k) {
    double z = zdist(rng);
    check_rel(eval_shape_deriv(ShapeFn::phi1_hat, z, p), eval_shape(ShapeFn::phi0, z, p), 1e-13);
    check_rel(eval_shape_deriv(ShapeFn::phi3_hat, z, p), eval_shape(ShapeFn::phi2, z, p), 1e-13);
    check_rel(eval_shape_deriv(ShapeFn::phi2, z, p), p.K() * eval_shape(ShapeFn::phi1_hat, z, p),
              1e-13);
    CHECK(eval_shape_deriv(ShapeFn::phi0, z, p) == 0.0);
  }
}

TEST_CASE("derivatives match central finite differences") {
  ThicknessProfile p(0.6e-3, 0.05e-3);
  double h = 1e-9;
  for (double z : {-2.1e-4, -1e-4, 3e-5, 1.7e-4, 2.6e-4}) {
    for (ShapeFn fn : {ShapeFn::phi1_hat, ShapeFn::phi2, ShapeFn::phi3_hat}) {
      double fd = (eval_shape(fn, z + h, p) - eval_shape(fn, z - h, p)) / (2 * h);
      double an = eval_shape_deriv(fn, z, p);
      CHECK(std::abs(fd - an) < 1e-6 * std::max(1.0, std::abs(an)));
    }
  }
}

TEST_CASE("phi2 derivative vanishes in the insulation") {
  ThicknessProfile p(0.475e-3, 0.025e-3);
  CHECK(eval_shape_deriv(ShapeFn::phi2, 0.24e-3, p) == 0.0);
  CHECK(eval_shape_deriv(ShapeFn::phi0, 0.24e-3, p) == 0.0);
}

TEST_CASE("coefficient table closed forms against quadrature, randomized") {
  std::mt19937 rng(2026);
  std::uniform_real_distribution<double> dlog(std::log(1e-4), std::log(2e-3));
  std::uniform_real_distribution<double> fill(0.5, 1.0);
  std::uniform_real_distribution<double> klog(std::log(1e-7), std::log(1e7));

  for (int draw = 0; draw < 100; ++draw) {
    double d = std::exp(dlog(rng));
    auto p = ThicknessProfile::from_fill_factor(d, fill(rng));
    double kappa_fe = std::exp(klog(rng));
    double kappa0 = (draw % 3 == 0) ? 0.0 : std::exp(klog(rng));

    auto table = coefficient_table(kappa_fe, kappa0, p);
    check_rel(table.phi1_hat_sq, quad_sheet(ShapeFn::phi1_hat, ShapeFn::phi1_hat, kappa_fe, p));
    check_rel(table.phi2_sq, quad_sheet(ShapeFn::phi2, ShapeFn::phi2, kappa_fe, p));
    check_rel(table.phi0_phi2, quad_sheet(ShapeFn::phi0, ShapeFn::phi2, kappa_fe, p));
    check_rel(table.phi3_hat_sq, quad_sheet(ShapeFn::phi3_hat, ShapeFn::phi3_hat, kappa_fe, p));
    check_rel(table.phi1_hat_phi3_hat,
              quad_sheet(ShapeFn::phi1_hat, ShapeFn::phi3_hat, kappa_fe, p));
    check_rel(table.phi0_sq_sheet, quad_sheet(ShapeFn::phi0, ShapeFn::phi0, kappa_fe, p));
    check_rel(table.phi0_sq_full, quad_phi0_sq_full(kappa_fe, kappa0, p));

    // phi2'^2 via quadrature of the derivative.
    auto rule = gauss_legendre(16);
    double a = -p.d_fe / 2, b = p.d_fe / 2, sum = 0;
    for (size_t q = 0; q < rule.points.size(); ++q) {
      double z = 0.5 * (a + b) + 0.5 * (b - a) * rule.points[q];
      double v = eval_shape_deriv(ShapeFn::phi2, z, p);
      sum += rule.weights[q] * v * v;
    }
    check_rel(table.phi2_prime_sq, kappa_fe * 0.5 * (b - a) * sum);
  }
}

TEST_CASE("coefficient table frozen spot values") {
  // d_fe = 475 um, d0 = 25 um, kappa_fe = 12, kappa0 = 3.
  ThicknessProfile p(0.475e-3, 0.025e-3);
  auto t = coefficient_table(12.0, 3.0, p);
  CHECK(t.phi1_hat_sq == doctest::Approx(std::pow(0.475e-3, 3) * 12.0 / 12.0).epsilon(1e-14));
  CHECK(t.phi2_sq == doctest::Approx(0.475e-3 * 12.0 / 5.0).epsilon(1e-14));
  CHECK(t.phi2_prime_sq == doctest::Approx(2.0 * 12.0 / 0.475e-3).epsilon(1e-14));
  CHECK(t.phi0_phi2 ==
        doctest::Approx(-std::sqrt(6.0) * 0.475e-3 * 12.0 / 6.0).epsilon(1e-14));
  CHECK(t.phi3_hat_sq ==
        doctest::Approx(17.0 * std::pow(0.475e-3, 3) * 12.0 / 840.0).epsilon(1e-14));
  CHECK(t.phi1_hat_phi3_hat ==
        doctest::Approx(-std::sqrt(6.0) * std::pow(0.475e-3, 3) * 12.0 / 60.0).epsilon(1e-14));
  CHECK(t.phi0_sq_full == doctest::Approx(12.0 * 0.475e-3 + 3.0 * 0.025e-3).epsilon(1e-14));
  CHECK(t.phi0_sq_sheet == doctest::Approx(12.0 * 0.475e-3).epsilon(1e-14));
}

TEST_CASE("profile validation") {
  CHECK_THROWS_AS(ThicknessProfile(-1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ThicknessProfile(0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(ThicknessProfile(1.0, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(ThicknessProfile::from_fill_factor(1e-3, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ThicknessProfile::from_fill_factor(1e-3, 1.5), std::invalid_argument);
  CHECK(ThicknessProfile::from_fill_factor(1e-3, 1.0).d0 == 0.0);
  auto p = ThicknessProfile::from_fill_factor(0.5e-3, 0.95);
  CHECK(p.d_fe == doctest::Approx(0.475e-3));
  CHECK(p.d0 == doctest::Approx(0.025e-3));
}
