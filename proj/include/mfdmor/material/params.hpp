// Copyright (c) the mfd-mor project developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace mfdmor::material {

/// Constitutive parameters. Units: MPa, mm, K, s (so mJ/mm^3 == MPa).
struct MaterialParams {
  // elastic
  double lambda = 0.0;  // first Lame constant [MPa]
  double mu = 0.0;      // shear modulus [MPa]
  // plastic
  double sigma_y0 = 0.0;  // initial yield stress [MPa]
  double a = 0.0;         // kinematic hardening [MPa]
  double P = 0.0;         // linear isotropic hardening [MPa]
  double e_p = 0.0;       // 1st nonlinear isotropic hardening [MPa]
  double f_p = 0.0;       // 2nd nonlinear isotropic hardening [-]
  // damage
  double Y0 = 0.0;        // damage threshold [MPa]
  double e_d = 0.0;       // 1st damage hardening [MPa]
  double f_d_hard = 0.0;  // 2nd damage hardening [-]
  double A = 0.0;         // internal length scale [MPa mm^2]
  double H = 0.0;         // micromorphic penalty [MPa]
  // thermal
  double c = 0.0;       // volumetric heat capacity [mJ/(mm^3 K)]
  double alpha = 0.0;   // thermal expansion [1/K]
  double K0 = 0.0;      // conductivity, undamaged [mW/(mm K)]
  double Kc = 0.0;      // conductivity, broken [mW/(mm K)]
  double theta0 = 0.0;  // reference temperature [K]
  double omega = 0.0;   // thermal softening [1/K]

  void validate() const {
    auto require = [](bool ok, const char* what) {
      if (!ok) throw std::invalid_argument(std::string("MaterialParams: ") + what);
    };
    require(lambda > 0 && mu > 0, "Lame constants must be positive");
    require(sigma_y0 > 0 && Y0 > 0, "yield stress and damage threshold must be positive");
    require(a >= 0 && P >= 0 && e_p >= 0 && f_p >= 0, "plastic hardening moduli must be >= 0");
    require(e_d >= 0 && f_d_hard >= 0, "damage hardening moduli must be >= 0");
    require(A > 0 && H > 0, "micromorphic parameters must be positive");
    require(c > 0 && K0 > 0 && Kc >= 0, "heat capacity/conductivity out of range");
    require(theta0 > 0, "reference temperature must be positive");
    require(omega >= 0 && alpha >= 0, "thermal coefficients must be >= 0");
  }

  /// Asymmetrically notched specimen parameter set.
  static MaterialParams test1() {
    MaterialParams p;
    p.lambda = 25000.0;
    p.mu = 55000.0;
    p.sigma_y0 = 100.0;
    p.a = 62.5;
    p.P = 0.0;
    p.e_p = 125.0;
    p.f_p = 5.0;
    p.Y0 = 2.5;
    p.e_d = 5.0;
    p.f_d_hard = 100.0;
    p.A = 75.0;
    p.H = 1e6;
    p.c = 3.59;
    p.alpha = 1.1e-5;
    p.K0 = 50.2;
    p.Kc = 0.502;  // broken-state conductivity, default 0.01 * K0
    p.theta0 = 273.15;
    p.omega = 0.002;
    return p;
  }

  /// Flat I-shaped specimen parameter set.
  static MaterialParams test2() {
    MaterialParams p;
    p.lambda = 101160.0;
    p.mu = 73255.0;
    p.sigma_y0 = 340.0;
    p.a = 0.0;
    p.P = 520.0;
    p.e_p = 296.0;
    p.f_p = 18.9;
    p.Y0 = 750.0;
    p.e_d = 100.0;
    p.f_d_hard = 100.0;
    p.A = 50.0;
    p.H = 1e4;
    p.c = 3.59;
    p.alpha = 1.1e-5;
    p.K0 = 50.2;
    p.Kc = 0.502;
    p.theta0 = 273.15;
    p.omega = 0.002;
    return p;
  }

  static MaterialParams named(const std::string& name) {
    if (name == "test1") return test1();
    if (name == "test2") return test2();
    throw std::invalid_argument("unknown material set '" + name + "' (built-in: test1, test2)");
  }
};

}  // namespace mfdmor::material
