// Copyright (c) the mfd-mor project developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include "mfdmor/math/sym_tensor.hpp"

namespace mfdmor::material {

using math::SymTensor3;

/// Internal variables at one Gauss point plus converged-step caches.
struct GaussState {
  SymTensor3 C_p = SymTensor3::identity();  // plastic right Cauchy-Green
  double xi_p = 0.0;                        // accumulated plastic strain
  double D = 0.0;                           // local damage
  double xi_d = 0.0;                        // damage hardening variable

  SymTensor3 C_conv = SymTensor3::identity();  // total C at last converged step
  SymTensor3 S_conv;                           // stress cache at last converged step
  double Dbar_conv = 0.0;                      // micromorphic damage at last converged step
  double theta_conv = 273.15;                  // temperature at last converged step
  bool fully_damaged = false;
};

/// Converged point-level quantities produced by the local update.
struct PointOutput {
  SymTensor3 S;                                   // second Piola-Kirchhoff stress [MPa]
  double a_i = 0.0;                               // micromorphic force H*(Dbar - D) [MPa]
  Eigen::Vector3d b_i = Eigen::Vector3d::Zero();  // micromorphic flux A*grad(Dbar)
  double Y = 0.0;                                 // damage driving force [MPa]
  double q_p = 0.0;                               // isotropic hardening force [MPa]
  double q_d = 0.0;                               // damage hardening force [MPa]
  double r_int = 0.0;                             // internal heat generation [mW/mm^3]
  SymTensor3 K_theta;                             // conductivity tensor [mW/(mm K)]
  double dissipation = 0.0;                       // mechanical dissipation rate [MPa/s]
};

}  // namespace mfdmor::material
