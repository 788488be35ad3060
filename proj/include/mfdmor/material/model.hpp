// Copyright (c) the mfd-mor project developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <utility>

#include "mfdmor/material/params.hpp"
#include "mfdmor/material/state.hpp"

namespace mfdmor::material {

class MaterialError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Thermal stretch exp(alpha * (theta - theta0)).
double thermal_stretch(double theta, const MaterialParams& p);

/// Quadratic degradation (1 - D)^2.
inline double degradation(double D) { return (1.0 - D) * (1.0 - D); }

/// Thermal softening 1 - omega * (theta - theta0). Throws when <= 0.
double thermal_softening(double theta, const MaterialParams& p);

struct FreeEnergyParts {
  double psi_e = 0.0;     // elastic (undegraded)
  double psi_p = 0.0;     // plastic (undegraded)
  double psi_d = 0.0;     // damage hardening
  double psi_dbar = 0.0;  // micromorphic coupling + gradient
};

FreeEnergyParts free_energy_parts(const SymTensor3& C_e, const SymTensor3& C_p, double xi_p,
                                  double xi_d, double D, double Dbar,
                                  const Eigen::Vector3d& grad_dbar, double theta,
                                  const MaterialParams& p);

/// Conductivity (f_d(D) K0 + (1 - f_d(D)) Kc) C^{-1}.
SymTensor3 conductivity(const SymTensor3& C, double D, const MaterialParams& p);

/// Stress-like quantities at frozen internal variables (no evolution).
PointOutput stresses_and_forces(const SymTensor3& C, const GaussState& state, double Dbar,
                                const Eigen::Vector3d& grad_dbar, double theta,
                                const MaterialParams& p);

/// Yield and damage loading functions (Phi_p, Phi_d) at frozen internal variables.
std::pair<double, double> trial_surfaces(const SymTensor3& C, const GaussState& state,
                                         double Dbar, double theta, const MaterialParams& p);

namespace detail {

/// All point-level state functions evaluated at frozen internal variables.
/// This is the closed-form core shared by the trial check, the return mapping
/// and the heat-generation finite-difference stencils.
struct Core {
  Eigen::Matrix3d up_inv;       // inverse plastic stretch U_p^{-1}
  Eigen::Matrix3d ce;           // elastic right Cauchy-Green
  double det_ce = 0.0;
  Eigen::Matrix3d s;            // second Piola-Kirchhoff stress
  Eigen::Matrix3d m;            // Mandel stress (intermediate configuration)
  Eigen::Matrix3d chi;          // back stress
  Eigen::Matrix3d x;            // 2 f_d dpsi_p/dC_p
  Eigen::Matrix3d flow_dir;     // unit deviatoric direction of (M - chi)/f_d
  double flow_norm = 0.0;       // || dev(M_eff - chi_eff) ||
  double psi_e = 0.0;
  double psi_p = 0.0;
  double qp_eff = 0.0;          // q_p / f_d
  double q_p = 0.0;
  double q_d = 0.0;
  double y = 0.0;               // damage driving force
  double f_d = 0.0;
  double f_theta = 0.0;
  double vartheta = 0.0;
  double phi_p = 0.0;
  double phi_d = 0.0;
};

Core eval_core(const Eigen::Matrix3d& c, const Eigen::Matrix3d& c_p, double xi_p, double D,
               double xi_d, double Dbar, double theta, const MaterialParams& p);

/// e_p * (xi + (exp(-f xi) - 1)/f) with the f -> 0 limit handled.
double saturating_energy(double e, double f, double xi);
/// d/dxi of saturating_energy: e * (1 - exp(-f xi)).
double saturating_force(double e, double f, double xi);

}  // namespace detail

}  // namespace mfdmor::material
