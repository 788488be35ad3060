// Copyright (c) the mfd-mor project developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include "mfdmor/material/model.hpp"
#include "mfdmor/material/params.hpp"
#include "mfdmor/material/state.hpp"

namespace mfdmor::material {

/// Local integrator controls. Tolerances are absolute in MPa on the active
/// surface residuals.
struct LocalOptions {
  double tol = 1e-10;
  double noise_floor = 5e-10;  // accepted residual when rounding stalls the iteration
  int max_iterations = 50;
  int substep_factor = 10;
  int max_substep_depth = 3;
  double damage_cap_eps = 1e-6;  // D <= 1 - eps
};

struct LocalResult {
  GaussState state;
  PointOutput output;
  int iterations = 0;  // Newton iterations of the (last) local solve
  int substeps = 1;    // total number of substeps taken
};

/// Backward-Euler update of the internal variables over one increment with
/// exponential-map plastic flow and a two-surface active-set strategy.
/// Rates for the heat source are formed against the converged caches held in
/// state_old. Throws MaterialError when substepping is exhausted.
LocalResult integrate_local(const SymTensor3& C_new, double Dbar_new, double theta_new,
                            const GaussState& state_old, double dt, const MaterialParams& p,
                            const LocalOptions& opts = {});

struct HeatParts {
  double r_e = 0.0;
  double r_p = 0.0;
  double r_d = 0.0;
  double total() const { return r_e + r_p + r_d; }
};

/// Internal heat generation from the converged states of two successive
/// steps. Temperature partials of the stress-like quantities are evaluated by
/// central finite differences at frozen internal variables.
HeatParts heat_generation(const SymTensor3& C_new, const GaussState& state_new,
                          const GaussState& state_old, double Dbar_new, double theta_new,
                          const Eigen::Vector3d& grad_dbar_dot, double dt,
                          const MaterialParams& p);

/// Derivatives of the converged local map with respect to the point inputs.
/// Input order: six C components (xx, yy, zz, xy, yz, xz; symmetric pair
/// perturbations), then Dbar, then theta.
struct PointDerivs {
  Eigen::Matrix<double, 6, 8> dS = Eigen::Matrix<double, 6, 8>::Zero();
  Eigen::Matrix<double, 1, 8> dD = Eigen::Matrix<double, 1, 8>::Zero();
  Eigen::Matrix<double, 6, 8> dK = Eigen::Matrix<double, 6, 8>::Zero();
  Eigen::Matrix<double, 1, 8> dr = Eigen::Matrix<double, 1, 8>::Zero();
};

/// Algorithmic tangent by central finite differences of the converged local
/// map (1e-7 relative perturbations), with an analytic fast path for points
/// that stay strictly elastic over the increment.
PointDerivs consistent_tangent(const SymTensor3& C_new, double Dbar_new, double theta_new,
                               const GaussState& state_old, double dt, const MaterialParams& p,
                               const LocalOptions& opts = {});

/// Analytic Neo-Hookean tangent dS/dC at frozen internal variables, in the
/// symmetric-pair convention of PointDerivs columns.
Eigen::Matrix<double, 6, 6> elastic_tangent(const SymTensor3& C, const GaussState& state,
                                            double theta, const MaterialParams& p);

}  // namespace mfdmor::material
