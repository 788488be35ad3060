// Copyright (c) the mfd-mor project developers.
// SPDX-License-Identifier: Apache-2.0

#include "mfdmor/material/model.hpp"

#include <cmath>

namespace mfdmor::material {

namespace detail {

double saturating_energy(double e, double f, double xi) {
  if (e == 0.0) return 0.0;
  if (f == 0.0) return 0.0;  // limit of xi + (exp(-f xi) - 1)/f as f -> 0
  return e * (xi + (std::exp(-f * xi) - 1.0) / f);
}

double saturating_force(double e, double f, double xi) {
  if (e == 0.0 || f == 0.0) return 0.0;
  return e * (1.0 - std::exp(-f * xi));
}

Core eval_core(const Eigen::Matrix3d& c, const Eigen::Matrix3d& c_p, double xi_p, double D,
               double xi_d, double Dbar, double theta, const MaterialParams& p) {
  Core out;
  out.f_d = degradation(D);
  out.f_theta = thermal_softening(theta, p);
  out.vartheta = thermal_stretch(theta, p);

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
  es.computeDirect(c_p);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw MaterialError("eval_core: plastic right Cauchy-Green tensor not SPD");
  // One Newton refinement of the square root; the closed-form eigensolver
  // loses accuracy for nearly degenerate eigenvalues.
  Eigen::Matrix3d up = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
                       es.eigenvectors().transpose();
  up = 0.5 * (up + up.inverse() * c_p);
  up = 0.5 * (up + up.transpose()).eval();
  out.up_inv = up.inverse();

  const double inv_vt2 = 1.0 / (out.vartheta * out.vartheta);
  out.ce = inv_vt2 * (out.up_inv * c * out.up_inv);
  out.ce = 0.5 * (out.ce + out.ce.transpose()).eval();
  out.det_ce = out.ce.determinant();
  if (out.det_ce <= 0.0)
    throw MaterialError("eval_core: elastic right Cauchy-Green tensor not SPD");

  const Eigen::Matrix3d id = Eigen::Matrix3d::Identity();
  const Eigen::Matrix3d ce_inv = out.ce.inverse();
  const double log_det = std::log(out.det_ce);

  out.psi_e = 0.5 * p.mu * (out.ce.trace() - 3.0 - log_det) +
              0.25 * p.lambda * (out.det_ce - 1.0 - log_det);

  const double det_cp = c_p.determinant();
  out.psi_p = out.f_theta * (0.5 * p.a * (c_p.trace() - 3.0 - std::log(det_cp)) +
                             saturating_energy(p.e_p, p.f_p, xi_p) + 0.5 * p.P * xi_p * xi_p);

  // dpsi_e/dC_e and the stress measures derived from it.
  const Eigen::Matrix3d dpsi_e =
      0.5 * p.mu * (id - ce_inv) + 0.25 * p.lambda * (out.det_ce - 1.0) * ce_inv;
  out.s = 2.0 * out.f_d * inv_vt2 * (out.up_inv * dpsi_e * out.up_inv);
  out.m = out.f_d * (p.mu * (out.ce - id) + 0.5 * p.lambda * (out.det_ce - 1.0) * id);

  // X = 2 f_d dpsi_p/dC_p; with F_p symmetric chi = U_p X U_p.
  const Eigen::Matrix3d cp_inv =
      es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  out.x = out.f_d * out.f_theta * p.a * (id - cp_inv);
  out.chi = out.f_d * out.f_theta * p.a * (c_p - id);

  out.qp_eff = out.f_theta * (saturating_force(p.e_p, p.f_p, xi_p) + p.P * xi_p);
  out.q_p = out.f_d * out.qp_eff;
  out.q_d = saturating_force(p.e_d, p.f_d_hard, xi_d);
  out.y = 2.0 * (1.0 - D) * (out.psi_e + out.psi_p) - p.H * (D - Dbar);

  // Effective deviators: dev(M)/f_d = mu dev(C_e), dev(chi)/f_d = f_theta a dev(C_p).
  const Eigen::Matrix3d xi_dev =
      p.mu * (out.ce - out.ce.trace() / 3.0 * id) -
      out.f_theta * p.a * (c_p - c_p.trace() / 3.0 * id);
  out.flow_norm = xi_dev.norm();
  out.flow_dir = (out.flow_norm > 0.0) ? Eigen::Matrix3d(xi_dev / out.flow_norm)
                                       : Eigen::Matrix3d::Zero();

  out.phi_p = std::sqrt(1.5) * out.flow_norm - (p.sigma_y0 * out.f_theta + out.qp_eff);
  out.phi_d = out.y - (p.Y0 + out.q_d);
  return out;
}

}  // namespace detail

double thermal_stretch(double theta, const MaterialParams& p) {
  if (theta <= 0.0) throw MaterialError("thermal_stretch: non-positive temperature");
  return std::exp(p.alpha * (theta - p.theta0));
}

double thermal_softening(double theta, const MaterialParams& p) {
  if (theta <= 0.0) throw MaterialError("thermal_softening: non-positive temperature");
  const double f = 1.0 - p.omega * (theta - p.theta0);
  if (f <= 0.0)
    throw MaterialError("thermal_softening: fully softened state at theta = " +
                        std::to_string(theta));
  return f;
}

FreeEnergyParts free_energy_parts(const SymTensor3& C_e, const SymTensor3& C_p, double xi_p,
                                  double xi_d, double D, double Dbar,
                                  const Eigen::Vector3d& grad_dbar, double theta,
                                  const MaterialParams& p) {
  if (!math::is_spd(C_e) || !math::is_spd(C_p))
    throw MaterialError("free_energy_parts: C_e and C_p must be SPD");
  const double f_theta = thermal_softening(theta, p);

  FreeEnergyParts out;
  const double det_ce = C_e.det();
  const double log_det = std::log(det_ce);
  out.psi_e = 0.5 * p.mu * (C_e.trace() - 3.0 - log_det) +
              0.25 * p.lambda * (det_ce - 1.0 - log_det);
  out.psi_p = f_theta * (0.5 * p.a * (C_p.trace() - 3.0 - std::log(C_p.det())) +
                         detail::saturating_energy(p.e_p, p.f_p, xi_p) + 0.5 * p.P * xi_p * xi_p);
  out.psi_d = detail::saturating_energy(p.e_d, p.f_d_hard, xi_d);
  out.psi_dbar = 0.5 * p.H * (D - Dbar) * (D - Dbar) + 0.5 * p.A * grad_dbar.squaredNorm();
  return out;
}

SymTensor3 conductivity(const SymTensor3& C, double D, const MaterialParams& p) {
  const double f_d = degradation(D);
  const double k = f_d * p.K0 + (1.0 - f_d) * p.Kc;
  return k * math::sym_inverse(C);
}

PointOutput stresses_and_forces(const SymTensor3& C, const GaussState& state, double Dbar,
                                const Eigen::Vector3d& grad_dbar, double theta,
                                const MaterialParams& p) {
  const detail::Core core = detail::eval_core(C.matrix(), state.C_p.matrix(), state.xi_p,
                                              state.D, state.xi_d, Dbar, theta, p);
  if (state.D >= 1.0 && core.flow_norm > 1e-10)
    throw MaterialError("stresses_and_forces: degenerate stress state at D = 1");

  PointOutput out;
  out.S = SymTensor3::from_matrix(core.s);
  out.a_i = p.H * (Dbar - state.D);
  out.b_i = p.A * grad_dbar;
  out.Y = core.y;
  out.q_p = core.q_p;
  out.q_d = core.q_d;
  out.K_theta = conductivity(C, state.D, p);
  return out;
}

std::pair<double, double> trial_surfaces(const SymTensor3& C, const GaussState& state,
                                         double Dbar, double theta, const MaterialParams& p) {
  if (degradation(state.D) == 0.0)
    throw MaterialError("trial_surfaces: effective quantities undefined at f_d(D) = 0");
  const detail::Core core = detail::eval_core(C.matrix(), state.C_p.matrix(), state.xi_p,
                                              state.D, state.xi_d, Dbar, theta, p);
  return {core.phi_p, core.phi_d};
}

}  // namespace mfdmor::material
