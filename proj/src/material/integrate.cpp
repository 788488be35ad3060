// Copyright (c) the mfd-mor project developers.
// SPDX-License-Identifier: Apache-2.0

#include "mfdmor/material/integrate.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <cstdio>
#include <cstdlib>

namespace mfdmor::material {

namespace {

using Eigen::Matrix3d;
using Eigen::Vector3d;
using Vector6d = Eigen::Matrix<double, 6, 1>;

constexpr int kPairRow[6] = {0, 1, 2, 0, 1, 0};
constexpr int kPairCol[6] = {0, 1, 2, 1, 2, 2};

// Symmetric pair basis: E_b = e_i x e_j + e_j x e_i (i != j), e_i x e_i else.
Matrix3d pair_basis(int b) {
  Matrix3d e = Matrix3d::Zero();
  e(kPairRow[b], kPairCol[b]) += 1.0;
  e(kPairCol[b], kPairRow[b]) = e(kPairRow[b], kPairCol[b]);
  if (kPairRow[b] == kPairCol[b]) e(kPairRow[b], kPairCol[b]) = 1.0;
  return e;
}

Vector6d to_vec6(const Matrix3d& m) {
  Vector6d v;
  for (int b = 0; b < 6; ++b) v[b] = m(kPairRow[b], kPairCol[b]);
  return v;
}

Matrix3d from_vec6(const Vector6d& v) {
  Matrix3d m;
  for (int b = 0; b < 6; ++b) {
    m(kPairRow[b], kPairCol[b]) = v[b];
    m(kPairCol[b], kPairRow[b]) = v[b];
  }
  return m;
}

Matrix3d from_sym(const SymTensor3& t) { return t.matrix(); }

Matrix3d sym_expm(const Matrix3d& g) {
  Eigen::SelfAdjointEigenSolver<Matrix3d> es;
  es.computeDirect(g);
  return es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() *
         es.eigenvectors().transpose();
}

double ddot(const Matrix3d& a, const Matrix3d& b) { return a.cwiseProduct(b).sum(); }

struct LocalDivergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unknowns of the monolithic local system: the plastic flow exponent g
// (C_p = U_old exp(g) U_old) and the two multipliers.
struct Unknowns {
  bool plastic = false;
  bool damage = false;
  bool capped = false;
  Vector6d g = Vector6d::Zero();
  double dlp = 0.0;
  double dld = 0.0;

  int count() const { return (plastic ? 7 : 0) + ((damage && !capped) ? 1 : 0); }
};

struct InnerState {
  Matrix3d c_p;
  double xi_p = 0.0, D = 0.0, xi_d = 0.0;
  bool cap_hit = false;
  detail::Core core;
};

class LocalSolver {
public:
  LocalSolver(const Matrix3d& c, double dbar, double theta, const GaussState& old,
              const MaterialParams& p, const LocalOptions& opts)
      : c_(c), dbar_(dbar), theta_(theta), old_(old), p_(p), opts_(opts) {
    cp_old_ = from_sym(old.C_p);
    Eigen::SelfAdjointEigenSolver<Matrix3d> es;
    es.computeDirect(cp_old_);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw MaterialError("integrate_local: previous C_p not SPD");
    up_old_ = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
              es.eigenvectors().transpose();
    up_old_ = 0.5 * (up_old_ + up_old_.inverse() * cp_old_);
    up_old_ = 0.5 * (up_old_ + up_old_.transpose()).eval();
  }

  InnerState eval(const Unknowns& u) const {
    InnerState st;
    st.D = old_.D + u.dld;
    if (st.D > 1.0 - opts_.damage_cap_eps) {
      st.D = 1.0 - opts_.damage_cap_eps;
      st.cap_hit = true;
    }
    st.xi_d = old_.xi_d + u.dld;
    st.xi_p = old_.xi_p + u.dlp / degradation(st.D);
    if (u.plastic) {
      const Matrix3d c_p = up_old_ * sym_expm(from_vec6(u.g)) * up_old_;
      st.c_p = 0.5 * (c_p + c_p.transpose());
    } else {
      st.c_p = cp_old_;
    }
    st.core = detail::eval_core(c_, st.c_p, st.xi_p, st.D, st.xi_d, dbar_, theta_, p_);
    return st;
  }

  // Scaled residual (all entries stress-like): mu * flow residual, then the
  // active surface values.
  Eigen::VectorXd residual(const Unknowns& u, const InnerState& st) const {
    Eigen::VectorXd r(u.count());
    int k = 0;
    if (u.plastic) {
      const double coef = 2.0 * u.dlp * std::sqrt(1.5) / degradation(st.D);
      if (std::abs(coef) > 80.0) throw LocalDivergence("exponential map overflow");
      if (st.core.flow_norm < 1e-14)
        throw LocalDivergence("vanishing flow direction with active plasticity");
      const Vector6d flow_res = u.g - coef * to_vec6(st.core.flow_dir);
      r.segment<6>(0) = p_.mu * flow_res;
      r[6] = st.core.phi_p;
      k = 7;
    }
    if (u.damage && !u.capped) r[k] = st.core.phi_d;
    return r;
  }

  LocalResult solve(double dt, Unknowns* warm = nullptr) {
    InnerState st = eval(Unknowns{});
    Unknowns u;
    u.plastic = st.core.phi_p > 0.0;
    u.damage = st.core.phi_d > 0.0;
    if (warm && warm->plastic && u.plastic) {
      u.g = warm->g;
      u.dlp = std::max(0.0, warm->dlp);
    }
    if (warm && warm->damage && u.damage) u.dld = std::max(0.0, warm->dld);
    const double dld_cap = (1.0 - opts_.damage_cap_eps) - old_.D;
    int total_iters = 0;

    if (u.plastic || u.damage) {
      for (int cycle = 0; cycle < 8; ++cycle) {
        if (u.count() > 0) {
          if (!newton(u, st, dld_cap, total_iters))
            throw LocalDivergence("local Newton stalled");
        } else {
          st = eval(u);
        }
        // Active-set corrections from the KKT signs.
        if (u.plastic && u.dlp < -opts_.tol) {
          u.plastic = false;
          u.dlp = 0.0;
          u.g.setZero();
          continue;
        }
        if (u.damage && !u.capped && u.dld < -opts_.tol) {
          u.damage = false;
          u.dld = 0.0;
          continue;
        }
        if (!u.plastic && st.core.phi_p > opts_.noise_floor) {
          u.plastic = true;
          continue;
        }
        if (!u.damage && !u.capped && st.core.phi_d > opts_.noise_floor) {
          u.damage = true;
          continue;
        }
        break;
      }
      // Hard admissibility gate.
      const double gate = 2.0 * opts_.noise_floor;
      const bool ok_p = u.plastic ? (std::abs(st.core.phi_p) <= gate && u.dlp >= -opts_.tol)
                                  : (st.core.phi_p <= gate);
      const bool ok_d = u.capped || (u.damage ? (std::abs(st.core.phi_d) <= gate &&
                                                 u.dld >= -opts_.tol)
                                              : (st.core.phi_d <= gate));
      if (!ok_p || !ok_d) throw LocalDivergence("KKT conditions violated after active-set loop");
    }

    if (warm) *warm = u;

    LocalResult res;
    res.iterations = total_iters;
    res.state.C_p = SymTensor3::from_matrix(st.c_p);
    res.state.xi_p = st.xi_p;
    res.state.D = st.D;
    res.state.xi_d = st.xi_d;
    res.state.fully_damaged = st.cap_hit || u.capped;
    res.state.C_conv = SymTensor3::from_matrix(c_);
    res.state.S_conv = SymTensor3::from_matrix(st.core.s);
    res.state.Dbar_conv = dbar_;
    res.state.theta_conv = theta_;

    PointOutput& out = res.output;
    out.S = res.state.S_conv;
    out.a_i = p_.H * (dbar_ - st.D);
    out.Y = st.core.y;
    out.q_p = st.core.q_p;
    out.q_d = st.core.q_d;
    out.K_theta = conductivity(SymTensor3::from_matrix(c_), st.D, p_);
    // Incremental dissipation (M - chi):D_p dt - q_p dxi_p - q_d dxi_d + Y dD.
    const double plastic_part = u.dlp * (std::sqrt(1.5) * st.core.flow_norm - st.core.qp_eff);
    const double damage_part = (st.D - old_.D) * st.core.y - (st.xi_d - old_.xi_d) * st.core.q_d;
    out.dissipation = (dt > 0.0) ? (plastic_part + damage_part) / dt : 0.0;
    return res;
  }

private:
  bool newton(Unknowns& u, InnerState& st, double dld_cap, int& total_iters) {
    double best_norm = std::numeric_limits<double>::infinity();
    Unknowns best_u = u;
    InnerState best_st;
    int stagnant = 0;
    for (int it = 0; it < opts_.max_iterations; ++it) {
      ++total_iters;
      st = eval(u);
      const int n = u.count();
      if (n == 0) return true;
      Eigen::VectorXd r = residual(u, st);
      const double rnorm = r.cwiseAbs().maxCoeff();
      if (std::getenv("MFDMOR_LOCAL_DEBUG"))
        std::fprintf(stderr, "  it %2d rnorm %.3e dlp %.6e dld %.6e |g| %.3e p%d d%d c%d\n", it,
                     rnorm, u.dlp, u.dld, u.g.norm(), u.plastic, u.damage, u.capped);
      if (rnorm <= opts_.tol) return true;
      const bool improved = rnorm < 0.9 * best_norm;
      if (rnorm < best_norm) {
        best_norm = rnorm;
        best_u = u;
        best_st = st;
      }
      if (improved) {
        stagnant = 0;
      } else if (++stagnant >= 6) {
        break;  // bouncing at the evaluation noise floor
      }

      // Central finite-difference Jacobian over the active unknowns.
      Eigen::MatrixXd jac(n, n);
      int col = 0;
      auto fd_column = [&](auto&& apply, double h) {
        Unknowns up_u = u, um_u = u;
        apply(up_u, h);
        apply(um_u, -h);
        const Eigen::VectorXd rp = residual(up_u, eval(up_u));
        const Eigen::VectorXd rm = residual(um_u, eval(um_u));
        jac.col(col++) = (rp - rm) / (2.0 * h);
      };
      try {
        if (u.plastic) {
          const double h_g = std::max(1e-8, 1e-5 * u.g.norm());
          for (int b = 0; b < 6; ++b)
            fd_column([b](Unknowns& w, double h) { w.g[b] += h; }, h_g);
          fd_column([](Unknowns& w, double h) { w.dlp += h; },
                    std::max(1e-9, 1e-6 * std::abs(u.dlp)));
        }
        if (u.damage && !u.capped)
          fd_column([](Unknowns& w, double h) { w.dld += h; },
                    std::max(1e-9, 1e-6 * std::abs(u.dld)));
      } catch (const MaterialError&) {
        throw LocalDivergence("state left the admissible domain in the local Jacobian");
      }

      const Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
      if (lu.rank() < n) return false;
      const Eigen::VectorXd step = lu.solve(-r);

      // Damped update; a step that overshoots the damage cap switches the
      // point into the capped mode and drops the damage equation.
      double damp = 1.0;
      for (int cut = 0; cut < 12; ++cut) {
        Unknowns cand = u;
        int k = 0;
        if (u.plastic) {
          for (int b = 0; b < 6; ++b) cand.g[b] += damp * step[k + b];
          cand.dlp += damp * step[k + 6];
          k += 7;
        }
        if (u.damage && !u.capped) cand.dld += damp * step[k];
        if (cand.dld > dld_cap) {
          u = cand;
          u.dld = dld_cap;
          u.capped = true;
          st = eval(u);
          if (!u.plastic) return true;
          break;
        }
        InnerState cst;
        bool ok = true;
        Eigen::VectorXd rc;
        try {
          cst = eval(cand);
          rc = residual(cand, cst);
        } catch (const MaterialError&) {
          ok = false;
        } catch (const LocalDivergence&) {
          ok = false;
        }
        if (ok && (rc.cwiseAbs().maxCoeff() < rnorm || damp < 0.05)) {
          u = cand;
          st = cst;
          break;
        }
        damp *= 0.5;
        if (cut == 11) {
          // No productive step left; fall back to the best visited iterate.
          if (best_norm <= opts_.noise_floor) {
            u = best_u;
            st = best_st;
            return true;
          }
          return false;
        }
      }
    }
    if (u.count() == 0) {
      st = eval(u);
      return true;
    }
    if (best_norm <= opts_.noise_floor) {
      u = best_u;
      st = best_st;
      return true;
    }
    return false;
  }

  Matrix3d c_;
  double dbar_, theta_;
  const GaussState& old_;
  const MaterialParams& p_;
  const LocalOptions& opts_;
  Matrix3d cp_old_, up_old_;
};

struct Increment {
  Matrix3d c;
  double dbar;
  double theta;
};

Increment lerp(const Increment& a, const Increment& b, double s) {
  return {a.c + s * (b.c - a.c), a.dbar + s * (b.dbar - a.dbar),
          a.theta + s * (b.theta - a.theta)};
}

// Recursive substepping driver around LocalSolver::solve.
LocalResult advance(const Increment& from, const Increment& to, const GaussState& state,
                    double dt, const MaterialParams& p, const LocalOptions& opts, int depth,
                    double* accum_dissipation, int* substeps) {
  try {
    LocalSolver solver(to.c, to.dbar, to.theta, state, p, opts);
    LocalResult res = solver.solve(dt);
    *accum_dissipation += res.output.dissipation * dt;
    ++(*substeps);
    return res;
  } catch (const LocalDivergence& e) {
    if (depth >= opts.max_substep_depth)
      throw MaterialError(std::string("integrate_local: no convergence after substepping (") +
                          e.what() + ")");
    GaussState st = state;
    LocalResult res;
    const double sub_dt = dt / opts.substep_factor;
    for (int i = 1; i <= opts.substep_factor; ++i) {
      const Increment lo = lerp(from, to, double(i - 1) / opts.substep_factor);
      const Increment hi = lerp(from, to, double(i) / opts.substep_factor);
      res = advance(lo, hi, st, sub_dt, p, opts, depth + 1, accum_dissipation, substeps);
      st = res.state;
    }
    return res;
  }
}

}  // namespace

LocalResult integrate_local(const SymTensor3& C_new, double Dbar_new, double theta_new,
                            const GaussState& state_old, double dt, const MaterialParams& p,
                            const LocalOptions& opts) {
  const Increment from{from_sym(state_old.C_conv), state_old.Dbar_conv, state_old.theta_conv};
  const Increment to{from_sym(C_new), Dbar_new, theta_new};

  double dissipation = 0.0;
  int substeps = 0;
  LocalResult res = advance(from, to, state_old, dt, p, opts, 0, &dissipation, &substeps);
  res.substeps = std::max(1, substeps);
  res.state.Dbar_conv = Dbar_new;
  res.state.theta_conv = theta_new;
  res.state.C_conv = C_new;

  // Monotonicity is enforced by the KKT signs; guard against rounding drift.
  res.state.xi_p = std::max(res.state.xi_p, state_old.xi_p);
  res.state.D = std::max(res.state.D, state_old.D);
  res.state.xi_d = std::max(res.state.xi_d, state_old.xi_d);

  res.output.dissipation = (dt > 0.0) ? dissipation / dt : 0.0;
  const HeatParts heat =
      heat_generation(C_new, res.state, state_old, Dbar_new, theta_new, Vector3d::Zero(), dt, p);
  res.output.r_int = heat.total();
  res.output.b_i.setZero();  // element supplies A * grad(Dbar)
  return res;
}

HeatParts heat_generation(const SymTensor3& C_new, const GaussState& state_new,
                          const GaussState& state_old, double Dbar_new, double theta_new,
                          const Eigen::Vector3d& grad_dbar_dot, double dt,
                          const MaterialParams& p) {
  HeatParts out;
  if (dt <= 0.0) return out;

  const Matrix3d c = from_sym(C_new);
  const Matrix3d c_old = from_sym(state_old.C_conv);
  const Matrix3d cp = from_sym(state_new.C_p);
  const Matrix3d cp_old = from_sym(state_old.C_p);
  const double theta = theta_new;

  const Matrix3d c_dot = (c - c_old) / dt;
  const Matrix3d cp_dot = (cp - cp_old) / dt;
  const double xi_p_dot = (state_new.xi_p - state_old.xi_p) / dt;
  const double d_dot = (state_new.D - state_old.D) / dt;
  const double xi_d_dot = (state_new.xi_d - state_old.xi_d) / dt;
  const double dbar_dot = (Dbar_new - state_old.Dbar_conv) / dt;

  auto core_at = [&](double th) {
    return detail::eval_core(c, cp, state_new.xi_p, state_new.D, state_new.xi_d, Dbar_new, th,
                             p);
  };
  const detail::Core base = core_at(theta);

  // Temperature partials at frozen internal variables (central differences).
  const double h_th = std::max(1e-5 * theta, 1e-4);
  const detail::Core cp_th = core_at(theta + h_th);
  const detail::Core cm_th = core_at(theta - h_th);
  const Matrix3d s_th = (cp_th.s - cm_th.s) / (2.0 * h_th);
  const Matrix3d x_th = (cp_th.x - cm_th.x) / (2.0 * h_th);
  const double qp_th = (cp_th.q_p - cm_th.q_p) / (2.0 * h_th);
  const double qd_th = (cp_th.q_d - cm_th.q_d) / (2.0 * h_th);
  const double y_th = (cp_th.y - cm_th.y) / (2.0 * h_th);
  const double ai_th = 0.0;                 // a_i = H (Dbar - D), no theta dependence
  const Vector3d bi_th = Vector3d::Zero();  // b_i = A grad(Dbar) likewise

  // Directional derivative (dS/dC) : C by scaling the metric.
  const double h_c = 1e-6;
  const detail::Core cp_c = detail::eval_core((1.0 + h_c) * c, cp, state_new.xi_p, state_new.D,
                                              state_new.xi_d, Dbar_new, theta, p);
  const detail::Core cm_c = detail::eval_core((1.0 - h_c) * c, cp, state_new.xi_p, state_new.D,
                                              state_new.xi_d, Dbar_new, theta, p);
  const Matrix3d s_cc = (cp_c.s - cm_c.s) / (2.0 * h_c);

  out.r_e = theta * ddot(0.5 * s_th - p.alpha * s_cc - p.alpha * base.s, c_dot);

  const Matrix3d cp_inv = cp.inverse();
  out.r_p = 0.5 * ddot(c * (base.s - theta * s_th), cp_inv * cp_dot) -
            0.5 * ddot(base.x - theta * x_th, cp_dot) - (base.q_p - theta * qp_th) * xi_p_dot;

  const double s_dbar_contraction = 0.0;  // S does not depend on Dbar at frozen internals
  out.r_d = (base.y - theta * y_th) * d_dot - (base.q_d - theta * qd_th) * xi_d_dot -
            theta * (ai_th - p.alpha * s_dbar_contraction) * dbar_dot +
            theta * bi_th.dot(grad_dbar_dot);
  return out;
}

Eigen::Matrix<double, 6, 6> elastic_tangent(const SymTensor3& C, const GaussState& state,
                                            double theta, const MaterialParams& p) {
  const Matrix3d c = from_sym(C);
  const detail::Core core = detail::eval_core(c, from_sym(state.C_p), state.xi_p, state.D,
                                              state.xi_d, 0.0, theta, p);
  const Matrix3d ce_inv = core.ce.inverse();
  const double inv_vt2 = 1.0 / (core.vartheta * core.vartheta);

  Eigen::Matrix<double, 6, 6> t;
  for (int b = 0; b < 6; ++b) {
    const Matrix3d h = inv_vt2 * (core.up_inv * pair_basis(b) * core.up_inv);
    const Matrix3d ihi = ce_inv * h * ce_inv;
    const Matrix3d dg = 0.5 * p.mu * ihi +
                        0.25 * p.lambda * (core.det_ce * (ce_inv.cwiseProduct(h)).sum() * ce_inv -
                                           (core.det_ce - 1.0) * ihi);
    const Matrix3d ds = 2.0 * core.f_d * inv_vt2 * (core.up_inv * dg * core.up_inv);
    t.col(b) = to_vec6(ds);
  }
  return t;
}

namespace {

struct MapOut {
  Vector6d s;
  double D;
  Vector6d k;
  double r;
};

MapOut from_local_result(const LocalResult& res, double r_int) {
  MapOut out;
  out.s = to_vec6(res.output.S.matrix());
  out.D = res.state.D;
  out.k = to_vec6(res.output.K_theta.matrix());
  out.r = r_int;
  return out;
}

MapOut map_eval(const Matrix3d& c, double dbar, double theta, const GaussState& state_old,
                double dt, const MaterialParams& p, const LocalOptions& opts, Unknowns* warm) {
  // One-shot warm-started solve; falls back to the substepped driver so the
  // differentiated map coincides with the residual map.
  try {
    LocalSolver solver(c, dbar, theta, state_old, p, opts);
    Unknowns u = warm ? *warm : Unknowns{};
    LocalResult res = solver.solve(dt, &u);
    res.state.Dbar_conv = dbar;
    res.state.theta_conv = theta;
    res.state.C_conv = SymTensor3::from_matrix(c);
    const HeatParts heat = heat_generation(SymTensor3::from_matrix(c), res.state, state_old,
                                           dbar, theta, Vector3d::Zero(), dt, p);
    return from_local_result(res, heat.total());
  } catch (const LocalDivergence&) {
    const LocalResult res =
        integrate_local(SymTensor3::from_matrix(c), dbar, theta, state_old, dt, p, opts);
    return from_local_result(res, res.output.r_int);
  }
}

}  // namespace

PointDerivs consistent_tangent(const SymTensor3& C_new, double Dbar_new, double theta_new,
                               const GaussState& state_old, double dt, const MaterialParams& p,
                               const LocalOptions& opts) {
  PointDerivs derivs;
  const Matrix3d c = from_sym(C_new);

  // Elastic fast path: both trial surfaces clearly inactive.
  const auto [phi_p, phi_d] = trial_surfaces(C_new, state_old, Dbar_new, theta_new, p);
  const double margin = 0.05 * std::max(1.0, p.sigma_y0);
  if (phi_p < -margin && phi_d < -margin) {
    derivs.dS.leftCols<6>() = elastic_tangent(C_new, state_old, theta_new, p);

    const double kappa =
        degradation(state_old.D) * p.K0 + (1.0 - degradation(state_old.D)) * p.Kc;
    const Matrix3d c_inv = c.inverse();
    for (int b = 0; b < 6; ++b)
      derivs.dK.col(b) = to_vec6(-kappa * (c_inv * pair_basis(b) * c_inv));

    // r_int and dS/dtheta by finite differences of the frozen elastic map.
    auto elastic_out = [&](const Matrix3d& cc, double th) {
      const detail::Core core = detail::eval_core(cc, from_sym(state_old.C_p), state_old.xi_p,
                                                  state_old.D, state_old.xi_d, Dbar_new, th, p);
      const HeatParts h = heat_generation(SymTensor3::from_matrix(cc), state_old, state_old,
                                          Dbar_new, th, Vector3d::Zero(), dt, p);
      return std::pair<Matrix3d, double>(core.s, h.total());
    };
    const double h_th = 1e-7 * std::max(1.0, std::abs(theta_new));
    const auto [s_p, r_p] = elastic_out(c, theta_new + h_th);
    const auto [s_m, r_m] = elastic_out(c, theta_new - h_th);
    derivs.dS.col(7) = to_vec6((s_p - s_m) / (2.0 * h_th));
    derivs.dr(0, 7) = (r_p - r_m) / (2.0 * h_th);
    const double scale_c = std::max(1.0, c.norm());
    for (int b = 0; b < 6; ++b) {
      const double h = 1e-7 * scale_c;
      const auto [sp, rp] = elastic_out(c + h * pair_basis(b), theta_new);
      const auto [sm, rm] = elastic_out(c - h * pair_basis(b), theta_new);
      derivs.dr(0, b) = (rp - rm) / (2.0 * h);
    }
    return derivs;  // dD and the Dbar column stay zero in the elastic regime
  }

  // General path: central differences of the full algorithmic map. Probe
  // solves tolerate a larger surface-residual floor; the induced multiplier
  // error is far below the finite-difference resolution.
  LocalOptions probe_opts = opts;
  probe_opts.noise_floor = std::max(opts.noise_floor, 5e-9);
  Unknowns base;
  map_eval(c, Dbar_new, theta_new, state_old, dt, p, probe_opts, &base);

  auto probe = [&](const Matrix3d& cc, double db, double th) {
    Unknowns warm = base;
    return map_eval(cc, db, th, state_old, dt, p, probe_opts, &warm);
  };

  const double scale_c = std::max(1.0, c.norm());
  for (int b = 0; b < 6; ++b) {
    const double h = 1e-7 * scale_c;
    const MapOut plus = probe(c + h * pair_basis(b), Dbar_new, theta_new);
    const MapOut minus = probe(c - h * pair_basis(b), Dbar_new, theta_new);
    derivs.dS.col(b) = (plus.s - minus.s) / (2.0 * h);
    derivs.dD(0, b) = (plus.D - minus.D) / (2.0 * h);
    derivs.dK.col(b) = (plus.k - minus.k) / (2.0 * h);
    derivs.dr(0, b) = (plus.r - minus.r) / (2.0 * h);
  }
  {
    const double h = 1e-7 * std::max(1.0, std::abs(Dbar_new));
    const MapOut plus = probe(c, Dbar_new + h, theta_new);
    const MapOut minus = probe(c, Dbar_new - h, theta_new);
    derivs.dS.col(6) = (plus.s - minus.s) / (2.0 * h);
    derivs.dD(0, 6) = (plus.D - minus.D) / (2.0 * h);
    derivs.dK.col(6) = (plus.k - minus.k) / (2.0 * h);
    derivs.dr(0, 6) = (plus.r - minus.r) / (2.0 * h);
  }
  {
    const double h = 1e-7 * std::max(1.0, std::abs(theta_new));
    const MapOut plus = probe(c, Dbar_new, theta_new + h);
    const MapOut minus = probe(c, Dbar_new, theta_new - h);
    derivs.dS.col(7) = (plus.s - minus.s) / (2.0 * h);
    derivs.dD(0, 7) = (plus.D - minus.D) / (2.0 * h);
    derivs.dK.col(7) = (plus.k - minus.k) / (2.0 * h);
    derivs.dr(0, 7) = (plus.r - minus.r) / (2.0 * h);
  }
  return derivs;
}

}  // namespace mfdmor::material
