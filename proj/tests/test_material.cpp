#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "mfdmor/material/integrate.hpp"
#include "mfdmor/material/model.hpp"
#include "mfdmor/material/params.hpp"

using namespace mfdmor::material;
using mfdmor::math::SymTensor3;
using Eigen::Matrix3d;
using Eigen::Vector3d;

namespace {

std::mt19937 rng(987123);

Matrix3d random_sym(double scale) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Matrix3d a;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) a(i, j) = a(j, i) = dist(rng);
  return a;
}

SymTensor3 sym_from(const Matrix3d& m) { return SymTensor3::from_matrix(m); }

Matrix3d expm(const Matrix3d& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix3d> es;
  es.computeDirect(sym);
  return es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() *
         es.eigenvectors().transpose();
}

// Drives integrate_local along a linear-in-s input path split into n steps.
struct PathResult {
  GaussState state;
  PointOutput out;
};

PathResult drive_path(const Matrix3d& c_target, double dbar_target, double theta_target,
                      int steps, const MaterialParams& p, double total_time = 1.0) {
  const double theta_start = p.theta0;
  GaussState st;
  st.theta_conv = theta_start;
  const Matrix3d c0 = Matrix3d::Identity();
  PathResult res;
  res.state = st;
  const double dt = total_time / steps;
  for (int i = 1; i <= steps; ++i) {
    const double s = double(i) / steps;
    const Matrix3d c = c0 + s * (c_target - c0);
    const double dbar = s * dbar_target;
    const double theta = theta_start + s * (theta_target - theta_start);
    LocalResult lr = integrate_local(sym_from(c), dbar, theta, res.state, dt, p);
    res.state = lr.state;
    res.out = lr.output;
  }
  return res;
}

}  // namespace

TEST_CASE("thermal stretch") {
  const MaterialParams p = MaterialParams::test1();
  CHECK(thermal_stretch(p.theta0, p) == doctest::Approx(1.0));
  CHECK(thermal_stretch(p.theta0 + 100.0, p) ==
        doctest::Approx(1.00110060522189435).epsilon(1e-12));
  MaterialParams p0 = p;
  p0.alpha = 0.0;
  CHECK(thermal_stretch(500.0, p0) == doctest::Approx(1.0));
}

TEST_CASE("degradation function") {
  CHECK(degradation(0.0) == doctest::Approx(1.0));
  CHECK(degradation(1.0) == doctest::Approx(0.0));
  CHECK(degradation(0.5) == doctest::Approx(0.25));
}

TEST_CASE("thermal softening") {
  const MaterialParams p = MaterialParams::test1();
  CHECK(thermal_softening(p.theta0, p) == doctest::Approx(1.0));
  CHECK(thermal_softening(p.theta0 + 50.0, p) == doctest::Approx(0.9));
  MaterialParams pw = p;
  pw.omega = 0.0;
  CHECK(thermal_softening(p.theta0 + 400.0, pw) == doctest::Approx(1.0));
  CHECK_THROWS_AS(thermal_softening(p.theta0 + 600.0, p), MaterialError);
}

TEST_CASE("free energy parts") {
  const MaterialParams p = MaterialParams::test1();
  const SymTensor3 id = SymTensor3::identity();

  const FreeEnergyParts zero =
      free_energy_parts(id, id, 0.0, 0.0, 0.0, 0.0, Vector3d::Zero(), p.theta0, p);
  CHECK(zero.psi_e == doctest::Approx(0.0));
  CHECK(zero.psi_p == doctest::Approx(0.0));
  CHECK(zero.psi_d == doctest::Approx(0.0));
  CHECK(zero.psi_dbar == doctest::Approx(0.0));

  const FreeEnergyParts pen =
      free_energy_parts(id, id, 0.0, 0.0, 0.1, 0.0, Vector3d::Zero(), p.theta0, p);
  CHECK(pen.psi_dbar == doctest::Approx(5000.0));

  // Frozen high-precision evaluation of the elastic energy.
  const FreeEnergyParts el = free_energy_parts(SymTensor3::diagonal(1.21, 1.0, 1.0), id, 0.0,
                                               0.0, 0.0, 0.0, Vector3d::Zero(), p.theta0, p);
  CHECK(el.psi_e == doctest::Approx(654.062863208071947).epsilon(1e-13));

  CHECK_THROWS_AS(free_energy_parts(SymTensor3::diagonal(-1, 1, 1), id, 0, 0, 0, 0,
                                    Vector3d::Zero(), p.theta0, p),
                  MaterialError);
}

TEST_CASE("stresses at the reference configuration vanish") {
  const MaterialParams p = MaterialParams::test1();
  GaussState st;
  const PointOutput out = stresses_and_forces(SymTensor3::identity(), st, 0.0,
                                              Vector3d::Zero(), p.theta0, p);
  CHECK(out.S.norm() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(out.Y == doctest::Approx(0.0));
  CHECK(out.q_p == doctest::Approx(0.0));
  CHECK(out.q_d == doctest::Approx(0.0));
  CHECK(out.a_i == doctest::Approx(0.0));
}

TEST_CASE("Mandel stress: definition matches the push-forward identity") {
  const MaterialParams p = MaterialParams::test1();
  for (int trial = 0; trial < 25; ++trial) {
    GaussState st;
    st.C_p = sym_from(expm(random_sym(0.05)));
    st.xi_p = 0.03;
    st.D = 0.2;
    st.xi_d = 0.2;
    const Matrix3d c = expm(random_sym(0.1));
    const double theta = p.theta0 + 12.0;

    const PointOutput out =
        stresses_and_forces(sym_from(c), st, 0.15, Vector3d::Zero(), theta, p);

    // Route 1: M = 2 f_d C_e dpsi_e/dC_e evaluated from the kinematics.
    Eigen::SelfAdjointEigenSolver<Matrix3d> es;
    es.computeDirect(st.C_p.matrix());
    const Matrix3d up = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
                        es.eigenvectors().transpose();
    const Matrix3d up_inv = up.inverse();
    const double vt = thermal_stretch(theta, p);
    const Matrix3d ce = (up_inv * c * up_inv) / (vt * vt);
    const double det_ce = ce.determinant();
    const Matrix3d m_def =
        degradation(st.D) * (p.mu * (ce - Matrix3d::Identity()) +
                             0.5 * p.lambda * (det_ce - 1.0) * Matrix3d::Identity());

    // Route 2: push-forward identity M = F_p^T S C F_p^{-T} (the transpose
    // placement that holds for non-commuting C and C_p).
    const Matrix3d m_id = up * out.S.matrix() * c * up_inv;
    CHECK((m_def - m_id).norm() < 1e-10 * std::max(1.0, m_def.norm()));
  }
}

TEST_CASE("q_d vanishes for virgin damage state") {
  const MaterialParams p = MaterialParams::test1();
  GaussState st;
  st.D = 0.0;
  st.xi_d = 0.0;
  const PointOutput out = stresses_and_forces(SymTensor3::diagonal(1.1, 1.0, 1.0), st, 0.0,
                                              Vector3d::Zero(), p.theta0, p);
  CHECK(out.q_d == doctest::Approx(0.0));
}

TEST_CASE("conductivity interpolates between intact and broken") {
  const MaterialParams p = MaterialParams::test1();
  const SymTensor3 id = SymTensor3::identity();
  CHECK(conductivity(id, 0.0, p)(0, 0) == doctest::Approx(p.K0));
  CHECK(conductivity(id, 1.0, p)(0, 0) == doctest::Approx(p.Kc));
  CHECK(conductivity(id, 0.5, p)(0, 0) == doctest::Approx(0.25 * p.K0 + 0.75 * p.Kc));
  CHECK(conductivity(id, 0.5, p)(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("trial surfaces at stress-free state") {
  const MaterialParams p = MaterialParams::test1();
  GaussState st;
  const double theta = p.theta0 + 25.0;
  // Stress-free at elevated temperature: C equals the free thermal expansion.
  const double vt = thermal_stretch(theta, p);
  const auto [phi_p, phi_d] =
      trial_surfaces(SymTensor3::diagonal(vt * vt, vt * vt, vt * vt), st, 0.0, theta, p);
  CHECK(phi_p == doctest::Approx(-p.sigma_y0 * thermal_softening(theta, p)));
  CHECK(phi_d == doctest::Approx(-p.Y0));
}

TEST_CASE("trial surface touches zero at the engineered stress state") {
  const MaterialParams p = MaterialParams::test1();
  GaussState st;
  const double eps = p.sigma_y0 / (3.0 * p.mu);
  const SymTensor3 c = SymTensor3::diagonal(1.0 + 2.0 * eps, 1.0 - eps, 1.0 - eps);
  const auto [phi_p, phi_d] = trial_surfaces(c, st, 0.0, p.theta0, p);
  CHECK(phi_p == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(phi_d < 0.0);
}

TEST_CASE("plastic activation step brackets the substepped oracle") {
  const MaterialParams p = MaterialParams::test1();
  auto first_active = [&](int steps) {
    GaussState st;
    for (int i = 1; i <= steps; ++i) {
      const double lam = 1.0 + 0.005 * double(i) / steps;
      const SymTensor3 c = SymTensor3::diagonal(lam * lam, 1.0, 1.0);
      const auto [phi_p, phi_d] = trial_surfaces(c, st, 0.0, p.theta0, p);
      if (phi_p > 0.0) return double(i) / steps;
    }
    return 2.0;
  };
  const double coarse = first_active(40);
  const double fine = first_active(40000);
  CHECK(coarse >= fine);
  CHECK(coarse - fine <= 1.0 / 40 + 1e-12);
}

TEST_CASE("elastic increment leaves the state untouched") {
  const MaterialParams p = MaterialParams::test1();
  GaussState st;
  st.theta_conv = p.theta0;
  const SymTensor3 c = SymTensor3::diagonal(1.001, 1.0, 1.0);
  const LocalResult res = integrate_local(c, 0.0, p.theta0, st, 0.1, p);
  CHECK(res.state.xi_p == 0.0);
  CHECK(res.state.D == 0.0);
  CHECK(res.state.xi_d == 0.0);
  CHECK((res.state.C_p.matrix() - Matrix3d::Identity()).norm() == 0.0);
  CHECK(res.output.dissipation == doctest::Approx(0.0));
}

TEST_CASE("uniaxial stretch trajectory matches the 1000x substepped oracle") {
  const MaterialParams p = MaterialParams::test1();
  const double lam = 1.12;
  const Matrix3d c_target =
      Eigen::Vector3d(lam * lam, 1.0 - 0.35 * (lam - 1.0), 1.0 - 0.35 * (lam - 1.0))
          .asDiagonal();
  const int steps = 40;
  const PathResult coarse = drive_path(c_target, 0.35, p.theta0 + 8.0, steps, p);
  const PathResult fine = drive_path(c_target, 0.35, p.theta0 + 8.0, steps * 1000, p);

  REQUIRE(fine.state.D > 0.05);  // damage must actually evolve on this path
  REQUIRE(fine.state.xi_p > 0.02);
  const double s_scale = std::max(std::abs(fine.out.S(0, 0)), 1.0);
  CHECK(std::abs(coarse.out.S(0, 0) - fine.out.S(0, 0)) / s_scale < 1e-6);
  CHECK(std::abs(coarse.state.D - fine.state.D) / fine.state.D < 1e-6);
  CHECK(std::abs(coarse.state.xi_p - fine.state.xi_p) / fine.state.xi_p < 1e-6);
}

TEST_CASE("simple shear trajectory matches the 1000x substepped oracle") {
  const MaterialParams p = MaterialParams::test1();
  const double gamma = 0.025;
  Matrix3d f = Matrix3d::Identity();
  f(0, 1) = gamma;
  const Matrix3d c_target = f.transpose() * f;
  const int steps = 125;
  const PathResult coarse = drive_path(c_target, 0.3, p.theta0 + 5.0, steps, p);
  const PathResult fine = drive_path(c_target, 0.3, p.theta0 + 5.0, steps * 1000, p);

  REQUIRE(fine.state.xi_p > 0.01);
  const double s_scale = std::max(std::abs(fine.out.S(0, 1)), 1.0);
  CHECK(std::abs(coarse.out.S(0, 1) - fine.out.S(0, 1)) / s_scale < 1e-6);
  CHECK(std::abs(coarse.state.xi_p - fine.state.xi_p) / fine.state.xi_p < 1e-6);
  CHECK(std::abs(coarse.state.D - fine.state.D) / std::max(fine.state.D, 1e-3) < 1e-6);
}

TEST_CASE("damage activates exactly when the trial surface crosses zero") {
  const MaterialParams p = MaterialParams::test1();
  GaussState st;
  st.theta_conv = p.theta0;
  const int steps = 120;
  const double lam_max = 1.2;
  bool seen_active = false;
  for (int i = 1; i <= steps; ++i) {
    const double lam = 1.0 + (lam_max - 1.0) * double(i) / steps;
    const SymTensor3 c = SymTensor3::diagonal(lam * lam, 1.0 - 0.35 * (lam - 1.0),
                                              1.0 - 0.35 * (lam - 1.0));
    const auto [phi_p, phi_d] = trial_surfaces(c, st, st.Dbar_conv, p.theta0, p);
    const bool trial_wants_damage = phi_d > 0.0;
    const LocalResult res = integrate_local(c, st.Dbar_conv, p.theta0, st, 1.0 / steps, p);
    if (trial_wants_damage) {
      CHECK(res.state.D > st.D);
      seen_active = true;
    } else if (!seen_active) {
      CHECK(res.state.D == doctest::Approx(0.0));
    }
    st = res.state;
  }
  CHECK(seen_active);
}

TEST_CASE("heat generation is zero without rates") {
  const MaterialParams p = MaterialParams::test1();
  GaussState st;
  st.theta_conv = p.theta0;
  const HeatParts h = heat_generation(SymTensor3::identity(), st, st, 0.0, p.theta0,
                                      Vector3d::Zero(), 0.5, p);
  CHECK(h.r_e == doctest::Approx(0.0));
  CHECK(h.r_p == doctest::Approx(0.0));
  CHECK(h.r_d == doctest::Approx(0.0));
}

TEST_CASE("elastic step generates only thermoelastic heat") {
  const MaterialParams p = MaterialParams::test1();
  GaussState old;
  old.theta_conv = p.theta0;
  const SymTensor3 c = SymTensor3::diagonal(1.0008, 1.0, 1.0);
  const LocalResult res = integrate_local(c, 0.0, p.theta0 + 1.0, old, 0.25, p);
  const HeatParts h =
      heat_generation(c, res.state, old, 0.0, p.theta0 + 1.0, Vector3d::Zero(), 0.25, p);
  CHECK(h.r_p == doctest::Approx(0.0));
  CHECK(h.r_d == doctest::Approx(0.0));
  CHECK(h.r_e != doctest::Approx(0.0));  // thermoelastic coupling is active
}

TEST_CASE("plastic heating is positive and matches a term-by-term oracle") {
  const MaterialParams p = MaterialParams::test1();
  // Build a genuinely plastic step.
  GaussState st;
  st.theta_conv = p.theta0;
  const double lam = 1.01;
  const SymTensor3 c1 = SymTensor3::diagonal(lam * lam, 1.0, 1.0);
  const LocalResult step1 = integrate_local(c1, 0.0, p.theta0, st, 0.1, p);
  REQUIRE(step1.state.xi_p > 0.0);

  const double lam2 = 1.02;
  const SymTensor3 c2 = SymTensor3::diagonal(lam2 * lam2, 1.0, 1.0);
  const double dt = 0.1;
  const LocalResult step2 = integrate_local(c2, 0.0, p.theta0, step1.state, dt, p);
  const HeatParts h =
      heat_generation(c2, step2.state, step1.state, 0.0, p.theta0, Vector3d::Zero(), dt, p);
  CHECK(h.r_p > 0.0);

  // Oracle: independent evaluation through the public stress interface with a
  // different finite-difference step.
  const double theta = p.theta0;
  auto s_of = [&](double th) {
    GaussState frozen = step2.state;
    return stresses_and_forces(c2, frozen, 0.0, Vector3d::Zero(), th, p);
  };
  const double h_th = 1e-6 * theta;
  const PointOutput sp = s_of(theta + h_th);
  const PointOutput sm = s_of(theta - h_th);
  const PointOutput s0 = s_of(theta);
  const Matrix3d s_th = (sp.S.matrix() - sm.S.matrix()) / (2.0 * h_th);
  const double qp_th = (sp.q_p - sm.q_p) / (2.0 * h_th);

  const Matrix3d cp = step2.state.C_p.matrix();
  const Matrix3d cp_dot = (cp - step1.state.C_p.matrix()) / dt;
  const double xi_p_dot = (step2.state.xi_p - step1.state.xi_p) / dt;
  const Matrix3d x_tensor =
      degradation(step2.state.D) * thermal_softening(theta, p) * p.a *
      (Matrix3d::Identity() - cp.inverse());
  const Matrix3d x_th = -p.omega * degradation(step2.state.D) * p.a *
                        (Matrix3d::Identity() - cp.inverse());
  const double r_p_oracle =
      0.5 * (c2.matrix() * (s0.S.matrix() - theta * s_th))
                .cwiseProduct(cp.inverse() * cp_dot)
                .sum() -
      0.5 * (x_tensor - theta * x_th).cwiseProduct(cp_dot).sum() -
      (s0.q_p - theta * qp_th) * xi_p_dot;
  CHECK(h.r_p == doctest::Approx(r_p_oracle).epsilon(1e-6));
}

TEST_CASE("consistent tangent in the elastic regime matches the analytic oracle") {
  const MaterialParams p = MaterialParams::test1();
  GaussState st;
  st.theta_conv = p.theta0;
  st.C_p = sym_from(expm(random_sym(0.01)));
  st.xi_p = 0.002;
  // Probe close to the plastically relaxed configuration: small elastic strain.
  Eigen::SelfAdjointEigenSolver<Matrix3d> es;
  es.computeDirect(st.C_p.matrix());
  const Matrix3d up = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
                      es.eigenvectors().transpose();
  const Matrix3d c = up * expm(random_sym(0.0005)) * up;
  const double theta = p.theta0 + 2.0;
  const double dt = 0.1;

  const PointDerivs derivs = consistent_tangent(sym_from(c), 0.0, theta, st, dt, p);
  const Eigen::Matrix<double, 6, 6> oracle = elastic_tangent(sym_from(c), st, theta, p);
  CHECK((derivs.dS.leftCols<6>() - oracle).norm() < 1e-6 * oracle.norm());

  // Independent route: finite differences of the converged local map.
  constexpr int rows[6] = {0, 1, 2, 0, 1, 0};
  constexpr int cols[6] = {0, 1, 2, 1, 2, 2};
  Eigen::Matrix<double, 6, 6> fd;
  for (int b = 0; b < 6; ++b) {
    Matrix3d e = Matrix3d::Zero();
    e(rows[b], cols[b]) = e(cols[b], rows[b]) = 1.0;
    const double h = 1e-6;
    const LocalResult plus = integrate_local(sym_from(c + h * e), 0.0, theta, st, dt, p);
    const LocalResult minus = integrate_local(sym_from(c - h * e), 0.0, theta, st, dt, p);
    for (int a = 0; a < 6; ++a)
      fd(a, b) = (plus.output.S(rows[a], cols[a]) - minus.output.S(rows[a], cols[a])) / (2 * h);
  }
  CHECK((fd - oracle).norm() < 1e-6 * oracle.norm());

  // Major symmetry of the weighted elastic block.
  Eigen::Matrix<double, 6, 6> weighted = oracle;
  const double w[6] = {1, 1, 1, 2, 2, 2};
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) weighted(i, j) *= w[i];
  CHECK((weighted - weighted.transpose()).norm() < 1e-8 * weighted.norm());
}

TEST_CASE("consistent tangent with active plasticity and damage matches FD") {
  const MaterialParams p = MaterialParams::test1();
  // March into the plastic + damage regime first.
  GaussState st;
  st.theta_conv = p.theta0;
  Matrix3d c = Matrix3d::Identity();
  const double lam = 1.09;
  const Matrix3d c_target =
      Eigen::Vector3d(lam * lam, 1.0 - 0.3 * (lam - 1.0), 1.0 - 0.3 * (lam - 1.0)).asDiagonal();
  const int steps = 25;
  double dbar = 0.0;
  for (int i = 1; i < steps; ++i) {
    const double s = double(i) / steps;
    c = Matrix3d::Identity() + s * (c_target - Matrix3d::Identity());
    dbar = 0.3 * s;
    const LocalResult r = integrate_local(sym_from(c), dbar, p.theta0 + 4.0 * s, st, 0.04, p);
    st = r.state;
  }
  const Matrix3d c_probe = Matrix3d::Identity() + (c_target - Matrix3d::Identity());
  const double dbar_probe = 0.3, theta_probe = p.theta0 + 4.0, dt = 0.04;
  const LocalResult base = integrate_local(sym_from(c_probe), dbar_probe, theta_probe, st, dt, p);
  REQUIRE(base.state.xi_p > st.xi_p);  // plasticity active on the probe step
  REQUIRE(base.state.D > st.D);        // damage active on the probe step

  const PointDerivs derivs =
      consistent_tangent(sym_from(c_probe), dbar_probe, theta_probe, st, dt, p);

  constexpr int rows[6] = {0, 1, 2, 0, 1, 0};
  constexpr int cols[6] = {0, 1, 2, 1, 2, 2};
  LocalOptions probe_opts;
  probe_opts.noise_floor = 5e-9;  // perturbed re-solves may sit at the rounding floor
  auto out_at = [&](const Matrix3d& cc, double db, double th) {
    return integrate_local(sym_from(cc), db, th, st, dt, p, probe_opts);
  };
  Eigen::Matrix<double, 6, 8> fd_s;
  Eigen::Matrix<double, 1, 8> fd_d;
  const double h_c = 3e-7, h_db = 3e-7, h_th = 3e-7 * theta_probe;
  for (int b = 0; b < 6; ++b) {
    Matrix3d e = Matrix3d::Zero();
    e(rows[b], cols[b]) = e(cols[b], rows[b]) = 1.0;
    const LocalResult plus = out_at(c_probe + h_c * e, dbar_probe, theta_probe);
    const LocalResult minus = out_at(c_probe - h_c * e, dbar_probe, theta_probe);
    for (int a = 0; a < 6; ++a)
      fd_s(a, b) =
          (plus.output.S(rows[a], cols[a]) - minus.output.S(rows[a], cols[a])) / (2 * h_c);
    fd_d(0, b) = (plus.state.D - minus.state.D) / (2 * h_c);
  }
  {
    const LocalResult plus = out_at(c_probe, dbar_probe + h_db, theta_probe);
    const LocalResult minus = out_at(c_probe, dbar_probe - h_db, theta_probe);
    for (int a = 0; a < 6; ++a)
      fd_s(a, 6) =
          (plus.output.S(rows[a], cols[a]) - minus.output.S(rows[a], cols[a])) / (2 * h_db);
    fd_d(0, 6) = (plus.state.D - minus.state.D) / (2 * h_db);
  }
  {
    const LocalResult plus = out_at(c_probe, dbar_probe, theta_probe + h_th);
    const LocalResult minus = out_at(c_probe, dbar_probe, theta_probe - h_th);
    for (int a = 0; a < 6; ++a)
      fd_s(a, 7) =
          (plus.output.S(rows[a], cols[a]) - minus.output.S(rows[a], cols[a])) / (2 * h_th);
    fd_d(0, 7) = (plus.state.D - minus.state.D) / (2 * h_th);
  }
  CHECK((derivs.dS - fd_s).norm() < 1e-5 * fd_s.norm());
  CHECK((derivs.dD - fd_d).norm() < 1e-5 * std::max(fd_d.norm(), 1e-8));
}

TEST_CASE("randomized loading paths: KKT, dissipation, monotonicity") {
  const MaterialParams p = MaterialParams::test1();
  for (int trial = 0; trial < 8; ++trial) {
    const Matrix3d b = random_sym(0.12);
    const Matrix3d c_target = expm(b);
    std::uniform_real_distribution<double> ddist(0.0, 0.35);
    const double dbar_target = ddist(rng);
    std::uniform_real_distribution<double> tdist(-20.0, 30.0);
    const double theta_target = p.theta0 + tdist(rng);

    GaussState st;
    st.theta_conv = p.theta0;
    const int steps = 12;
    for (int i = 1; i <= steps; ++i) {
      const double s = double(i) / steps;
      const Matrix3d c = Matrix3d::Identity() + s * (c_target - Matrix3d::Identity());
      const double dbar = s * dbar_target;
      const double theta = p.theta0 + s * (theta_target - p.theta0);
      const LocalResult res = integrate_local(sym_from(c), dbar, theta, st, 0.05, p);

      // Discrete KKT at the converged state.
      const auto [phi_p, phi_d] = trial_surfaces(sym_from(c), res.state, dbar, theta, p);
      CHECK(phi_p <= 1e-9);
      if (!res.state.fully_damaged) CHECK(phi_d <= 1e-9);

      // Monotone internal variables.
      CHECK(res.state.xi_p >= st.xi_p);
      CHECK(res.state.D >= st.D);
      CHECK(res.state.xi_d >= st.xi_d);

      // Reduced dissipation inequality.
      CHECK(res.output.dissipation >= -1e-10);

      st = res.state;
    }
  }
}

TEST_CASE("back stress power identity chi:D_p = X:Cp_dot/2") {
  const MaterialParams p = MaterialParams::test1();
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix3d cp = expm(random_sym(0.08));
    const double D = 0.15;
    const double theta = p.theta0 + 10.0;
    const double f_d = degradation(D);
    const double f_th = thermal_softening(theta, p);

    Eigen::SelfAdjointEigenSolver<Matrix3d> es;
    es.computeDirect(cp);
    const Matrix3d up = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
                        es.eigenvectors().transpose();
    const Matrix3d chi = f_d * f_th * p.a * (cp - Matrix3d::Identity());
    const Matrix3d x = f_d * f_th * p.a * (Matrix3d::Identity() - cp.inverse());

    const Matrix3d cp_dot = random_sym(0.3);
    const Matrix3d d_p = 0.5 * up.inverse() * cp_dot * up.inverse();
    const double lhs = chi.cwiseProduct(d_p).sum();
    const double rhs = 0.5 * x.cwiseProduct(cp_dot).sum();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("infinite damage threshold reduces to thermo-elastoplasticity") {
  MaterialParams p = MaterialParams::test1();
  p.Y0 = 1e12;
  const double lam = 1.1;
  const Matrix3d c_target =
      Eigen::Vector3d(lam * lam, 1.0 - 0.3 * (lam - 1.0), 1.0 - 0.3 * (lam - 1.0)).asDiagonal();
  const PathResult res = drive_path(c_target, 0.0, p.theta0, 30, p);
  CHECK(res.state.D == 0.0);
  CHECK(res.state.xi_d == 0.0);
  CHECK(res.state.xi_p > 0.01);
}

TEST_CASE("isothermal reference runs are independent of thermal parameters") {
  MaterialParams pa = MaterialParams::test1();
  pa.alpha = 0.0;
  MaterialParams pb = pa;
  pb.c = 123.0;
  pb.K0 = 7.0;
  pb.Kc = 0.07;

  const double lam = 1.08;
  const Matrix3d c_target =
      Eigen::Vector3d(lam * lam, 1.0 - 0.3 * (lam - 1.0), 1.0 - 0.3 * (lam - 1.0)).asDiagonal();
  const PathResult ra = drive_path(c_target, 0.25, pa.theta0, 20, pa);
  const PathResult rb = drive_path(c_target, 0.25, pb.theta0, 20, pb);
  CHECK(ra.state.xi_p == rb.state.xi_p);
  CHECK(ra.state.D == rb.state.D);
  CHECK((ra.out.S.matrix() - rb.out.S.matrix()).norm() == 0.0);
}
