// Copyright (c) the mfd-mor project developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <stdexcept>

namespace mfdmor::math {

/// Symmetric 3x3 tensor stored by its six independent components.
/// Component order: (xx, yy, zz, xy, yz, xz).
class SymTensor3 {
public:
  SymTensor3() : c_{0, 0, 0, 0, 0, 0} {}
  SymTensor3(double xx, double yy, double zz, double xy, double yz, double xz)
      : c_{xx, yy, zz, xy, yz, xz} {}

  static SymTensor3 identity() { return SymTensor3(1, 1, 1, 0, 0, 0); }
  static SymTensor3 diagonal(double a, double b, double c) { return SymTensor3(a, b, c, 0, 0, 0); }

  /// Builds from a dense matrix, symmetrizing 0.5*(m + m^T).
  static SymTensor3 from_matrix(const Eigen::Matrix3d& m) {
    return SymTensor3(m(0, 0), m(1, 1), m(2, 2), 0.5 * (m(0, 1) + m(1, 0)),
                      0.5 * (m(1, 2) + m(2, 1)), 0.5 * (m(0, 2) + m(2, 0)));
  }

  Eigen::Matrix3d matrix() const {
    Eigen::Matrix3d m;
    m << c_[0], c_[3], c_[5], c_[3], c_[1], c_[4], c_[5], c_[4], c_[2];
    return m;
  }

  double operator()(int i, int j) const {
    static constexpr int map[3][3] = {{0, 3, 5}, {3, 1, 4}, {5, 4, 2}};
    return c_[map[i][j]];
  }

  double& comp(int k) { return c_[k]; }
  double comp(int k) const { return c_[k]; }

  SymTensor3 operator+(const SymTensor3& o) const {
    SymTensor3 r;
    for (int k = 0; k < 6; ++k) r.c_[k] = c_[k] + o.c_[k];
    return r;
  }
  SymTensor3 operator-(const SymTensor3& o) const {
    SymTensor3 r;
    for (int k = 0; k < 6; ++k) r.c_[k] = c_[k] - o.c_[k];
    return r;
  }
  SymTensor3 operator*(double s) const {
    SymTensor3 r;
    for (int k = 0; k < 6; ++k) r.c_[k] = c_[k] * s;
    return r;
  }
  friend SymTensor3 operator*(double s, const SymTensor3& t) { return t * s; }

  double trace() const { return c_[0] + c_[1] + c_[2]; }

  double det() const {
    const double xx = c_[0], yy = c_[1], zz = c_[2], xy = c_[3], yz = c_[4], xz = c_[5];
    return xx * (yy * zz - yz * yz) - xy * (xy * zz - yz * xz) + xz * (xy * yz - yy * xz);
  }

  SymTensor3 deviator() const {
    const double p = trace() / 3.0;
    return SymTensor3(c_[0] - p, c_[1] - p, c_[2] - p, c_[3], c_[4], c_[5]);
  }

  /// Frobenius norm of the full tensor (off-diagonals counted twice).
  double norm() const {
    return std::sqrt(c_[0] * c_[0] + c_[1] * c_[1] + c_[2] * c_[2] +
                     2.0 * (c_[3] * c_[3] + c_[4] * c_[4] + c_[5] * c_[5]));
  }

  /// Double contraction with another symmetric tensor.
  double ddot(const SymTensor3& o) const {
    return c_[0] * o.c_[0] + c_[1] * o.c_[1] + c_[2] * o.c_[2] +
           2.0 * (c_[3] * o.c_[3] + c_[4] * o.c_[4] + c_[5] * o.c_[5]);
  }

private:
  std::array<double, 6> c_;
};

/// Inverse via the cofactor formula. Throws on (near-)singular input.
inline SymTensor3 sym_inverse(const SymTensor3& t) {
  const double d = t.det();
  const double scale = std::abs(t(0, 0)) + std::abs(t(1, 1)) + std::abs(t(2, 2));
  if (d == 0.0 || std::abs(d) < 1e-300 * std::max(1.0, scale * scale * scale))
    throw std::domain_error("sym_inverse: singular tensor (det = " + std::to_string(d) + ")");
  const double xx = t(0, 0), yy = t(1, 1), zz = t(2, 2);
  const double xy = t(0, 1), yz = t(1, 2), xz = t(0, 2);
  const double inv = 1.0 / d;
  return SymTensor3((yy * zz - yz * yz) * inv, (xx * zz - xz * xz) * inv,
                    (xx * yy - xy * xy) * inv, (xz * yz - xy * zz) * inv,
                    (xy * xz - xx * yz) * inv, (xy * yz - xz * yy) * inv);
}

/// Applies f to the eigenvalues of a symmetric tensor.
template <typename F>
SymTensor3 sym_eigen_map(const SymTensor3& t, F&& f) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
  es.computeDirect(t.matrix());
  Eigen::Vector3d lam = es.eigenvalues();
  for (int i = 0; i < 3; ++i) lam[i] = f(lam[i]);
  const Eigen::Matrix3d m =
      es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
  return SymTensor3::from_matrix(m);
}

inline SymTensor3 sym_exp(const SymTensor3& t) {
  return sym_eigen_map(t, [](double x) { return std::exp(x); });
}

/// Principal square root; requires a positive definite argument.
inline SymTensor3 sym_sqrt(const SymTensor3& t) {
  return sym_eigen_map(t, [](double x) {
    if (x <= 0.0) throw std::domain_error("sym_sqrt: non-positive eigenvalue");
    return std::sqrt(x);
  });
}

inline bool is_spd(const SymTensor3& t) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
  es.computeDirect(t.matrix());
  return es.eigenvalues().minCoeff() > 0.0;
}

}  // namespace mfdmor::math
