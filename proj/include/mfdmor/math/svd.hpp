// Copyright (c) the mfd-mor project developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

namespace mfdmor::math {

/// Thin SVD  A = basis * diag(sigma) * vt  of a tall matrix (rows >= cols).
///
/// basis: n x m with orthonormal columns, sigma: m (non-increasing, >= 0),
/// vt: m x m. Singular values below 1e-14 * sigma_max are clamped to zero;
/// the corresponding basis columns are an orthonormal completion.
struct ThinSvd {
  Eigen::MatrixXd basis;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd vt;

  int rank() const {
    int r = 0;
    while (r < sigma.size() && sigma[r] > 0.0) ++r;
    return r;
  }
};

/// Method of snapshots: eigendecomposition of the small Gram matrix A^T A
/// drives the decomposition (O(n m^2) for n >> m), followed by a QR pass and
/// a small dense SVD so the left vectors stay orthonormal even for singular
/// values near the clamping threshold.
ThinSvd thin_svd(const Eigen::MatrixXd& a);

}  // namespace mfdmor::math
