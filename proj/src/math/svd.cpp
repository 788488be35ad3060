// Copyright (c) the mfd-mor project developers.
// SPDX-License-Identifier: Apache-2.0

#include "mfdmor/math/svd.hpp"

#include <stdexcept>

namespace mfdmor::math {

ThinSvd thin_svd(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  const Eigen::Index m = a.cols();
  if (m == 0) throw std::invalid_argument("thin_svd: empty matrix");
  if (n < m) throw std::invalid_argument("thin_svd: expected rows >= cols");

  // Gram matrix eigendecomposition; eigenvalues come out ascending.
  const Eigen::MatrixXd gram = a.transpose() * a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("thin_svd: Gram eigendecomposition failed");

  Eigen::MatrixXd v(m, m);
  for (Eigen::Index j = 0; j < m; ++j) v.col(j) = es.eigenvectors().col(m - 1 - j);

  // W = A V spans range(A) with columns of length sigma_j. A QR pass plus a
  // small dense SVD restores orthonormality lost on the trailing columns.
  const Eigen::MatrixXd w = a * v;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(w);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, m);

  const Eigen::MatrixXd core = q.transpose() * a;  // m x m
  Eigen::JacobiSVD<Eigen::MatrixXd> small_svd(core,
                                              Eigen::ComputeFullU | Eigen::ComputeFullV);

  ThinSvd out;
  out.basis = q * small_svd.matrixU();
  out.sigma = small_svd.singularValues();
  out.vt = small_svd.matrixV().transpose();

  const double cutoff = 1e-14 * (out.sigma.size() > 0 ? out.sigma[0] : 0.0);
  for (Eigen::Index j = 0; j < out.sigma.size(); ++j)
    if (out.sigma[j] < cutoff) out.sigma[j] = 0.0;
  return out;
}

}  // namespace mfdmor::math
