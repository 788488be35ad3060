// Copyright (c) the mfd-mor project developers.
// SPDX-License-Identifier: Apache-2.0

#include "mfdmor/math/linear_solve.hpp"

#include <Eigen/SparseLU>
#include <cmath>

namespace mfdmor::math {

namespace {

// Rough 1-norm condition estimate from one extra solve with a +-1 probe.
double estimate_condition(Eigen::SparseLU<Eigen::SparseMatrix<double>>& lu,
                          const Eigen::SparseMatrix<double>& k) {
  const Eigen::Index n = k.rows();
  Eigen::VectorXd probe(n);
  for (Eigen::Index i = 0; i < n; ++i) probe[i] = (i % 2 == 0) ? 1.0 : -1.0;
  const Eigen::VectorXd y = lu.solve(probe);
  double norm_k = 0.0;
  for (Eigen::Index j = 0; j < k.outerSize(); ++j) {
    double col = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(k, j); it; ++it)
      col += std::abs(it.value());
    norm_k = std::max(norm_k, col);
  }
  return norm_k * y.lpNorm<1>() / probe.lpNorm<1>();
}

}  // namespace

Eigen::VectorXd linear_solve(const SparseSystem& sys) {
  if (sys.matrix.rows() != sys.matrix.cols() || sys.matrix.rows() != sys.rhs.size())
    throw std::invalid_argument("linear_solve: inconsistent system dimensions");
  if (sys.size() == 0) return Eigen::VectorXd();

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(sys.matrix);
  lu.factorize(sys.matrix);
  if (lu.info() != Eigen::Success)
    throw SingularSystemError(
        "linear_solve: sparse LU factorization failed (" + lu.lastErrorMessage() + ")",
        std::numeric_limits<double>::infinity());

  Eigen::VectorXd x = lu.solve(-sys.rhs);
  const double rhs_norm = sys.rhs.norm();
  double resid = (sys.matrix * x + sys.rhs).norm();
  if (rhs_norm > 0.0 && resid > 1e-10 * rhs_norm) {
    // One step of iterative refinement before giving up.
    x += lu.solve(-(sys.rhs + sys.matrix * x));
    resid = (sys.matrix * x + sys.rhs).norm();
    if (resid > 1e-10 * rhs_norm)
      throw SingularSystemError(
          "linear_solve: ill-conditioned system, relative residual " +
              std::to_string(resid / rhs_norm),
          estimate_condition(lu, sys.matrix));
  }
  return x;
}

}  // namespace mfdmor::math
