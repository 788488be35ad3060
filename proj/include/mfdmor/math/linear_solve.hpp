// Copyright (c) the mfd-mor project developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <stdexcept>
#include <string>

namespace mfdmor::math {

/// Assembled linear system K x = -R on the free degrees of freedom.
struct SparseSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;

  Eigen::Index size() const { return rhs.size(); }
};

class SingularSystemError : public std::runtime_error {
public:
  SingularSystemError(const std::string& what, double condition_estimate)
      : std::runtime_error(what), condition_estimate_(condition_estimate) {}
  double condition_estimate() const { return condition_estimate_; }

private:
  double condition_estimate_;
};

/// Direct sparse LU solve of K x = -R. Throws SingularSystemError when the
/// factorization fails or the residual check does not reach 1e-10 relative.
Eigen::VectorXd linear_solve(const SparseSystem& sys);

}  // namespace mfdmor::math
