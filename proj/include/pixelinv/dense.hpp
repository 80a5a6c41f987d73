#pragma once

#include <Eigen/Dense>

namespace pixelinv {

/// Eigenvalues of the symmetric part of `a`, ascending, by cyclic Jacobi
/// rotations.
Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& a);

/// Singular values, descending, by one-sided (Hestenes) Jacobi
/// orthogonalization of the columns. Requires rows >= cols.
Eigen::VectorXd singular_values(const Eigen::MatrixXd& a);

}  // namespace pixelinv
