#pragma once

#include <Eigen/Dense>

namespace echoqm {

/// Eigenpairs of a real symmetric tridiagonal matrix, ascending eigenvalues,
/// orthonormal eigenvectors stored as columns.
struct TridiagonalEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

/// `diag` has length m, `offdiag` length m - 1. Backed by LAPACK's MRRR solver.
TridiagonalEigen tridiagonal_eigen(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag);

}  // namespace echoqm
