#include "echoqm/spectral.hpp"

#include <string>
#include <vector>

#include <lapacke.h>

#include "echoqm/errors.hpp"

namespace echoqm {

TridiagonalEigen tridiagonal_eigen(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag) {
  const lapack_int m = static_cast<lapack_int>(diag.size());
  if (m < 1 || offdiag.size() != diag.size() - 1) {
    fail(ErrorCode::InvalidArgument, "tridiagonal_eigen: inconsistent band lengths");
  }
  TridiagonalEigen out;
  out.values.resize(m);
  out.vectors.resize(m, m);
  if (m == 1) {
    out.values[0] = diag[0];
    out.vectors(0, 0) = 1.0;
    return out;
  }

  Eigen::VectorXd d = diag;
  Eigen::VectorXd e(m);  // dstevr wants length m workspace for the off-diagonal
  e.head(m - 1) = offdiag;
  e[m - 1] = 0.0;
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(m));
  lapack_int found = 0;
  const lapack_int info =
      LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'A', m, d.data(), e.data(), 0.0, 0.0, 0, 0, 0.0, &found,
                     out.values.data(), out.vectors.data(), m, support.data());
  if (info != 0 || found != m) {
    fail(ErrorCode::ConvergenceFailure, "dstevr failed (info=" + std::to_string(info) + ")");
  }
  return out;
}

}  // namespace echoqm
