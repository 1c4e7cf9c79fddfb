#pragma once

// Truncated Fock-space states and operators. The basis is |0>, ..., |d-1>;
// everything is stored densely.

#include <complex>
#include <utility>

#include <Eigen/Dense>

namespace echoqm {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Fock truncation dimension, d >= 2.
class FockDim {
 public:
  explicit FockDim(int d);

  int value() const noexcept { return d_; }
  friend bool operator==(FockDim, FockDim) = default;

 private:
  int d_;
};

class StateVector {
 public:
  explicit StateVector(CVector amplitudes);

  const CVector& amplitudes() const noexcept { return amp_; }
  int dim() const noexcept { return static_cast<int>(amp_.size()); }
  Complex operator[](int n) const { return amp_[n]; }
  double norm() const { return amp_.norm(); }
  double population(int n) const { return std::norm(amp_[n]); }

 private:
  CVector amp_;
};

class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix entries);

  static DensityMatrix pure(const StateVector& psi);
  static DensityMatrix maximally_mixed(FockDim dim);

  const CMatrix& entries() const noexcept { return rho_; }
  int dim() const noexcept { return static_cast<int>(rho_.rows()); }
  double population(int n) const { return rho_(n, n).real(); }
  double trace() const { return rho_.trace().real(); }
  double purity() const;
  /// Largest |rho - rho^dagger| entry.
  double hermiticity_defect() const;

 private:
  CMatrix rho_;
};

enum class OperatorTag { annihilation, creation, number, number_sq, parity, displacement, custom };

class Operator {
 public:
  Operator(CMatrix matrix, OperatorTag tag);

  const CMatrix& matrix() const noexcept { return m_; }
  OperatorTag tag() const noexcept { return tag_; }
  int dim() const noexcept { return static_cast<int>(m_.rows()); }

  StateVector apply(const StateVector& psi) const;

 private:
  CMatrix m_;
  OperatorTag tag_;
};

StateVector vacuum(FockDim dim);
StateVector fock_state(FockDim dim, int n);

Operator annihilation(FockDim dim);
Operator creation(FockDim dim);
/// (n, n^2), both diagonal.
std::pair<Operator, Operator> number_ops(FockDim dim);
Operator parity(FockDim dim);

/// exp(alpha a^dagger - conj(alpha) a) on the truncated space. Throws
/// TruncationOverflow when the result is not unitary to 1e-6 or D(alpha)|0>
/// leaves more than 1e-6 on the tail levels.
Operator displacement(FockDim dim, Complex alpha);

/// Applies displacements without forming matrices. The truncated generator
/// alpha a^dagger - conj(alpha) a is a phase-rotated copy of -i r (a + a^dagger),
/// so one real tridiagonal eigendecomposition (the Gauss-Hermite nodes) serves
/// every alpha.
class DisplacementKernel {
 public:
  explicit DisplacementKernel(FockDim dim);

  int dim() const noexcept { return static_cast<int>(nodes_.size()); }
  /// Replaces every column x of `columns` by D(alpha) x.
  void apply(Complex alpha, CMatrix& columns) const;
  CVector apply(Complex alpha, const CVector& x) const;
  CMatrix matrix(Complex alpha) const;

 private:
  RVector nodes_;
  RMatrix basis_;
};

/// exp(-i theta n) applied to a state, or conjugation by it for a density matrix.
StateVector phase_rotation(const StateVector& psi, double theta);
DensityMatrix phase_rotation(const DensityMatrix& rho, double theta);

/// tr(op rho), which must be real to 1e-9 (1 + |value|).
double expectation(const Operator& op, const DensityMatrix& rho);

struct PhotonStats {
  double mean = 0.0;
  double variance = 0.0;
};

PhotonStats photon_stats(const StateVector& psi);
PhotonStats photon_stats(const DensityMatrix& rho);

/// Half the trace norm of a - b, for Hermitian a and b.
double trace_distance(const CMatrix& a, const CMatrix& b);

/// Number of levels treated as the truncation tail: top 5%, at least 3.
int tail_levels(int dim);

}  // namespace echoqm
