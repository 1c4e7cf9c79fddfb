#include "echoqm/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "echoqm/errors.hpp"
#include "echoqm/spectral.hpp"

namespace echoqm {

FockDim::FockDim(int d) : d_(d) {
  if (d < 2) fail(ErrorCode::InvalidArgument, "Fock dimension must be >= 2, got " + std::to_string(d));
}

StateVector::StateVector(CVector amplitudes) : amp_(std::move(amplitudes)) {
  if (amp_.size() < 2) fail(ErrorCode::InvalidArgument, "state vector needs at least 2 amplitudes");
}

DensityMatrix::DensityMatrix(CMatrix entries) : rho_(std::move(entries)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() < 2) {
    fail(ErrorCode::InvalidArgument, "density matrix must be square with dimension >= 2");
  }
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(FockDim dim) {
  const int d = dim.value();
  return DensityMatrix(CMatrix::Identity(d, d) / static_cast<double>(d));
}

double DensityMatrix::purity() const {
  // tr(rho^2) = sum |rho_jk|^2 for Hermitian rho
  return rho_.squaredNorm();
}

double DensityMatrix::hermiticity_defect() const {
  return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

Operator::Operator(CMatrix matrix, OperatorTag tag) : m_(std::move(matrix)), tag_(tag) {
  if (m_.rows() != m_.cols()) fail(ErrorCode::InvalidArgument, "operator must be square");
}

StateVector Operator::apply(const StateVector& psi) const {
  if (psi.dim() != dim()) fail(ErrorCode::InvalidArgument, "operator/state dimension mismatch");
  return StateVector(m_ * psi.amplitudes());
}

StateVector vacuum(FockDim dim) { return fock_state(dim, 0); }

StateVector fock_state(FockDim dim, int n) {
  if (n < 0 || n >= dim.value()) fail(ErrorCode::InvalidArgument, "Fock level outside truncation");
  CVector v = CVector::Zero(dim.value());
  v[n] = 1.0;
  return StateVector(std::move(v));
}

Operator annihilation(FockDim dim) {
  const int d = dim.value();
  CMatrix a = CMatrix::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return Operator(std::move(a), OperatorTag::annihilation);
}

Operator creation(FockDim dim) {
  return Operator(annihilation(dim).matrix().adjoint(), OperatorTag::creation);
}

std::pair<Operator, Operator> number_ops(FockDim dim) {
  const int d = dim.value();
  CMatrix n = CMatrix::Zero(d, d);
  CMatrix n2 = CMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    n(k, k) = static_cast<double>(k);
    n2(k, k) = static_cast<double>(k) * k;
  }
  return {Operator(std::move(n), OperatorTag::number), Operator(std::move(n2), OperatorTag::number_sq)};
}

Operator parity(FockDim dim) {
  const int d = dim.value();
  CMatrix p = CMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) p(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
  return Operator(std::move(p), OperatorTag::parity);
}

DisplacementKernel::DisplacementKernel(FockDim dim) {
  const int d = dim.value();
  RVector diag = RVector::Zero(d);
  RVector off(d - 1);
  for (int n = 0; n < d - 1; ++n) off[n] = std::sqrt(static_cast<double>(n + 1));
  TridiagonalEigen eig = tridiagonal_eigen(diag, off);
  nodes_ = std::move(eig.values);
  basis_ = std::move(eig.vectors);
}

void DisplacementKernel::apply(Complex alpha, CMatrix& columns) const {
  const int d = dim();
  if (columns.rows() != d) fail(ErrorCode::InvalidArgument, "displacement: dimension mismatch");
  const double r = std::abs(alpha);
  if (r == 0.0) return;
  // D(alpha) = P V exp(-i r diag(nodes)) V^T P^dagger with P = diag(exp(i n (arg alpha + pi/2)))
  const double phi = std::arg(alpha) + std::numbers::pi / 2;
  CVector phase(d);
  for (int n = 0; n < d; ++n) phase[n] = std::polar(1.0, phi * n);
  CVector spectral(d);
  for (int j = 0; j < d; ++j) spectral[j] = std::polar(1.0, -r * nodes_[j]);

  CMatrix work = phase.conjugate().asDiagonal() * columns;
  CMatrix rotated = basis_.transpose().cast<Complex>() * work;
  rotated = spectral.asDiagonal() * rotated;
  work.noalias() = basis_.cast<Complex>() * rotated;
  columns = phase.asDiagonal() * work;
}

CVector DisplacementKernel::apply(Complex alpha, const CVector& x) const {
  CMatrix cols = x;
  apply(alpha, cols);
  return cols.col(0);
}

CMatrix DisplacementKernel::matrix(Complex alpha) const {
  CMatrix m = CMatrix::Identity(dim(), dim());
  apply(alpha, m);
  return m;
}

Operator displacement(FockDim dim, Complex alpha) {
  const int d = dim.value();
  if (alpha == Complex(0.0, 0.0)) return Operator(CMatrix::Identity(d, d), OperatorTag::displacement);
  CMatrix m = DisplacementKernel(dim).matrix(alpha);
  const double defect = (m.adjoint() * m - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
  // the truncated exponential is unitary by construction; what can fail is the
  // coherent state D(alpha)|0> spilling onto the top levels
  const double tail = m.col(0).tail(tail_levels(d)).squaredNorm();
  if (!(tail <= 1e-6)) {
    fail(ErrorCode::TruncationOverflow, "displaced vacuum has tail population " + std::to_string(tail) +
                                            "; increase the Fock dimension");
  }
  if (!(defect <= 1e-6)) {
    fail(ErrorCode::TruncationOverflow,
         "displacement not unitary (defect " + std::to_string(defect) + "); increase the Fock dimension");
  }
  return Operator(std::move(m), OperatorTag::displacement);
}

StateVector phase_rotation(const StateVector& psi, double theta) {
  CVector out = psi.amplitudes();
  for (int n = 0; n < out.size(); ++n) out[n] *= std::polar(1.0, -theta * n);
  return StateVector(std::move(out));
}

DensityMatrix phase_rotation(const DensityMatrix& rho, double theta) {
  const int d = rho.dim();
  CMatrix out = rho.entries();
  for (int k = 0; k < d; ++k) {
    for (int j = 0; j < d; ++j) {
      if (j != k) out(j, k) *= std::polar(1.0, -theta * (j - k));
    }
  }
  return DensityMatrix(std::move(out));
}

double expectation(const Operator& op, const DensityMatrix& rho) {
  if (op.dim() != rho.dim()) fail(ErrorCode::InvalidArgument, "operator/density dimension mismatch");
  const Complex value = op.matrix().cwiseProduct(rho.entries().transpose()).sum();
  if (std::abs(value.imag()) > 1e-9 * (1.0 + std::abs(value))) {
    fail(ErrorCode::NonHermitianResult, "expectation has imaginary part " + std::to_string(value.imag()));
  }
  return value.real();
}

PhotonStats photon_stats(const StateVector& psi) {
  double norm = 0.0, m1 = 0.0, m2 = 0.0;
  for (int n = 0; n < psi.dim(); ++n) {
    const double p = psi.population(n);
    norm += p;
    m1 += p * n;
    m2 += p * n * static_cast<double>(n);
  }
  const double mean = m1 / norm;
  return {mean, std::max(0.0, m2 / norm - mean * mean)};
}

PhotonStats photon_stats(const DensityMatrix& rho) {
  double norm = 0.0, m1 = 0.0, m2 = 0.0;
  for (int n = 0; n < rho.dim(); ++n) {
    const double p = rho.population(n);
    norm += p;
    m1 += p * n;
    m2 += p * n * static_cast<double>(n);
  }
  const double mean = m1 / norm;
  return {mean, std::max(0.0, m2 / norm - mean * mean)};
}

double trace_distance(const CMatrix& a, const CMatrix& b) {
  const CMatrix diff = a - b;
  const double frob = diff.norm();
  if (frob == 0.0) return 0.0;
  const CMatrix herm = 0.5 * (diff + diff.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

int tail_levels(int dim) {
  // tiny truncations keep at least the lower half outside the tail
  return std::min(std::max(3, static_cast<int>(std::ceil(0.05 * dim))), std::max(1, dim / 2));
}

}  // namespace echoqm
