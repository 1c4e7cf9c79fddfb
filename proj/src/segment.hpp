#pragma once

// Banded form of one constant-drive segment and its exact spectral propagator.
// The drive couples level j to level j + offset only (offset 1 for the
// single-photon drive, 2 for the two-photon drive), so the Hamiltonian splits
// into `offset` Hermitian tridiagonal blocks on the levels {r, r + offset, ...}.

#include <vector>

#include "echoqm/fock.hpp"
#include "echoqm/pulse.hpp"

namespace echoqm::detail {

struct BandedHamiltonian {
  int dim = 0;
  int offset = 1;
  double kerr = 1.0;
  /// coupling[j] = H(j, j + offset); H(j + offset, j) is its conjugate.
  CVector coupling;
};

BandedHamiltonian banded_segment(DriveKind kind, double u1, double u2, double kerr, int dim);

CMatrix dense(const BandedHamiltonian& h);

/// exp(-i H t) through H = W diag(E) W^dagger with W = sum_b P_b D_b V_b,
/// D_b diagonal phases and V_b real orthogonal. Eigenvector i of block b is
/// stored in the slot of level start_b + i offset, so eigen-frame vectors and
/// matrices keep the d x d Fock layout.
class SpectralPropagator {
 public:
  explicit SpectralPropagator(const BandedHamiltonian& h);

  /// columns <- exp(-i H t) columns.
  void apply(double t, CMatrix& columns) const;

  /// columns <- W^dagger columns.
  void to_eigen(CMatrix& columns) const;
  /// columns <- W columns.
  void from_eigen(CMatrix& columns) const;
  /// Eigenvalue held by each slot.
  const RVector& energies() const noexcept { return energies_; }

 private:
  struct Block {
    int start;
    int count;
    CVector phases;
    RMatrix vectors;
  };
  template <bool Forward>
  void transform(CMatrix& columns) const;

  int dim_;
  int offset_;
  std::vector<Block> blocks_;
  RVector energies_;
  // scratch for transform(); an instance is not shared between threads
  mutable RMatrix re_, im_, re_out_, im_out_;
};

double kerr_coefficient(int kerr_sign, bool zero_kerr_for_testing);

}  // namespace echoqm::detail
