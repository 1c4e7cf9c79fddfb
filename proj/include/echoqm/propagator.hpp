#pragma once

// Time evolution under a PulseTrain. chi = 1 fixes the units: the Kerr term
// of every segment is kerr_sign * n^2.

#include <utility>
#include <vector>

#include "echoqm/fock.hpp"
#include "echoqm/pulse.hpp"

namespace echoqm {

struct HamiltonianSegment {
  Operator H;
  double duration;
};

struct PropagationReport {
  /// Largest population found on the top 5% of levels at any segment boundary.
  double final_tail_population = 0.0;
  double norm_defect = 0.0;
  int substeps_used = 0;
};

struct PropagationOptions {
  /// Drops the Kerr term. Only meant for analytic oracle tests.
  bool zero_kerr_for_testing = false;
  double tail_threshold = 1e-6;
  /// Per-segment step-halving target for the Lindblad integrator (trace distance).
  double lindblad_tolerance = 1e-9;
  /// Runs the accepted Lindblad substep count times this factor.
  int substep_multiplier = 1;
  int max_substeps_per_segment = 1 << 20;
};

/// Merges a later report into an accumulated one.
void accumulate(PropagationReport& total, const PropagationReport& part);

/// H = s n^2 + u1 (a^dagger + a) + i u2 (a^dagger - a) for the single-photon drive,
/// H = s n^2 + u a^dagger^2 + conj(u) a^2 with u = u1 + i u2 for the two-photon drive,
/// where s = kerr_sign.
HamiltonianSegment build_segment(DriveKind kind, double u1, double u2, int kerr_sign, FockDim dim,
                                 double tau, bool zero_kerr_for_testing = false);

std::pair<StateVector, PropagationReport> evolve_unitary(const StateVector& state, const PulseTrain& train,
                                                         const PropagationOptions& options = {});

std::pair<DensityMatrix, PropagationReport> evolve_unitary_channel(const DensityMatrix& rho,
                                                                   const PulseTrain& train,
                                                                   const PropagationOptions& options = {});

/// Integrates d rho/dt = -i[H, rho] + kappa (a rho a^dagger - {n, rho}/2) segment by segment.
std::pair<DensityMatrix, PropagationReport> evolve_lindblad(const DensityMatrix& rho, const PulseTrain& train,
                                                            double kappa, const PropagationOptions& options = {});

enum class Direction {
  /// Schroedinger picture, segments in order.
  forward,
  /// Adjoint map: U^dagger for the unitary path, the Heisenberg-picture dual channel
  /// for the Lindblad path. Segments run in reverse order.
  adjoint,
};

/// Applies the train's unitary (or its adjoint) to every column. The tail guard
/// watches the first `guarded_columns` columns.
PropagationReport propagate_columns(CMatrix& columns, const PulseTrain& train, Direction direction,
                                    const PropagationOptions& options, int guarded_columns);

/// Conjugates every operator by the train's unitary: X -> U X U^dagger. The tail
/// guard watches the diagonal of operators[0] when `guard_first` is set.
PropagationReport unitary_conjugate(std::vector<CMatrix>& operators, const PulseTrain& train,
                                    const PropagationOptions& options, bool guard_first);

/// Applies the Lindblad channel (or its dual) to every operator in `operators`,
/// sharing one adaptive substep schedule. The tail guard watches operators[0]
/// when `guard_first` is set.
PropagationReport lindblad_apply(std::vector<CMatrix>& operators, const PulseTrain& train, double kappa,
                                 Direction direction, const PropagationOptions& options, bool guard_first);

}  // namespace echoqm
