// Lindblad propagation with single-photon loss.
//
// Within a segment H is constant, so the master equation is integrated in the
// eigenbasis of H: there the commutator is the elementwise factor
// exp(-i (E_j - E_k) t), applied exactly, and only the loss dissipator goes
// through classical RK4 (Lawson / integrating-factor RK4). The dissipator is
// evaluated in the Fock basis, one basis change each way. Its rate is
// kappa d, so a few substeps per segment suffice; the count doubles until two
// consecutive refinements agree to the requested trace distance.

#include <algorithm>
#include <cmath>
#include <string>

#include "echoqm/errors.hpp"
#include "echoqm/propagator.hpp"
#include "segment.hpp"

namespace echoqm {

namespace {

class LindbladSegment {
 public:
  LindbladSegment(const detail::BandedHamiltonian& h, double kappa, Direction direction)
      : basis_(h), kappa_(kappa), adjoint_(direction == Direction::adjoint), dim_(h.dim) {
    jump_weight_.resize(dim_ - 1, dim_ - 1);
    decay_.resize(dim_, dim_);
    for (int k = 0; k < dim_; ++k) {
      for (int j = 0; j < dim_; ++j) {
        decay_(j, k) = -0.5 * kappa_ * (j + k);
        if (j < dim_ - 1 && k < dim_ - 1) jump_weight_(j, k) = kappa_ * std::sqrt((j + 1.0) * (k + 1.0));
      }
    }
  }

  /// X <- W^dagger X W.
  void to_eigen(CMatrix& x) const {
    basis_.to_eigen(x);
    x.adjointInPlace();
    basis_.to_eigen(x);
    x.adjointInPlace();
  }

  /// X <- W X W^dagger.
  void from_eigen(CMatrix& x) const {
    basis_.from_eigen(x);
    x.adjointInPlace();
    basis_.from_eigen(x);
    x.adjointInPlace();
  }

  /// exp(-+i (E_j - E_k) dt), the exact commutator flow in the eigenframe.
  CMatrix phase_factor(double dt) const {
    const RVector& e = basis_.energies();
    const double sign = adjoint_ ? -1.0 : 1.0;
    CMatrix f(dim_, dim_);
    for (int k = 0; k < dim_; ++k) {
      for (int j = 0; j < dim_; ++j) f(j, k) = std::polar(1.0, -sign * (e[j] - e[k]) * dt);
    }
    return f;
  }

  /// Dissipator in the eigenframe: kappa (a x a^dagger - {n, x}/2), or its dual.
  void dissipator(const CMatrix& x, CMatrix& out) {
    fock_ = x;
    from_eigen(fock_);
    const int m = dim_ - 1;
    out = decay_.cwiseProduct(fock_);
    if (!adjoint_) {
      out.topLeftCorner(m, m) += jump_weight_.cwiseProduct(fock_.bottomRightCorner(m, m));
    } else {
      out.bottomRightCorner(m, m) += jump_weight_.cwiseProduct(fock_.topLeftCorner(m, m));
    }
    to_eigen(out);
  }

  void step(CMatrix& y, double dt, const CMatrix& half, const CMatrix& full) {
    dissipator(y, k1_);
    tmp_ = half.cwiseProduct(y + (0.5 * dt) * k1_);
    dissipator(tmp_, k2_);
    tmp_ = half.cwiseProduct(y) + (0.5 * dt) * k2_;
    dissipator(tmp_, k3_);
    tmp_ = full.cwiseProduct(y) + dt * half.cwiseProduct(k3_);
    dissipator(tmp_, k4_);
    y = full.cwiseProduct(y + (dt / 6.0) * k1_) + (dt / 6.0) * (2.0 * half.cwiseProduct(k2_ + k3_) + k4_);
  }

  /// Integrates every eigenframe operator over `duration` with n equal substeps.
  void integrate(std::vector<CMatrix>& ops, double duration, int n) {
    const double dt = duration / n;
    const CMatrix half = phase_factor(0.5 * dt), full = phase_factor(dt);
    for (CMatrix& y : ops) {
      for (int i = 0; i < n; ++i) step(y, dt, half, full);
    }
  }

  void rotate(std::vector<CMatrix>& ops, double duration) const {
    const CMatrix f = phase_factor(duration);
    for (CMatrix& y : ops) y = f.cwiseProduct(y);
  }

 private:
  detail::SpectralPropagator basis_;
  double kappa_;
  bool adjoint_;
  int dim_;
  RMatrix jump_weight_;
  RMatrix decay_;
  CMatrix fock_, k1_, k2_, k3_, k4_, tmp_;
};

double max_trace_distance(const std::vector<CMatrix>& a, const std::vector<CMatrix>& b, bool exact) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i].rows());
    // 0.5 ||x||_1 <= 0.5 sqrt(d) ||x||_F
    worst = std::max(worst, exact ? trace_distance(a[i], b[i]) : 0.5 * std::sqrt(d) * (a[i] - b[i]).norm());
  }
  return worst;
}

double diagonal_tail(const CMatrix& x) {
  const int d = static_cast<int>(x.rows());
  double tail = 0.0;
  for (int n = d - tail_levels(d); n < d; ++n) tail += std::abs(x(n, n).real());
  const double total = std::abs(x.trace().real());
  return total > 0.0 ? tail / total : tail;
}

}  // namespace

PropagationReport lindblad_apply(std::vector<CMatrix>& operators, const PulseTrain& train, double kappa,
                                 Direction direction, const PropagationOptions& options, bool guard_first) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) fail(ErrorCode::InvalidArgument, "kappa must be >= 0");
  if (train.n_steps < 1 || static_cast<int>(train.u1.size()) != train.n_steps ||
      static_cast<int>(train.u2.size()) != train.n_steps) {
    fail(ErrorCode::InvalidArgument, "malformed pulse train");
  }
  if (operators.empty()) return {};
  const int d = static_cast<int>(operators[0].rows());
  const double kerr = detail::kerr_coefficient(train.kerr_sign, options.zero_kerr_for_testing);
  const double trace_in = operators[0].trace().real();
  const int multiplier = std::max(1, options.substep_multiplier);

  PropagationReport report;
  int n = std::max(1, static_cast<int>(std::ceil(train.tau * kappa * d)));
  for (int step = 0; step < train.n_steps; ++step) {
    const int k = direction == Direction::forward ? step : train.n_steps - 1 - step;
    LindbladSegment seg(detail::banded_segment(train.kind, train.u1[k], train.u2[k], kerr, d), kappa, direction);
    for (CMatrix& x : operators) seg.to_eigen(x);

    if (kappa == 0.0) {
      seg.rotate(operators, train.tau);
      report.substeps_used += 1;
    } else {
      std::vector<CMatrix> coarse = operators;
      seg.integrate(coarse, train.tau, n);
      int used = n;
      while (true) {
        std::vector<CMatrix> fine = operators;
        seg.integrate(fine, train.tau, 2 * n);
        used += 2 * n;
        double diff = max_trace_distance(coarse, fine, false);
        if (diff > options.lindblad_tolerance) diff = max_trace_distance(coarse, fine, true);
        if (diff <= options.lindblad_tolerance) {
          if (multiplier > 1) {
            fine = operators;
            seg.integrate(fine, train.tau, 2 * n * multiplier);
            used += 2 * n * multiplier;
          }
          operators = std::move(fine);
          break;
        }
        if (2 * n >= options.max_substeps_per_segment) {
          fail(ErrorCode::ConvergenceFailure, "Lindblad step halving did not converge in segment " +
                                                  std::to_string(k) + " (disagreement " + std::to_string(diff) + ")");
        }
        n *= 2;
        coarse = std::move(fine);
      }
      report.substeps_used += used;
    }

    for (CMatrix& x : operators) seg.from_eigen(x);
    if (guard_first) {
      const double tail = diagonal_tail(operators[0]);
      report.final_tail_population = std::max(report.final_tail_population, tail);
      if (tail > options.tail_threshold) {
        fail(ErrorCode::TruncationOverflow, "tail population " + std::to_string(tail) + " after segment " +
                                                std::to_string(k) + "; increase the Fock dimension");
      }
    }
  }
  if (direction == Direction::forward) report.norm_defect = std::abs(operators[0].trace().real() - trace_in);
  return report;
}

}  // namespace echoqm
