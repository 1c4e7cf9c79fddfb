#include "echoqm/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "echoqm/errors.hpp"
#include "echoqm/spectral.hpp"
#include "segment.hpp"

namespace echoqm {

namespace detail {

double kerr_coefficient(int kerr_sign, bool zero_kerr_for_testing) {
  return zero_kerr_for_testing ? 0.0 : static_cast<double>(kerr_sign);
}

BandedHamiltonian banded_segment(DriveKind kind, double u1, double u2, double kerr, int dim) {
  BandedHamiltonian h;
  h.dim = dim;
  h.kerr = kerr;
  if (kind == DriveKind::single_photon) {
    // H(j, j+1) = (u1 - i u2) sqrt(j+1)
    h.offset = 1;
    h.coupling.resize(dim - 1);
    const Complex u(u1, -u2);
    for (int j = 0; j < dim - 1; ++j) h.coupling[j] = u * std::sqrt(static_cast<double>(j + 1));
  } else {
    // H(j, j+2) = conj(u_tp) sqrt((j+1)(j+2))
    h.offset = 2;
    h.coupling.resize(std::max(0, dim - 2));
    const Complex u(u1, -u2);
    for (int j = 0; j < dim - 2; ++j) {
      h.coupling[j] = u * std::sqrt(static_cast<double>(j + 1) * (j + 2));
    }
  }
  return h;
}

CMatrix dense(const BandedHamiltonian& h) {
  CMatrix m = CMatrix::Zero(h.dim, h.dim);
  for (int n = 0; n < h.dim; ++n) m(n, n) = h.kerr * n * static_cast<double>(n);
  for (int j = 0; j < h.coupling.size(); ++j) {
    m(j, j + h.offset) = h.coupling[j];
    m(j + h.offset, j) = std::conj(h.coupling[j]);
  }
  return m;
}

SpectralPropagator::SpectralPropagator(const BandedHamiltonian& h)
    : dim_(h.dim), offset_(h.offset), energies_(h.dim) {
  for (int start = 0; start < offset_ && start < dim_; ++start) {
    Block block;
    block.start = start;
    block.count = (dim_ - start + offset_ - 1) / offset_;
    const int m = block.count;
    RVector diag(m);
    RVector off(std::max(0, m - 1));
    block.phases.resize(m);
    double psi = 0.0;
    for (int i = 0; i < m; ++i) {
      const int level = start + i * offset_;
      diag[i] = h.kerr * level * static_cast<double>(level);
      block.phases[i] = std::polar(1.0, psi);
      if (i + 1 < m) {
        const Complex b = h.coupling[level];
        off[i] = std::abs(b);
        // D^dagger T D has real non-negative couplings when psi_{i+1} = psi_i - arg(b_i)
        psi -= std::arg(b);
      }
    }
    TridiagonalEigen eig = tridiagonal_eigen(diag, off);
    for (int i = 0; i < m; ++i) energies_[start + i * offset_] = eig.values[i];
    block.vectors = std::move(eig.vectors);
    blocks_.push_back(std::move(block));
  }
}

template <bool Forward>
void SpectralPropagator::transform(CMatrix& columns) const {
  // Forward: W^dagger = V^T D^dagger; otherwise W = D V
  const Eigen::Index ncols = columns.cols();
  for (const Block& b : blocks_) {
    RMatrix& re = re_;
    RMatrix& im = im_;
    re.resize(b.count, ncols);
    im.resize(b.count, ncols);
    for (int i = 0; i < b.count; ++i) {
      const Complex ph = Forward ? std::conj(b.phases[i]) : Complex(1.0);
      for (Eigen::Index c = 0; c < ncols; ++c) {
        const Complex v = ph * columns(b.start + i * offset_, c);
        re(i, c) = v.real();
        im(i, c) = v.imag();
      }
    }
    RMatrix& re_out = re_out_;
    RMatrix& im_out = im_out_;
    re_out.resize(b.count, ncols);
    im_out.resize(b.count, ncols);
    if constexpr (Forward) {
      re_out.noalias() = b.vectors.transpose() * re;
      im_out.noalias() = b.vectors.transpose() * im;
    } else {
      re_out.noalias() = b.vectors * re;
      im_out.noalias() = b.vectors * im;
    }
    for (int i = 0; i < b.count; ++i) {
      const Complex ph = Forward ? Complex(1.0) : b.phases[i];
      for (Eigen::Index c = 0; c < ncols; ++c) {
        columns(b.start + i * offset_, c) = ph * Complex(re_out(i, c), im_out(i, c));
      }
    }
  }
}

void SpectralPropagator::to_eigen(CMatrix& columns) const { transform<true>(columns); }

void SpectralPropagator::from_eigen(CMatrix& columns) const { transform<false>(columns); }

void SpectralPropagator::apply(double t, CMatrix& columns) const {
  to_eigen(columns);
  for (int n = 0; n < dim_; ++n) columns.row(n) *= std::polar(1.0, -energies_[n] * t);
  from_eigen(columns);
}

}  // namespace detail

namespace {

double tail_population(const CVector& x) {
  const int d = static_cast<int>(x.size());
  const int tail = tail_levels(d);
  const double total = x.squaredNorm();
  if (total == 0.0) return 0.0;
  return x.tail(tail).squaredNorm() / total;
}

void check_tail(double tail, const PropagationOptions& options, int segment) {
  if (tail > options.tail_threshold) {
    fail(ErrorCode::TruncationOverflow, "tail population " + std::to_string(tail) + " above " +
                                            std::to_string(options.tail_threshold) + " after segment " +
                                            std::to_string(segment) + "; increase the Fock dimension");
  }
}

void check_train(const PulseTrain& train) {
  if (train.n_steps < 1 || static_cast<int>(train.u1.size()) != train.n_steps ||
      static_cast<int>(train.u2.size()) != train.n_steps || !(train.tau > 0.0)) {
    fail(ErrorCode::InvalidArgument, "malformed pulse train");
  }
}

}  // namespace

void accumulate(PropagationReport& total, const PropagationReport& part) {
  total.final_tail_population = std::max(total.final_tail_population, part.final_tail_population);
  total.norm_defect = std::max(total.norm_defect, part.norm_defect);
  total.substeps_used += part.substeps_used;
}

HamiltonianSegment build_segment(DriveKind kind, double u1, double u2, int kerr_sign, FockDim dim,
                                 double tau, bool zero_kerr_for_testing) {
  const auto banded = detail::banded_segment(kind, u1, u2, detail::kerr_coefficient(kerr_sign, zero_kerr_for_testing),
                                             dim.value());
  return {Operator(detail::dense(banded), OperatorTag::custom), tau};
}

PropagationReport propagate_columns(CMatrix& columns, const PulseTrain& train, Direction direction,
                                    const PropagationOptions& options, int guarded_columns) {
  check_train(train);
  const int d = static_cast<int>(columns.rows());
  const double kerr = detail::kerr_coefficient(train.kerr_sign, options.zero_kerr_for_testing);
  const Eigen::VectorXd norms_in = columns.colwise().norm();
  PropagationReport report;
  for (int step = 0; step < train.n_steps; ++step) {
    const int k = direction == Direction::forward ? step : train.n_steps - 1 - step;
    const auto h = detail::banded_segment(train.kind, train.u1[k], train.u2[k], kerr, d);
    // exp(-iH tau) forward; its adjoint exp(+iH tau) backward
    const double t = direction == Direction::forward ? train.tau : -train.tau;
    detail::SpectralPropagator(h).apply(t, columns);
    ++report.substeps_used;
    for (int c = 0; c < guarded_columns && c < columns.cols(); ++c) {
      const double tail = tail_population(columns.col(c));
      report.final_tail_population = std::max(report.final_tail_population, tail);
      check_tail(tail, options, k);
    }
  }
  const Eigen::VectorXd norms_out = columns.colwise().norm();
  for (Eigen::Index c = 0; c < columns.cols(); ++c) {
    const double scale = std::max(1.0, norms_in[c]);
    report.norm_defect = std::max(report.norm_defect, std::abs(norms_out[c] - norms_in[c]) / scale);
  }
  if (report.norm_defect > 1e-9) {
    fail(ErrorCode::ConvergenceFailure, "unitary propagation lost norm (" + std::to_string(report.norm_defect) + ")");
  }
  return report;
}

std::pair<StateVector, PropagationReport> evolve_unitary(const StateVector& state, const PulseTrain& train,
                                                         const PropagationOptions& options) {
  CMatrix cols = state.amplitudes();
  PropagationReport report = propagate_columns(cols, train, Direction::forward, options, 1);
  return {StateVector(cols.col(0)), report};
}

PropagationReport unitary_conjugate(std::vector<CMatrix>& operators, const PulseTrain& train,
                                    const PropagationOptions& options, bool guard_first) {
  check_train(train);
  PropagationReport report;
  if (operators.empty()) return report;
  const int d = static_cast<int>(operators[0].rows());
  const double kerr = detail::kerr_coefficient(train.kerr_sign, options.zero_kerr_for_testing);
  const double trace_in = operators[0].trace().real();
  for (int k = 0; k < train.n_steps; ++k) {
    const detail::SpectralPropagator u(detail::banded_segment(train.kind, train.u1[k], train.u2[k], kerr, d));
    for (CMatrix& x : operators) {
      u.apply(train.tau, x);  // U X
      x.adjointInPlace();     // X^dagger U^dagger
      u.apply(train.tau, x);  // U X^dagger U^dagger
      x.adjointInPlace();
    }
    ++report.substeps_used;
    if (guard_first) {
      const CMatrix& x = operators[0];
      double tail = 0.0;
      for (int n = d - tail_levels(d); n < d; ++n) tail += std::abs(x(n, n).real());
      tail /= std::max(1e-300, std::abs(x.trace().real()));
      report.final_tail_population = std::max(report.final_tail_population, tail);
      check_tail(tail, options, k);
    }
  }
  report.norm_defect = std::abs(operators[0].trace().real() - trace_in);
  if (report.norm_defect > 1e-9 * std::max(1.0, std::abs(trace_in))) {
    fail(ErrorCode::ConvergenceFailure, "unitary channel lost trace (" + std::to_string(report.norm_defect) + ")");
  }
  return report;
}

std::pair<DensityMatrix, PropagationReport> evolve_unitary_channel(const DensityMatrix& rho,
                                                                   const PulseTrain& train,
                                                                   const PropagationOptions& options) {
  std::vector<CMatrix> ops{rho.entries()};
  PropagationReport report = unitary_conjugate(ops, train, options, true);
  return {DensityMatrix(std::move(ops[0])), report};
}

std::pair<DensityMatrix, PropagationReport> evolve_lindblad(const DensityMatrix& rho, const PulseTrain& train,
                                                            double kappa, const PropagationOptions& options) {
  std::vector<CMatrix> ops{rho.entries()};
  PropagationReport report = lindblad_apply(ops, train, kappa, Direction::forward, options, true);
  return {DensityMatrix(std::move(ops[0])), report};
}

}  // namespace echoqm
