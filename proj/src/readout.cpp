// Heisenberg-picture readout: fold echo, depolarization and the projectors
// into theta-independent Fourier coefficients of p_k(theta).

#include <cmath>

#include "echoqm/errors.hpp"
#include "echoqm/protocol.hpp"

namespace echoqm {

namespace {

// c_m = sum_k g_{k+m} conj(g_k), m = 0..d-1
void add_autocorrelation(const CVector& g, CVector& c) {
  const Eigen::Index d = g.size();
  for (Eigen::Index m = 0; m < d; ++m) c[m] += g.head(d - m).dot(g.tail(d - m));  // dot conjugates its left operand
}

// c_m = sum_k Y(k, k+m) rho(k+m, k), m = 0..d-1
void add_band_products(const CMatrix& y, const CMatrix& rho, CVector& c) {
  const Eigen::Index d = y.rows();
  for (Eigen::Index m = 0; m < d; ++m) {
    Complex s = 0.0;
    for (Eigen::Index k = 0; k + m < d; ++k) s += y(k, k + m) * rho(k + m, k);
    c[m] += s;
  }
}

}  // namespace

BiasResponse::BiasResponse(const ProtocolConfig& config, const PropagationOptions& options)
    : dim_(config.dim), eps_dp_(config.eps_dp) {
  const ProtocolTrains trains = protocol_trains(config);
  const PovmSet povm(config.povm, FockDim(config.dim));
  const Probe probe = prepare_probe(config, options);
  stats_ = probe.stats();
  pure_ = probe.pure();
  report_ = probe.report;
  for (int k = 0; k < povm.size(); ++k) outcome_sizes_.push_back(static_cast<int>(povm.levels(k).size()));

  const int d = config.dim;
  const int resolved = povm.size() - 1;
  const double kappa_echo = config.loss_scope == LossScope::both ? config.kappa : 0.0;
  coefficients_.assign(resolved, CVector::Zero(d));

  if (kappa_echo == 0.0) {
    // chi_l = U_echo^dagger |l>, so Y_k = sum_{l in L_k} |chi_l><chi_l|
    int n_cols = 0;
    for (int k = 0; k < resolved; ++k) n_cols += outcome_sizes_[k];
    CMatrix chi = CMatrix::Zero(d, n_cols);
    int col = 0;
    for (int k = 0; k < resolved; ++k) {
      for (int n : povm.levels(k)) chi(n, col++) = 1.0;
    }
    accumulate(report_, propagate_columns(chi, trains.echo, Direction::adjoint, options, 0));
    col = 0;
    if (pure_) {
      const CVector& psi = std::get<StateVector>(probe.state).amplitudes();
      for (int k = 0; k < resolved; ++k) {
        for (int i = 0; i < outcome_sizes_[k]; ++i, ++col) {
          const CVector g = chi.col(col).conjugate().cwiseProduct(psi);
          add_autocorrelation(g, coefficients_[k]);
        }
      }
    } else {
      const CMatrix& rho = std::get<DensityMatrix>(probe.state).entries();
      for (int k = 0; k < resolved; ++k) {
        CMatrix y = CMatrix::Zero(d, d);
        for (int i = 0; i < outcome_sizes_[k]; ++i, ++col) y.noalias() += chi.col(col) * chi.col(col).adjoint();
        add_band_products(y, rho, coefficients_[k]);
      }
    }
  } else {
    std::vector<CMatrix> observables;
    for (int k = 0; k < resolved; ++k) observables.push_back(povm.element(k));
    accumulate(report_, lindblad_apply(observables, trains.echo, kappa_echo, Direction::adjoint, options, false));
    const DensityMatrix rho = probe.density();
    for (int k = 0; k < resolved; ++k) add_band_products(observables[k], rho.entries(), coefficients_[k]);
  }
  trace_ = pure_ ? std::get<StateVector>(probe.state).amplitudes().squaredNorm() : probe.density().trace();
}

BiasResponse::Point BiasResponse::evaluate(double theta) const {
  Point point;
  const int resolved = static_cast<int>(coefficients_.size());
  double p_sum = 0.0, dp_sum = 0.0;
  for (int k = 0; k < resolved; ++k) {
    const CVector& c = coefficients_[k];
    // sum_{m>=1} c_m e^{-i theta m}, with the phase advanced by recurrence
    Complex tail = 0.0, weighted = 0.0;
    const Complex step = std::polar(1.0, -theta);
    Complex phase = 1.0;
    for (Eigen::Index m = 1; m < c.size(); ++m) {
      // re-anchor every 64 terms to keep the recurrence error at rounding level
      phase = (m % 64 == 0) ? std::polar(1.0, -theta * static_cast<double>(m)) : phase * step;
      const Complex term = c[m] * phase;
      tail += term;
      weighted += static_cast<double>(m) * term;
    }
    const double p = c[0].real() + 2.0 * tail.real();
    const double dp = 2.0 * weighted.imag();
    point.probs.push_back(p);
    point.dprobs.push_back(dp);
    p_sum += p;
    dp_sum += dp;
  }
  point.probs.push_back(trace_ - p_sum);
  point.dprobs.push_back(-dp_sum);
  for (std::size_t k = 0; k < point.probs.size(); ++k) {
    point.probs[k] = (1.0 - eps_dp_) * point.probs[k] + eps_dp_ * outcome_sizes_[k] / static_cast<double>(dim_);
    point.dprobs[k] *= 1.0 - eps_dp_;
  }
  return point;
}

}  // namespace echoqm
