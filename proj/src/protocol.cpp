#include "echoqm/protocol.hpp"

#include <cmath>
#include <string>

#include "echoqm/errors.hpp"
#include "echoqm/rng.hpp"

namespace echoqm {

std::string_view to_string(PovmKind kind) { return kind == PovmKind::binary ? "binary" : "ternary"; }

std::string_view to_string(FluctuationScope scope) {
  switch (scope) {
    case FluctuationScope::forward: return "forward";
    case FluctuationScope::echo: return "echo";
    case FluctuationScope::both: return "both";
  }
  return "both";
}

std::string_view to_string(LossScope scope) { return scope == LossScope::both ? "both" : "forward"; }

PovmKind parse_povm_kind(std::string_view text) {
  if (text == "binary") return PovmKind::binary;
  if (text == "ternary") return PovmKind::ternary;
  fail(ErrorCode::ConfigValidation, "unknown povm '" + std::string(text) + "'");
}

FluctuationScope parse_fluctuation_scope(std::string_view text) {
  if (text == "forward") return FluctuationScope::forward;
  if (text == "echo") return FluctuationScope::echo;
  if (text == "both") return FluctuationScope::both;
  fail(ErrorCode::ConfigValidation, "unknown fluctuation_scope '" + std::string(text) + "'");
}

LossScope parse_loss_scope(std::string_view text) {
  if (text == "both") return LossScope::both;
  if (text == "forward") return LossScope::forward;
  fail(ErrorCode::ConfigValidation, "unknown loss_scope '" + std::string(text) + "'");
}

void ProtocolConfig::validate() const {
  auto invalid = [](const std::string& what) { fail(ErrorCode::ConfigValidation, what); };
  if (dim < 2) invalid("dim must be >= 2");
  if (!std::isfinite(epsilon) || epsilon < 0.0) invalid("epsilon must be finite and >= 0");
  if (!std::isfinite(tau) || tau <= 0.0) invalid("tau must be finite and > 0");
  if (!std::isfinite(kappa) || kappa < 0.0) invalid("kappa must be finite and >= 0");
  if (!std::isfinite(eps_dp) || eps_dp < 0.0 || eps_dp > 1.0) invalid("eps_dp must lie in [0, 1]");
  if (povm == PovmKind::ternary && kind != DriveKind::two_photon) {
    invalid("the ternary povm is only defined for the two_photon drive");
  }
  if (fluctuation && (!std::isfinite(fluctuation->delta_eps) || fluctuation->delta_eps < 0.0)) {
    invalid("fluctuation.delta_eps must be finite and >= 0");
  }
  commensurate_steps(T, tau);
}

PovmSet::PovmSet(PovmKind kind, FockDim dim) : dim_(dim.value()) {
  const int d = dim.value();
  const int resolved = kind == PovmKind::binary ? 1 : 2;
  if (resolved >= d) fail(ErrorCode::InvalidArgument, "Fock dimension too small for the povm");
  for (int k = 0; k < resolved; ++k) levels_.push_back({k});
  std::vector<int> rest;
  for (int n = resolved; n < d; ++n) rest.push_back(n);
  levels_.push_back(std::move(rest));
}

CMatrix PovmSet::element(int outcome) const {
  CMatrix m = CMatrix::Zero(dim_, dim_);
  for (int n : levels_.at(outcome)) m(n, n) = 1.0;
  return m;
}

ProtocolTrains protocol_trains(const ProtocolConfig& config) {
  config.validate();
  const PulseTrain base = sample_train(config.kind, config.epsilon, config.tau, config.T, config.seed);
  ProtocolTrains trains{base, echo_schedule(base)};
  if (config.fluctuation && config.fluctuation->delta_eps > 0.0) {
    const FluctuationSpec& spec = *config.fluctuation;
    if (config.fluctuation_scope != FluctuationScope::echo) trains.forward = inject_fluctuations(base, spec);
    if (config.fluctuation_scope != FluctuationScope::forward) {
      // independent draw for the echo pass
      const FluctuationSpec echo_spec{spec.delta_eps, rng::mix64(spec.seed ^ 0xec0ec0ec0ec0ec0eULL)};
      trains.echo = inject_fluctuations(trains.echo, echo_spec);
    }
  }
  return trains;
}

DensityMatrix Probe::density() const {
  if (const auto* psi = std::get_if<StateVector>(&state)) return DensityMatrix::pure(*psi);
  return std::get<DensityMatrix>(state);
}

PhotonStats Probe::stats() const {
  return std::visit([](const auto& s) { return photon_stats(s); }, state);
}

Probe prepare_probe(const ProtocolConfig& config, const PropagationOptions& options) {
  const ProtocolTrains trains = protocol_trains(config);
  const FockDim dim(config.dim);
  if (config.kappa == 0.0) {
    auto [psi, report] = evolve_unitary(vacuum(dim), trains.forward, options);
    return Probe{std::move(psi), report};
  }
  auto [rho, report] = evolve_lindblad(DensityMatrix::pure(vacuum(dim)), trains.forward, config.kappa, options);
  return Probe{std::move(rho), report};
}

DensityMatrix depolarize(const DensityMatrix& rho, double eps_dp) {
  if (!(eps_dp >= 0.0 && eps_dp <= 1.0)) fail(ErrorCode::InvalidArgument, "eps_dp must lie in [0, 1]");
  const int d = rho.dim();
  CMatrix out = (1.0 - eps_dp) * rho.entries();
  out.diagonal().array() += eps_dp / d;
  return DensityMatrix(std::move(out));
}

namespace {

double echo_kappa(const ProtocolConfig& config) {
  return config.loss_scope == LossScope::both ? config.kappa : 0.0;
}

// -i [n, x]
CMatrix number_commutator(const CMatrix& x) {
  CMatrix out = x;
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    for (Eigen::Index j = 0; j < x.rows(); ++j) out(j, k) *= Complex(0.0, -static_cast<double>(j - k));
  }
  return out;
}

// Readout of a final density matrix and its theta-derivative, followed by depolarization.
void read_out(const PovmSet& povm, double eps_dp, const CMatrix& rho_f, const CMatrix& sigma_f,
              ProtocolOutcome& outcome) {
  const double d = povm.dim();
  for (int k = 0; k < povm.size(); ++k) {
    double p = 0.0, dp = 0.0;
    for (int n : povm.levels(k)) {
      p += rho_f(n, n).real();
      dp += sigma_f(n, n).real();
    }
    outcome.probs.push_back((1.0 - eps_dp) * p + eps_dp * povm.levels(k).size() / d);
    outcome.dprobs.push_back((1.0 - eps_dp) * dp);
  }
}

}  // namespace

ProtocolOutcome run_protocol(const ProtocolConfig& config, double theta, const PropagationOptions& options) {
  return run_protocol(config, prepare_probe(config, options), theta, options);
}

ProtocolOutcome run_protocol(const ProtocolConfig& config, const Probe& probe, double theta,
                             const PropagationOptions& options) {
  const ProtocolTrains trains = protocol_trains(config);
  const PovmSet povm(config.povm, FockDim(config.dim));
  const double kappa_echo = echo_kappa(config);

  ProtocolOutcome outcome;
  const PhotonStats stats = probe.stats();
  outcome.n_mean_probe = stats.mean;
  outcome.n_var_probe = stats.variance;
  outcome.report = probe.report;

  if (probe.pure() && kappa_echo == 0.0) {
    // vector route: propagate psi_theta and d psi_theta / d theta = -i n psi_theta together
    const StateVector psi = phase_rotation(std::get<StateVector>(probe.state), theta);
    CMatrix cols(config.dim, 2);
    cols.col(0) = psi.amplitudes();
    for (int n = 0; n < config.dim; ++n) cols(n, 1) = Complex(0.0, -static_cast<double>(n)) * psi[n];
    accumulate(outcome.report, propagate_columns(cols, trains.echo, Direction::forward, options, 1));
    const double d = config.dim;
    for (int k = 0; k < povm.size(); ++k) {
      double p = 0.0, dp = 0.0;
      for (int n : povm.levels(k)) {
        p += std::norm(cols(n, 0));
        dp += 2.0 * (std::conj(cols(n, 0)) * cols(n, 1)).real();
      }
      outcome.probs.push_back((1.0 - config.eps_dp) * p + config.eps_dp * povm.levels(k).size() / d);
      outcome.dprobs.push_back((1.0 - config.eps_dp) * dp);
    }
    return outcome;
  }

  const DensityMatrix rho_theta = phase_rotation(probe.density(), theta);
  std::vector<CMatrix> ops{rho_theta.entries(), number_commutator(rho_theta.entries())};
  if (kappa_echo == 0.0) {
    accumulate(outcome.report, unitary_conjugate(ops, trains.echo, options, true));
  } else {
    accumulate(outcome.report, lindblad_apply(ops, trains.echo, kappa_echo, Direction::forward, options, true));
  }
  read_out(povm, config.eps_dp, ops[0], ops[1], outcome);
  return outcome;
}

std::vector<double> derivative_probabilities(const ProtocolConfig& config, double theta0,
                                             const PropagationOptions& options) {
  return run_protocol(config, theta0, options).dprobs;
}

ProtocolStates protocol_states(const ProtocolConfig& config, double theta, const PropagationOptions& options) {
  const FockDim dim(config.dim);
  const ProtocolTrains trains = protocol_trains(config);
  Probe probe = prepare_probe(config, options);
  const double kappa_echo = echo_kappa(config);

  std::variant<StateVector, DensityMatrix> probed = std::visit(
      [&](const auto& s) -> std::variant<StateVector, DensityMatrix> { return phase_rotation(s, theta); },
      probe.state);
  std::variant<StateVector, DensityMatrix> echoed = probed;
  if (const auto* psi = std::get_if<StateVector>(&probed); psi && kappa_echo == 0.0) {
    echoed = evolve_unitary(*psi, trains.echo, options).first;
  } else {
    const DensityMatrix rho = std::visit(
        [](const auto& s) {
          if constexpr (std::is_same_v<std::decay_t<decltype(s)>, StateVector>) return DensityMatrix::pure(s);
          else return s;
        },
        probed);
    echoed = kappa_echo == 0.0 ? evolve_unitary_channel(rho, trains.echo, options).first
                               : evolve_lindblad(rho, trains.echo, kappa_echo, options).first;
  }
  return ProtocolStates{vacuum(dim), std::move(probe), std::move(probed), std::move(echoed)};
}

}  // namespace echoqm
