#pragma once

// The four-stage echo experiment: prepare a probe with a random drive, imprint
// exp(-i theta n), run the time-reversed drive, and read out photon-number
// projectors after a depolarizing channel.

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "echoqm/fock.hpp"
#include "echoqm/propagator.hpp"
#include "echoqm/pulse.hpp"

namespace echoqm {

enum class PovmKind { binary, ternary };
enum class FluctuationScope { forward, echo, both };
enum class LossScope { both, forward };

std::string_view to_string(PovmKind kind);
std::string_view to_string(FluctuationScope scope);
std::string_view to_string(LossScope scope);
PovmKind parse_povm_kind(std::string_view text);
FluctuationScope parse_fluctuation_scope(std::string_view text);
LossScope parse_loss_scope(std::string_view text);

/// One experiment. Times in 1/chi, rates and amplitudes in chi.
struct ProtocolConfig {
  int dim = 256;
  DriveKind kind = DriveKind::single_photon;
  double epsilon = 100.0;
  double tau = 0.1;
  double T = 2.0;
  double kappa = 0.0;
  double eps_dp = 1e-3;
  PovmKind povm = PovmKind::binary;
  std::uint64_t seed = 0;
  std::optional<FluctuationSpec> fluctuation;
  FluctuationScope fluctuation_scope = FluctuationScope::both;
  /// Whether photon loss also acts during the echo.
  LossScope loss_scope = LossScope::both;

  /// Throws ConfigValidation (or BadHorizon) on inconsistent fields.
  void validate() const;

  friend bool operator==(const ProtocolConfig&, const ProtocolConfig&) = default;
};

/// Photon-number projectors partitioning the truncated space: outcome k
/// projects on `levels[k]`; the final outcome is everything else.
class PovmSet {
 public:
  PovmSet(PovmKind kind, FockDim dim);

  int size() const noexcept { return static_cast<int>(levels_.size()); }
  int dim() const noexcept { return dim_; }
  const std::vector<int>& levels(int outcome) const { return levels_[outcome]; }
  CMatrix element(int outcome) const;

 private:
  int dim_;
  std::vector<std::vector<int>> levels_;
};

struct ProtocolTrains {
  PulseTrain forward;
  PulseTrain echo;
};

/// The sampled drive and its echo, each with its own noise draw when the
/// config asks for fluctuations.
ProtocolTrains protocol_trains(const ProtocolConfig& config);

/// Probe after the preparation stage. Kept as a state vector when the
/// preparation is unitary.
struct Probe {
  std::variant<StateVector, DensityMatrix> state;
  PropagationReport report;

  bool pure() const { return std::holds_alternative<StateVector>(state); }
  DensityMatrix density() const;
  PhotonStats stats() const;
};

Probe prepare_probe(const ProtocolConfig& config, const PropagationOptions& options = {});

/// (1 - eps_dp) rho + eps_dp I/d.
DensityMatrix depolarize(const DensityMatrix& rho, double eps_dp);

struct ProtocolOutcome {
  std::vector<double> probs;
  std::vector<double> dprobs;
  double n_mean_probe = 0.0;
  double n_var_probe = 0.0;
  PropagationReport report;
};

/// Full pipeline at phase theta. dprobs come from propagating
/// -i[n, rho_theta] through the echo alongside rho_theta.
ProtocolOutcome run_protocol(const ProtocolConfig& config, double theta, const PropagationOptions& options = {});
ProtocolOutcome run_protocol(const ProtocolConfig& config, const Probe& probe, double theta,
                             const PropagationOptions& options = {});

/// dp_n/dtheta at theta0.
std::vector<double> derivative_probabilities(const ProtocolConfig& config, double theta0,
                                             const PropagationOptions& options = {});

/// States at each stage, for inspection.
struct ProtocolStates {
  StateVector initial;
  Probe post_prep;
  std::variant<StateVector, DensityMatrix> post_probe;
  std::variant<StateVector, DensityMatrix> post_echo;
};

ProtocolStates protocol_states(const ProtocolConfig& config, double theta, const PropagationOptions& options = {});

/// Outcome probabilities and slopes as functions of theta, precomputed once per
/// realization. The echo and readout are folded into Heisenberg-picture
/// observables Y_k = E_echo^dagger(M_k); then
///   p_k(theta) = sum_m c_km exp(-i theta m),  c_km = sum_{j-k'=m} Y_k(k', j) rho0(j, k'),
/// which costs O(d) per theta.
class BiasResponse {
 public:
  BiasResponse(const ProtocolConfig& config, const PropagationOptions& options = {});

  struct Point {
    std::vector<double> probs;
    std::vector<double> dprobs;
  };

  Point evaluate(double theta) const;

  const PhotonStats& probe_stats() const noexcept { return stats_; }
  bool probe_pure() const noexcept { return pure_; }
  const PropagationReport& report() const noexcept { return report_; }

 private:
  int dim_ = 0;
  double eps_dp_ = 0.0;
  std::vector<int> outcome_sizes_;
  /// Fourier coefficients c_m, m = 0..d-1, for every outcome except the last.
  std::vector<CVector> coefficients_;
  /// tr rho0; the unresolved outcome takes what the others leave.
  double trace_ = 1.0;
  PhotonStats stats_;
  bool pure_ = true;
  PropagationReport report_;
};

}  // namespace echoqm
