#pragma once

// Random piecewise-constant drive trains. Times are in units of 1/chi and
// amplitudes in units of chi.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace echoqm {

enum class DriveKind { single_photon, two_photon };

std::string_view to_string(DriveKind kind);
DriveKind parse_drive_kind(std::string_view text);

/// Quadratures per step: (u1, u2) for the single-photon drive, (re u_tp, im u_tp)
/// for the two-photon drive. kerr_sign is -1 on echo schedules.
struct PulseTrain {
  DriveKind kind = DriveKind::single_photon;
  double tau = 0.1;
  int n_steps = 0;
  std::vector<double> u1;
  std::vector<double> u2;
  double epsilon = 0.0;
  int kerr_sign = 1;
  std::uint64_t seed = 0;
  /// Standard deviation of injected control noise, 0 when none was added.
  double delta_eps = 0.0;

  double duration() const { return tau * n_steps; }
  /// Bound every stored quadrature respects: epsilon, widened by 6 delta_eps once noise is injected.
  double amplitude_bound() const { return epsilon + 6.0 * delta_eps; }

  friend bool operator==(const PulseTrain&, const PulseTrain&) = default;
};

struct FluctuationSpec {
  double delta_eps = 0.0;
  std::uint64_t seed = 0;

  friend bool operator==(const FluctuationSpec&, const FluctuationSpec&) = default;
};

/// Number of steps for horizon T; throws BadHorizon unless T/tau is an integer to 1e-6.
int commensurate_steps(double T, double tau);

/// Independent uniform draws on [-epsilon, epsilon] for both quadratures of every step.
PulseTrain sample_train(DriveKind kind, double epsilon, double tau, double T, std::uint64_t seed);

/// Adds independent N(0, delta_eps^2) noise to every quadrature, clipped at 6 delta_eps.
PulseTrain inject_fluctuations(const PulseTrain& train, const FluctuationSpec& spec);

/// Schedule for H'(t) = -H(T - t): steps reversed and negated, Kerr sign flipped.
PulseTrain echo_schedule(const PulseTrain& train);

}  // namespace echoqm
