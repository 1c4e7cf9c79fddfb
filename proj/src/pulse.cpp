#include "echoqm/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "echoqm/errors.hpp"
#include "echoqm/rng.hpp"

namespace echoqm {

namespace {

// rng streams, one per quadrature and purpose
constexpr std::uint64_t kStreamU1 = 0;
constexpr std::uint64_t kStreamU2 = 1;
constexpr std::uint64_t kStreamNoiseU1 = 2;
constexpr std::uint64_t kStreamNoiseU2 = 3;

}  // namespace

std::string_view to_string(DriveKind kind) {
  return kind == DriveKind::single_photon ? "single_photon" : "two_photon";
}

DriveKind parse_drive_kind(std::string_view text) {
  if (text == "single_photon") return DriveKind::single_photon;
  if (text == "two_photon") return DriveKind::two_photon;
  fail(ErrorCode::ConfigValidation, "unknown drive kind '" + std::string(text) + "'");
}

int commensurate_steps(double T, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) fail(ErrorCode::InvalidArgument, "tau must be positive");
  if (!(T >= tau) || !std::isfinite(T)) fail(ErrorCode::BadHorizon, "horizon T must be at least one step tau");
  const double ratio = T / tau;
  const double steps = std::round(ratio);
  if (std::abs(ratio - steps) > 1e-6) {
    std::ostringstream msg;
    msg << "T/tau = " << ratio << " is not an integer";
    fail(ErrorCode::BadHorizon, msg.str());
  }
  return static_cast<int>(steps);
}

PulseTrain sample_train(DriveKind kind, double epsilon, double tau, double T, std::uint64_t seed) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) fail(ErrorCode::InvalidArgument, "epsilon must be >= 0");
  PulseTrain train;
  train.kind = kind;
  train.tau = tau;
  train.n_steps = commensurate_steps(T, tau);
  train.epsilon = epsilon;
  train.seed = seed;
  train.u1.resize(train.n_steps);
  train.u2.resize(train.n_steps);
  for (int k = 0; k < train.n_steps; ++k) {
    const auto idx = static_cast<std::uint64_t>(k);
    train.u1[k] = rng::uniform_symmetric(epsilon, seed, kStreamU1, idx);
    train.u2[k] = rng::uniform_symmetric(epsilon, seed, kStreamU2, idx);
  }
  return train;
}

PulseTrain inject_fluctuations(const PulseTrain& train, const FluctuationSpec& spec) {
  if (!(spec.delta_eps >= 0.0) || !std::isfinite(spec.delta_eps)) {
    fail(ErrorCode::InvalidArgument, "delta_eps must be >= 0");
  }
  if (spec.delta_eps == 0.0) return train;
  PulseTrain out = train;
  const double clip = 6.0 * spec.delta_eps;
  for (int k = 0; k < out.n_steps; ++k) {
    const auto idx = static_cast<std::uint64_t>(k);
    const double d1 = spec.delta_eps * rng::standard_normal(spec.seed, kStreamNoiseU1, idx);
    const double d2 = spec.delta_eps * rng::standard_normal(spec.seed, kStreamNoiseU2, idx);
    out.u1[k] += std::clamp(d1, -clip, clip);
    out.u2[k] += std::clamp(d2, -clip, clip);
  }
  out.delta_eps = train.delta_eps + spec.delta_eps;
  return out;
}

PulseTrain echo_schedule(const PulseTrain& train) {
  PulseTrain out = train;
  const int n = train.n_steps;
  for (int k = 0; k < n; ++k) {
    out.u1[k] = -train.u1[n - 1 - k];
    out.u2[k] = -train.u2[n - 1 - k];
  }
  out.kerr_sign = -train.kerr_sign;
  return out;
}

}  // namespace echoqm
