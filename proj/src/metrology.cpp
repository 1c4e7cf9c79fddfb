#include "echoqm/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "echoqm/errors.hpp"

namespace echoqm {

FisherInformation fisher_information(const std::vector<double>& probs, const std::vector<double>& dprobs) {
  if (probs.size() != dprobs.size() || probs.empty()) {
    fail(ErrorCode::InvalidArgument, "probs and dprobs must be non-empty and of equal length");
  }
  FisherInformation out;
  for (std::size_t n = 0; n < probs.size(); ++n) {
    if (probs[n] > kProbabilityFloor) {
      out.value += dprobs[n] * dprobs[n] / probs[n];
      continue;
    }
    ++out.excluded_outcomes;
    out.excluded_slope = std::max(out.excluded_slope, std::abs(dprobs[n]));
    if (std::abs(dprobs[n]) > 1e-6) {
      fail(ErrorCode::DegenerateDistribution, "outcome " + std::to_string(n) + " has p = " + std::to_string(probs[n]) +
                                                  " but dp/dtheta = " + std::to_string(dprobs[n]));
    }
  }
  return out;
}

double cfi(const std::vector<double>& probs, const std::vector<double>& dprobs) {
  return fisher_information(probs, dprobs).value;
}

double gain(double cfi_value, double n_mean) {
  if (!(n_mean > 1e-12)) fail(ErrorCode::ZeroPhotonProbe, "gain undefined for a probe with <n> = " + std::to_string(n_mean));
  return cfi_value / (4.0 * n_mean);
}

double qfi_pure(const DensityMatrix& probe) {
  const double purity = probe.purity();
  if (!(purity > 1.0 - 1e-6)) fail(ErrorCode::MixedStateInput, "probe purity " + std::to_string(purity));
  return 4.0 * photon_stats(probe).variance;
}

double qfi_pure(const StateVector& probe) { return 4.0 * photon_stats(probe).variance; }

double scan_window(double n_mean) { return std::min(std::numbers::pi, 8.0 * std::numbers::pi / (1.0 + n_mean)); }

MetrologyRecord optimize_bias(const ProtocolConfig& config, const PropagationOptions& options,
                              const BiasSearch& search) {
  if (search.grid_points < 2) fail(ErrorCode::InvalidArgument, "grid_points must be >= 2");
  const BiasResponse response(config, options);
  MetrologyRecord record;
  record.config = config;
  record.seed = config.seed;
  record.n_mean = response.probe_stats().mean;
  record.n_var = response.probe_stats().variance;
  if (response.probe_pure()) record.qfi = 4.0 * record.n_var;
  record.report = response.report();
  if (record.n_mean <= 1e-12) return record;

  auto fisher = [&](double theta) {
    const BiasResponse::Point p = response.evaluate(theta);
    return cfi(p.probs, p.dprobs);
  };
  const double window = scan_window(record.n_mean);
  const int n = search.grid_points;
  std::vector<double> values(n + 1, 0.0);
  int best = 1;
  for (int i = 1; i <= n; ++i) {
    const double theta = window * i / n;
    values[i] = fisher(theta);
    if (search.keep_curve) record.curve.push_back({theta, values[i]});
    if (values[i] > values[best]) best = i;
  }
  // theta -> 0 is excluded: the complement probability loses all digits there
  const double lo = window * std::max(1, best - 1) / n;
  const double hi = window * std::min(n, best + 1) / n;
  record.theta_b = window * best / n;
  record.cfi_max = values[best];
  if (hi > lo) {
    const auto [theta, value] = golden_section_max(fisher, lo, hi, search.theta_tolerance);
    if (value > record.cfi_max) {
      record.theta_b = theta;
      record.cfi_max = value;
    }
  }
  record.gain_max = gain(record.cfi_max, record.n_mean);
  return record;
}

}  // namespace echoqm
