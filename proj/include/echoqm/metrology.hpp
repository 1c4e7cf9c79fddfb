#pragma once

// Fisher information of the echo readout and the search for the best bias phase.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "echoqm/fock.hpp"
#include "echoqm/protocol.hpp"

namespace echoqm {

/// Outcomes with p below this are left out of the Fisher sum.
inline constexpr double kProbabilityFloor = 1e-12;

struct FisherInformation {
  double value = 0.0;
  int excluded_outcomes = 0;
  /// Largest |dp| among excluded outcomes; at most 1e-6 by construction.
  double excluded_slope = 0.0;
};

/// sum_n dp_n^2 / p_n over outcomes with p_n > kProbabilityFloor. Throws
/// DegenerateDistribution when an excluded outcome still has |dp_n| > 1e-6.
FisherInformation fisher_information(const std::vector<double>& probs, const std::vector<double>& dprobs);
double cfi(const std::vector<double>& probs, const std::vector<double>& dprobs);

/// cfi / (4 n_mean); 1 is the standard quantum limit. ZeroPhotonProbe for n_mean <= 1e-12.
double gain(double cfi_value, double n_mean);

/// 4 Var(n). MixedStateInput unless tr(rho^2) > 1 - 1e-6.
double qfi_pure(const DensityMatrix& probe);
double qfi_pure(const StateVector& probe);

struct CurvePoint {
  double theta;
  double cfi;
};

struct MetrologyRecord {
  ProtocolConfig config;
  std::uint64_t seed = 0;
  double theta_b = 0.0;
  double cfi_max = 0.0;
  double gain_max = 0.0;
  double n_mean = 0.0;
  double n_var = 0.0;
  /// Only set for pure probes.
  std::optional<double> qfi;
  std::vector<CurvePoint> curve;
  PropagationReport report;

  friend bool operator==(const MetrologyRecord& a, const MetrologyRecord& b) {
    return a.config == b.config && a.seed == b.seed && a.theta_b == b.theta_b && a.cfi_max == b.cfi_max &&
           a.gain_max == b.gain_max && a.n_mean == b.n_mean && a.n_var == b.n_var && a.qfi == b.qfi;
  }
};

struct BiasSearch {
  int grid_points = 400;
  double theta_tolerance = 1e-6;
  bool keep_curve = false;
};

/// Largest bias window scanned: min(pi, 8 pi / (1 + n_mean)).
double scan_window(double n_mean);

/// Golden-section search for a maximum of f on [lo, hi], stopping once the
/// bracket is narrower than tol. Returns (argmax, max).
template <class F>
std::pair<double, double> golden_section_max(F&& f, double lo, double hi, double tol);

/// Grid scan of theta over (0, scan_window] followed by golden-section refinement.
/// A probe with no photons gets cfi_max = gain_max = theta_b = 0.
MetrologyRecord optimize_bias(const ProtocolConfig& config, const PropagationOptions& options = {},
                              const BiasSearch& search = {});

template <class F>
std::pair<double, double> golden_section_max(F&& f, double lo, double hi, double tol) {
  const double r = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = f(x2);
    }
  }
  return f1 >= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

}  // namespace echoqm
