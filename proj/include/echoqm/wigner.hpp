#pragma once

// Wigner functions by displaced parity: W(alpha) = (2/pi) tr(rho D(alpha) P D(alpha)^dagger)
// with alpha = (x + i p) / sqrt(2), so the vacuum has <x^2> = 1/2. The parity
// expectation is summed as sum_n (-1)^n |phi_n|^2, which is real term by term.

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "echoqm/fock.hpp"
#include "echoqm/protocol.hpp"

namespace echoqm {

enum class WignerStage { initial, post_prep, post_probe, post_echo };

std::string_view to_string(WignerStage stage);
WignerStage parse_wigner_stage(std::string_view text);

struct WignerGrid {
  std::vector<double> x_axis;
  std::vector<double> p_axis;
  /// values(i, j) = W(x_axis[j], p_axis[i]).
  RMatrix values;
  /// dx dp / 2, the alpha-plane measure of one cell, so that sum(values) * cell_area ~ 1.
  double cell_area = 0.0;
  std::string stage;
};

struct WignerOptions {
  int workers = 1;
  /// Largest population allowed on the tail levels of a displaced state.
  double tail_threshold = 1e-6;
};

/// Grid over x, p in [-half_extent, half_extent] with `resolution` points per axis.
/// TruncationOverflow when a displaced state reaches the top levels.
WignerGrid wigner_grid(const DensityMatrix& rho, double half_extent, int resolution, const WignerOptions& options = {});
WignerGrid wigner_grid(const StateVector& psi, double half_extent, int resolution, const WignerOptions& options = {});

/// Wigner value at a single alpha.
double wigner_point(const DensityMatrix& rho, Complex alpha);

std::vector<WignerGrid> snapshot_protocol(const ProtocolConfig& config, double theta,
                                          const std::set<WignerStage>& stages, double half_extent, int resolution,
                                          const PropagationOptions& propagation = {},
                                          const WignerOptions& options = {});

}  // namespace echoqm
