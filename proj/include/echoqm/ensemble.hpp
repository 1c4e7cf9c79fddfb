#pragma once

// Monte Carlo campaigns over drive realizations, plus the fits applied to them.
// Realization k of an ensemble uses seed seed_base + k. Aggregates are computed
// over seed-sorted records, so the worker count never changes a result.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "echoqm/errors.hpp"
#include "echoqm/metrology.hpp"
#include "echoqm/parallel.hpp"

namespace echoqm {

struct PowerLawFit {
  double a = 0.0;
  double b = 0.0;
  bool weighted = false;
  int points = 0;
  /// Weighted RMS of the residuals in ln y.
  double residual_rms = 0.0;
};

struct GaussianFit {
  double mu = 0.0;
  double sigma = 0.0;
};

/// Least squares of ln y = ln a + b ln x. In weighted mode each point carries
/// half the ln-x distance between its neighbours (one neighbour at the ends;
/// duplicates share their slot equally), so clusters count as one region.
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points, bool weighted);

/// Sample mean and unbiased standard deviation.
GaussianFit fit_gaussian(const std::vector<double>& values);

struct FailedRealization {
  std::uint64_t seed = 0;
  ErrorCode code = ErrorCode::TruncationOverflow;
  std::string message;
};

struct EnsembleSummary {
  ProtocolConfig base;
  std::uint64_t seed_base = 0;
  int n_requested = 0;
  std::vector<MetrologyRecord> records;
  std::vector<FailedRealization> failures;
  double mean_gain = 0.0;
  double std_gain = 0.0;
  /// cfi_max against n_mean.
  std::optional<PowerLawFit> powerlaw;
  std::optional<PowerLawFit> powerlaw_unweighted;
  /// theta_b against n_mean.
  std::optional<PowerLawFit> thetab_powerlaw;
  std::optional<PowerLawFit> thetab_powerlaw_unweighted;
  std::optional<GaussianFit> gaussian;
};

struct EnsembleOptions {
  /// 0 picks the hardware concurrency.
  int workers = 1;
  PropagationOptions propagation;
  BiasSearch search;
  /// Called as realizations finish, with (done, total). May run on any worker.
  std::function<void(int, int)> progress;
};

/// Recomputes statistics and fits from `records` (sorted by seed beforehand).
void summarize(EnsembleSummary& summary);

EnsembleSummary run_ensemble(const ProtocolConfig& base, int n_realizations, std::uint64_t seed_base,
                             const EnsembleOptions& options = {});

/// Rows are chiT values, columns epsilon values. Cell (r, c) runs an ensemble
/// with seed base seed_base + 10^6 (r * n_eps + c); failed cells hold NaN.
struct SweepGrid {
  std::vector<double> eps_values;
  std::vector<double> chiT_values;
  RMatrix mean_matrix;
  RMatrix std_matrix;
  int n_realizations = 0;
  std::vector<EnsembleSummary> cells;
  std::vector<std::string> failure_log;
};

inline constexpr std::uint64_t kSeedStride = 1000000;

SweepGrid sweep_heatmap(const ProtocolConfig& base, const std::vector<double>& eps_values,
                        const std::vector<double>& chiT_values, int n_realizations, std::uint64_t seed_base,
                        const EnsembleOptions& options = {});

struct FluctuationRow {
  double delta_eps = 0.0;
  double relative = 0.0;
  EnsembleSummary summary;
};

/// For every delta_eps: n_base drive seeds (seed_base + k), each with n_fluct
/// noise draws seeded seed_base + k + 10^6 (j + 1). delta_eps = 0 runs one
/// realization per drive seed, identical to run_ensemble.
std::vector<FluctuationRow> fluctuation_sweep(const ProtocolConfig& base, const std::vector<double>& delta_eps_values,
                                              int n_base, int n_fluct, std::uint64_t seed_base,
                                              const EnsembleOptions& options = {});

}  // namespace echoqm
