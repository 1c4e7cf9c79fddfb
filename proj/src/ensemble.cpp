#include "echoqm/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <variant>

namespace echoqm {

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points, bool weighted) {
  if (points.size() < 3) fail(ErrorCode::InsufficientPoints, "power-law fit needs at least 3 points");
  const std::size_t n = points.size();
  std::vector<double> lx(n), ly(n), w(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [x, y] = points[i];
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) {
      fail(ErrorCode::NonPositiveData, "power-law fit needs finite x > 0 and y > 0");
    }
    lx[i] = std::log(x);
    ly[i] = std::log(y);
  }
  if (weighted) {
    std::map<double, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) groups[lx[i]].push_back(i);
    std::vector<double> keys;
    for (const auto& g : groups) keys.push_back(g.first);
    for (std::size_t u = 0; u < keys.size(); ++u) {
      const double left = u > 0 ? keys[u] - keys[u - 1] : 0.0;
      const double right = u + 1 < keys.size() ? keys[u + 1] - keys[u] : 0.0;
      const auto& members = groups[keys[u]];
      for (std::size_t i : members) w[i] = 0.5 * (left + right) / members.size();
    }
  }
  double sw = 0.0, mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w[i];
    mx += w[i] * lx[i];
    my += w[i] * ly[i];
  }
  if (!(sw > 0.0)) fail(ErrorCode::InsufficientPoints, "power-law fit needs at least two distinct x values");
  mx /= sw;
  my /= sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w[i] * (lx[i] - mx) * (lx[i] - mx);
    sxy += w[i] * (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) fail(ErrorCode::InsufficientPoints, "power-law fit needs at least two distinct x values");
  PowerLawFit fit;
  fit.b = sxy / sxx;
  fit.a = std::exp(my - fit.b * mx);
  fit.weighted = weighted;
  fit.points = static_cast<int>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (my + fit.b * (lx[i] - mx));
    ss += w[i] * r * r;
  }
  fit.residual_rms = std::sqrt(ss / sw);
  return fit;
}

GaussianFit fit_gaussian(const std::vector<double>& values) {
  if (values.size() < 2) fail(ErrorCode::InsufficientPoints, "Gaussian fit needs at least 2 values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= values.size();
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (values.size() - 1))};
}

namespace {

std::optional<PowerLawFit> try_fit(const std::vector<std::pair<double, double>>& points, bool weighted) {
  try {
    return fit_power_law(points, weighted);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InsufficientPoints || e.code() == ErrorCode::NonPositiveData) return std::nullopt;
    throw;
  }
}

bool recoverable(ErrorCode code) {
  return code == ErrorCode::TruncationOverflow || code == ErrorCode::ConvergenceFailure ||
         code == ErrorCode::DegenerateDistribution || code == ErrorCode::NonHermitianResult;
}

using Outcome = std::variant<MetrologyRecord, FailedRealization>;

std::vector<Outcome> run_jobs(const std::vector<ProtocolConfig>& jobs, const EnsembleOptions& options) {
  std::vector<Outcome> out(jobs.size());
  std::atomic<int> done{0};
  parallel_for(static_cast<int>(jobs.size()), options.workers, [&](int i) {
    try {
      out[i] = optimize_bias(jobs[i], options.propagation, options.search);
    } catch (const Error& e) {
      if (!recoverable(e.code())) throw;
      out[i] = FailedRealization{jobs[i].seed, e.code(), e.what()};
    }
    const int finished = ++done;
    if (options.progress) options.progress(finished, static_cast<int>(jobs.size()));
  });
  return out;
}

EnsembleSummary collect(const ProtocolConfig& base, std::uint64_t seed_base, std::vector<Outcome>&& outcomes) {
  EnsembleSummary summary;
  summary.base = base;
  summary.seed_base = seed_base;
  summary.n_requested = static_cast<int>(outcomes.size());
  for (Outcome& o : outcomes) {
    if (auto* r = std::get_if<MetrologyRecord>(&o)) {
      summary.records.push_back(std::move(*r));
    } else {
      summary.failures.push_back(std::move(std::get<FailedRealization>(o)));
    }
  }
  if (summary.records.empty()) {
    const std::string first = summary.failures.empty() ? "" : ": " + summary.failures.front().message;
    fail(ErrorCode::AllRealizationsFailed, "all " + std::to_string(summary.n_requested) + " realizations failed" + first);
  }
  summarize(summary);
  return summary;
}

}  // namespace

void summarize(EnsembleSummary& summary) {
  std::vector<double> gains;
  std::vector<std::pair<double, double>> cfi_points, theta_points;
  for (const MetrologyRecord& r : summary.records) {
    gains.push_back(r.gain_max);
    cfi_points.emplace_back(r.n_mean, r.cfi_max);
    theta_points.emplace_back(r.n_mean, r.theta_b);
  }
  summary.gaussian.reset();
  if (gains.size() == 1) {
    summary.mean_gain = gains.front();
    summary.std_gain = 0.0;
  } else if (!gains.empty()) {
    const GaussianFit g = fit_gaussian(gains);
    summary.mean_gain = g.mu;
    summary.std_gain = g.sigma;
    summary.gaussian = g;
  }
  summary.powerlaw = try_fit(cfi_points, true);
  summary.powerlaw_unweighted = try_fit(cfi_points, false);
  summary.thetab_powerlaw = try_fit(theta_points, true);
  summary.thetab_powerlaw_unweighted = try_fit(theta_points, false);
}

EnsembleSummary run_ensemble(const ProtocolConfig& base, int n_realizations, std::uint64_t seed_base,
                             const EnsembleOptions& options) {
  if (n_realizations < 1) fail(ErrorCode::InvalidArgument, "n_realizations must be >= 1");
  base.validate();
  std::vector<ProtocolConfig> jobs;
  for (int k = 0; k < n_realizations; ++k) {
    ProtocolConfig c = base;
    c.seed = seed_base + k;
    jobs.push_back(c);
  }
  return collect(base, seed_base, run_jobs(jobs, options));
}

SweepGrid sweep_heatmap(const ProtocolConfig& base, const std::vector<double>& eps_values,
                        const std::vector<double>& chiT_values, int n_realizations, std::uint64_t seed_base,
                        const EnsembleOptions& options) {
  if (eps_values.empty() || chiT_values.empty()) fail(ErrorCode::InvalidArgument, "sweep axes must be non-empty");
  if (n_realizations < 1) fail(ErrorCode::InvalidArgument, "n_realizations must be >= 1");
  const int rows = static_cast<int>(chiT_values.size());
  const int cols = static_cast<int>(eps_values.size());
  std::vector<ProtocolConfig> cell_configs;
  std::vector<ProtocolConfig> jobs;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      ProtocolConfig cell = base;
      cell.epsilon = eps_values[c];
      cell.T = chiT_values[r];
      cell.validate();
      const std::uint64_t cell_base = seed_base + kSeedStride * static_cast<std::uint64_t>(r * cols + c);
      for (int k = 0; k < n_realizations; ++k) {
        ProtocolConfig job = cell;
        job.seed = cell_base + k;
        jobs.push_back(job);
      }
      cell.seed = cell_base;
      cell_configs.push_back(cell);
    }
  }
  std::vector<Outcome> outcomes = run_jobs(jobs, options);

  SweepGrid grid;
  grid.eps_values = eps_values;
  grid.chiT_values = chiT_values;
  grid.n_realizations = n_realizations;
  grid.mean_matrix = RMatrix::Constant(rows, cols, std::numeric_limits<double>::quiet_NaN());
  grid.std_matrix = grid.mean_matrix;
  for (int cell = 0; cell < rows * cols; ++cell) {
    std::vector<Outcome> part(std::make_move_iterator(outcomes.begin() + cell * n_realizations),
                              std::make_move_iterator(outcomes.begin() + (cell + 1) * n_realizations));
    const std::uint64_t cell_base = cell_configs[cell].seed;
    try {
      EnsembleSummary s = collect(cell_configs[cell], cell_base, std::move(part));
      grid.mean_matrix(cell / cols, cell % cols) = s.mean_gain;
      grid.std_matrix(cell / cols, cell % cols) = s.std_gain;
      for (const auto& f : s.failures) {
        grid.failure_log.push_back("cell " + std::to_string(cell) + " seed " + std::to_string(f.seed) + ": " + f.message);
      }
      grid.cells.push_back(std::move(s));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::AllRealizationsFailed) throw;
      grid.failure_log.push_back("cell " + std::to_string(cell) + ": " + e.what());
      EnsembleSummary empty;
      empty.base = cell_configs[cell];
      empty.seed_base = cell_base;
      empty.n_requested = n_realizations;
      grid.cells.push_back(std::move(empty));
    }
  }
  return grid;
}

std::vector<FluctuationRow> fluctuation_sweep(const ProtocolConfig& base, const std::vector<double>& delta_eps_values,
                                              int n_base, int n_fluct, std::uint64_t seed_base,
                                              const EnsembleOptions& options) {
  if (n_base < 1 || n_fluct < 1) fail(ErrorCode::InvalidArgument, "realization counts must be >= 1");
  base.validate();
  std::vector<FluctuationRow> rows;
  for (double delta : delta_eps_values) {
    if (!(delta >= 0.0) || !std::isfinite(delta)) fail(ErrorCode::InvalidArgument, "delta_eps must be >= 0");
    std::vector<ProtocolConfig> jobs;
    for (int k = 0; k < n_base; ++k) {
      ProtocolConfig c = base;
      c.seed = seed_base + k;
      if (delta == 0.0) {
        c.fluctuation.reset();
        jobs.push_back(c);
        continue;
      }
      for (int j = 0; j < n_fluct; ++j) {
        c.fluctuation = FluctuationSpec{delta, seed_base + k + kSeedStride * static_cast<std::uint64_t>(j + 1)};
        jobs.push_back(c);
      }
    }
    FluctuationRow row;
    row.delta_eps = delta;
    row.relative = base.epsilon > 0.0 ? delta / base.epsilon : 0.0;
    row.summary = collect(base, seed_base, run_jobs(jobs, options));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace echoqm
