#include "echoqm/wigner.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "echoqm/errors.hpp"
#include "echoqm/parallel.hpp"

namespace echoqm {

std::string_view to_string(WignerStage stage) {
  switch (stage) {
    case WignerStage::initial: return "initial";
    case WignerStage::post_prep: return "post_prep";
    case WignerStage::post_probe: return "post_probe";
    case WignerStage::post_echo: return "post_echo";
  }
  return "initial";
}

WignerStage parse_wigner_stage(std::string_view text) {
  for (WignerStage s : {WignerStage::initial, WignerStage::post_prep, WignerStage::post_probe, WignerStage::post_echo}) {
    if (to_string(s) == text) return s;
  }
  fail(ErrorCode::InvalidArgument, "unknown stage '" + std::string(text) + "'");
}

namespace {

// Columns c_i with rho = sum_i s_i c_i c_i^dagger, s_i = +-1.
struct Factored {
  CMatrix columns;
  std::vector<double> signs;
};

Factored factor(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (rho.entries() + rho.entries().adjoint()));
  const RVector& w = eig.eigenvalues();
  const double cutoff = 1e-15 * std::max(1.0, w.cwiseAbs().maxCoeff());
  Factored f;
  std::vector<int> keep;
  for (int i = 0; i < w.size(); ++i) {
    if (std::abs(w[i]) > cutoff) keep.push_back(i);
  }
  f.columns.resize(rho.dim(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    f.columns.col(c) = std::sqrt(std::abs(w[keep[c]])) * eig.eigenvectors().col(keep[c]);
    f.signs.push_back(w[keep[c]] > 0 ? 1.0 : -1.0);
  }
  return f;
}

WignerGrid evaluate(const Factored& f, double half_extent, int resolution, const WignerOptions& options) {
  if (resolution < 2) fail(ErrorCode::InvalidArgument, "resolution must be >= 2");
  if (!(half_extent > 0.0) || !std::isfinite(half_extent)) fail(ErrorCode::InvalidArgument, "half_extent must be > 0");
  const int d = static_cast<int>(f.columns.rows());
  const DisplacementKernel kernel{FockDim(d)};
  const int tail = tail_levels(d);
  const double total = f.columns.squaredNorm();

  WignerGrid grid;
  const double step = 2.0 * half_extent / (resolution - 1);
  for (int i = 0; i < resolution; ++i) grid.x_axis.push_back(-half_extent + i * step);
  grid.p_axis = grid.x_axis;
  grid.cell_area = 0.5 * step * step;
  grid.values.resize(resolution, resolution);

  parallel_for(resolution * resolution, options.workers, [&](int index) {
    const int ip = index / resolution, ix = index % resolution;
    const Complex alpha = Complex(grid.x_axis[ix], grid.p_axis[ip]) / std::numbers::sqrt2;
    CMatrix phi = f.columns;
    kernel.apply(-alpha, phi);
    const double spill = phi.bottomRows(tail).squaredNorm() / total;
    if (spill > options.tail_threshold) {
      fail(ErrorCode::TruncationOverflow, "displaced state at x = " + std::to_string(grid.x_axis[ix]) + ", p = " +
                                              std::to_string(grid.p_axis[ip]) + " has tail population " +
                                              std::to_string(spill) + "; shrink the extent or raise d");
    }
    double w = 0.0;
    for (Eigen::Index c = 0; c < phi.cols(); ++c) {
      double parity_sum = 0.0;
      for (int n = 0; n < d; ++n) parity_sum += (n % 2 == 0 ? 1.0 : -1.0) * std::norm(phi(n, c));
      w += f.signs[c] * parity_sum;
    }
    grid.values(ip, ix) = 2.0 / std::numbers::pi * w;
  });
  return grid;
}

}  // namespace

WignerGrid wigner_grid(const DensityMatrix& rho, double half_extent, int resolution, const WignerOptions& options) {
  return evaluate(factor(rho), half_extent, resolution, options);
}

WignerGrid wigner_grid(const StateVector& psi, double half_extent, int resolution, const WignerOptions& options) {
  return evaluate(Factored{psi.amplitudes(), {1.0}}, half_extent, resolution, options);
}

double wigner_point(const DensityMatrix& rho, Complex alpha) {
  const Factored f = factor(rho);
  CMatrix phi = f.columns;
  DisplacementKernel(FockDim(rho.dim())).apply(-alpha, phi);
  double w = 0.0;
  for (Eigen::Index c = 0; c < phi.cols(); ++c) {
    for (int n = 0; n < rho.dim(); ++n) w += f.signs[c] * (n % 2 == 0 ? 1.0 : -1.0) * std::norm(phi(n, c));
  }
  return 2.0 / std::numbers::pi * w;
}

std::vector<WignerGrid> snapshot_protocol(const ProtocolConfig& config, double theta,
                                          const std::set<WignerStage>& stages, double half_extent, int resolution,
                                          const PropagationOptions& propagation, const WignerOptions& options) {
  const ProtocolStates states = protocol_states(config, theta, propagation);
  auto grid_of = [&](const std::variant<StateVector, DensityMatrix>& s) {
    return std::visit([&](const auto& state) { return wigner_grid(state, half_extent, resolution, options); }, s);
  };
  std::vector<WignerGrid> out;
  for (WignerStage stage : stages) {
    WignerGrid g;
    switch (stage) {
      case WignerStage::initial: g = wigner_grid(states.initial, half_extent, resolution, options); break;
      case WignerStage::post_prep: g = grid_of(states.post_prep.state); break;
      case WignerStage::post_probe: g = grid_of(states.post_probe); break;
      case WignerStage::post_echo: g = grid_of(states.post_echo); break;
    }
    g.stage = to_string(stage);
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace echoqm
