#include <map>
#include <string>

#include "echoqm/errors.hpp"
#include "echoqm/io.hpp"

namespace echoqm {

namespace {

ProtocolConfig make(int dim, DriveKind kind, double epsilon, double tau, double T, double kappa, PovmKind povm) {
  ProtocolConfig c;
  c.dim = dim;
  c.kind = kind;
  c.epsilon = epsilon;
  c.tau = tau;
  c.T = T;
  c.kappa = kappa;
  c.eps_dp = 1e-3;
  c.povm = povm;
  return c;
}

}  // namespace

const std::map<std::string, ProtocolConfig>& presets() {
  using enum DriveKind;
  static const std::map<std::string, ProtocolConfig> registry{
      {"fig2a", make(600, single_photon, 100.0, 0.1, 2.0, 0.0, PovmKind::binary)},
      {"fig2c_pink", make(400, single_photon, 200.0, 0.1, 2.0, 0.0, PovmKind::binary)},
      {"fig3a_single", make(600, single_photon, 40.0, 0.02, 1.5, 0.0, PovmKind::binary)},
      {"fig3a_two", make(256, two_photon, 6.0, 0.02, 0.8, 0.0, PovmKind::ternary)},
      {"fig3b_loss", make(160, single_photon, 40.0, 0.02, 1.5, 0.004, PovmKind::binary)},
      {"fig3b_lossless", make(160, single_photon, 40.0, 0.02, 1.5, 0.0, PovmKind::binary)},
      {"fig3c_loss", make(160, two_photon, 6.0, 0.02, 0.8, 0.004, PovmKind::ternary)},
  };
  return registry;
}

ProtocolConfig preset(const std::string& name) {
  const auto& all = presets();
  const auto it = all.find(name);
  if (it == all.end()) {
    std::string known;
    for (const auto& [k, v] : all) known += (known.empty() ? "" : ", ") + k;
    fail(ErrorCode::ConfigValidation, "unknown preset '" + name + "' (known: " + known + ")");
  }
  return it->second;
}

}  // namespace echoqm
