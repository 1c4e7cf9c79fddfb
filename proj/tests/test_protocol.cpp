#include <doctest.h>

#include <cmath>

#include "echoqm/errors.hpp"
#include "echoqm/io.hpp"
#include "echoqm/metrology.hpp"
#include "echoqm/protocol.hpp"
#include "helpers.hpp"

using namespace echoqm;
using testing::max_abs;

namespace {

double central_difference(const ProtocolConfig& c, const Probe& probe, double theta, int k, double h = 1e-4) {
  return (run_protocol(c, probe, theta + h).probs[k] - run_protocol(c, probe, theta - h).probs[k]) / (2.0 * h);
}

}  // namespace

TEST_SUITE("protocol") {
  TEST_CASE("perfect echo") {
    ProtocolConfig c = testing::small_config(3, 96, 20.0, 1.0);
    c.eps_dp = 0.0;
    const ProtocolOutcome out = run_protocol(c, 0.0);
    CHECK(out.probs[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(out.probs[1]) < 1e-10);

    c.eps_dp = 1e-3;
    const ProtocolOutcome noisy = run_protocol(c, 0.0);
    CHECK(noisy.probs[0] == doctest::Approx(1.0 - 1e-3 + 1e-3 / 96).epsilon(1e-10));
  }

  TEST_CASE("vacuum probe") {
    ProtocolConfig c = testing::small_config(1, 16, 0.0, 2.0);
    const Probe probe = prepare_probe(c);
    CHECK(probe.pure());
    CHECK(probe.stats().mean == 0.0);
    CHECK(std::get<StateVector>(probe.state).amplitudes() == vacuum(FockDim(16)).amplitudes());
  }

  TEST_CASE("depolarize") {
    const DensityMatrix rho(testing::random_density(6, 2, 2));
    CHECK(depolarize(rho, 0.0).entries() == rho.entries());
    CHECK(max_abs(depolarize(rho, 1.0).entries() - CMatrix::Identity(6, 6) / 6.0) < 1e-15);
    CHECK_THROWS_AS(depolarize(rho, 1.5), Error);
  }

  TEST_CASE("validation") {
    ProtocolConfig c = testing::small_config(0);
    c.povm = PovmKind::ternary;
    try {
      c.validate();
      FAIL("expected ConfigValidation");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ConfigValidation);
    }
    c.kind = DriveKind::two_photon;
    CHECK_NOTHROW(c.validate());
    c.tau = 0.3;
    c.T = 1.0;
    try {
      c.validate();
      FAIL("expected BadHorizon");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BadHorizon);
    }
  }

  TEST_CASE("parity conservation") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      ProtocolConfig c = testing::small_config(seed, 128, 3.0, 0.6);
      c.kind = DriveKind::two_photon;
      c.povm = PovmKind::ternary;
      c.tau = 0.02;
      const Probe probe = prepare_probe(c);
      const CVector& psi = std::get<StateVector>(probe.state).amplitudes();
      double odd = 0.0;
      for (int n = 1; n < c.dim; n += 2) odd += std::norm(psi[n]);
      CHECK(odd < 1e-8);
      for (double theta : {0.0, 0.3, 1.7}) {
        const ProtocolOutcome out = run_protocol(c, probe, theta);
        CHECK(out.probs.size() == 3);
        CHECK(std::abs(out.probs[1] - c.eps_dp / c.dim) < 1e-8);
      }
    }
  }

  TEST_CASE("derivative matches finite differences") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      ProtocolConfig c = testing::small_config(seed);
      const Probe probe = prepare_probe(c);
      for (double theta : {0.05, 0.4}) {
        const ProtocolOutcome out = run_protocol(c, probe, theta);
        for (int k = 0; k < 2; ++k) {
          const double fd = central_difference(c, probe, theta, k);
          CHECK(std::abs(out.dprobs[k] - fd) <= 1e-5 * std::max(std::abs(fd), 1e-3));
        }
      }
    }
  }

  TEST_CASE("stationary point") {
    ProtocolConfig c = testing::small_config(2);
    c.eps_dp = 0.0;
    const Probe probe = prepare_probe(c);
    // bracket a sign change of dp0 and bisect on the derivative itself
    double lo = 0.01, hi = 0.0;
    double f_lo = run_protocol(c, probe, lo).dprobs[0];
    for (double t = 0.02; t < 6.2; t += 0.01) {
      if (run_protocol(c, probe, t).dprobs[0] * f_lo < 0.0) {
        hi = t;
        break;
      }
    }
    REQUIRE(hi > 0.0);
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      const double f = run_protocol(c, probe, mid).dprobs[0];
      if (f * f_lo > 0.0) {
        lo = mid;
        f_lo = f;
      } else {
        hi = mid;
      }
    }
    CHECK(std::abs(derivative_probabilities(c, 0.5 * (lo + hi))[0]) < 1e-8);
  }

  TEST_CASE("mixed and lossy routes") {
    ProtocolConfig c = testing::small_config(4, 32, 4.0, 0.5);
    c.kappa = 0.05;
    const Probe probe = prepare_probe(c);
    CHECK_FALSE(probe.pure());
    const ProtocolOutcome out = run_protocol(c, probe, 0.3);
    CHECK(out.probs[0] + out.probs[1] == doctest::Approx(1.0).epsilon(1e-10));
    const double fd = central_difference(c, probe, 0.3, 0);
    CHECK(std::abs(out.dprobs[0] - fd) < 1e-5 * std::max(std::abs(fd), 1e-3));

    // loss during preparation only
    c.loss_scope = LossScope::forward;
    const ProtocolOutcome fwd = run_protocol(c, probe, 0.3);
    const double fd2 = central_difference(c, probe, 0.3, 0);
    CHECK(std::abs(fwd.dprobs[0] - fd2) < 1e-5 * std::max(std::abs(fd2), 1e-3));
    CHECK(fwd.probs[0] != doctest::Approx(out.probs[0]));
  }

  TEST_CASE("bias response agrees with run_protocol") {
    SUBCASE("pure probe") {
      const ProtocolConfig c = testing::small_config(5, 40, 6.0, 0.5);
      const BiasResponse r(c);
      CHECK(r.probe_pure());
      for (double theta : {0.0, 0.2, 1.1, 3.0}) {
        const ProtocolOutcome out = run_protocol(c, theta);
        const BiasResponse::Point p = r.evaluate(theta);
        for (int k = 0; k < 2; ++k) {
          CHECK(std::abs(p.probs[k] - out.probs[k]) < 1e-10);
          CHECK(std::abs(p.dprobs[k] - out.dprobs[k]) < 1e-9);
        }
      }
    }
    SUBCASE("two-photon ternary") {
      ProtocolConfig c = testing::small_config(6, 48, 2.0, 0.4);
      c.kind = DriveKind::two_photon;
      c.povm = PovmKind::ternary;
      c.tau = 0.02;
      const BiasResponse r(c);
      for (double theta : {0.1, 0.7}) {
        const ProtocolOutcome out = run_protocol(c, theta);
        const BiasResponse::Point p = r.evaluate(theta);
        for (int k = 0; k < 3; ++k) {
          CHECK(std::abs(p.probs[k] - out.probs[k]) < 1e-10);
          CHECK(std::abs(p.dprobs[k] - out.dprobs[k]) < 1e-9);
        }
      }
    }
    SUBCASE("lossy probe, lossless echo") {
      ProtocolConfig c = testing::small_config(7, 32, 4.0, 0.5);
      c.kappa = 0.05;
      c.loss_scope = LossScope::forward;
      const BiasResponse r(c);
      CHECK_FALSE(r.probe_pure());
      const ProtocolOutcome out = run_protocol(c, 0.4);
      const BiasResponse::Point p = r.evaluate(0.4);
      CHECK(std::abs(p.probs[0] - out.probs[0]) < 1e-10);
      CHECK(std::abs(p.dprobs[0] - out.dprobs[0]) < 1e-9);
    }
    SUBCASE("lossy echo") {
      ProtocolConfig c = testing::small_config(8, 32, 4.0, 0.5);
      c.kappa = 0.05;
      const BiasResponse r(c);
      for (double theta : {0.25, 0.9}) {
        const ProtocolOutcome out = run_protocol(c, theta);
        const BiasResponse::Point p = r.evaluate(theta);
        CHECK(std::abs(p.probs[0] - out.probs[0]) < 1e-8);
        CHECK(std::abs(p.dprobs[0] - out.dprobs[0]) < 1e-7);
      }
    }
  }

  TEST_CASE("fluctuations") {
    ProtocolConfig c = testing::small_config(9, 48, 5.0, 0.5);
    const ProtocolTrains clean = protocol_trains(c);
    c.fluctuation = FluctuationSpec{0.0, 77};
    CHECK(protocol_trains(c).forward == clean.forward);
    CHECK(protocol_trains(c).echo == clean.echo);

    c.fluctuation = FluctuationSpec{0.1, 77};
    const ProtocolTrains noisy = protocol_trains(c);
    CHECK(noisy.forward != clean.forward);
    CHECK(noisy.echo != clean.echo);
    // the echo draw is independent of the forward one
    CHECK(noisy.echo != echo_schedule(noisy.forward));
    c.eps_dp = 0.0;
    CHECK(run_protocol(c, 0.0).probs[0] < 1.0 - 1e-8);

    c.fluctuation_scope = FluctuationScope::forward;
    CHECK(protocol_trains(c).echo == clean.echo);
    c.fluctuation_scope = FluctuationScope::echo;
    CHECK(protocol_trains(c).forward == clean.forward);
  }

  TEST_CASE("stage states") {
    ProtocolConfig c = testing::small_config(10, 48, 5.0, 0.5);
    c.eps_dp = 0.0;
    const ProtocolStates s = protocol_states(c, 0.0);
    const auto& echoed = std::get<StateVector>(s.post_echo);
    CHECK(std::norm(echoed[0]) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(s.initial.amplitudes() == vacuum(FockDim(48)).amplitudes());
  }

  TEST_CASE("presets pass the truncation guard") {
    // lossy presets are checked through their lossless twins; same drive, same guard
    for (const auto& [name, config] : presets()) {
      ProtocolConfig c = config;
      c.kappa = 0.0;
      for (std::uint64_t seed = 0; seed < 2; ++seed) {
        c.seed = seed;
        INFO(name);
        CHECK_NOTHROW(prepare_probe(c));
      }
    }
  }
}
