#include <doctest.h>

#include <cmath>
#include <numbers>

#include "echoqm/errors.hpp"
#include "echoqm/wigner.hpp"
#include "helpers.hpp"

using namespace echoqm;

namespace {

constexpr double kTwoOverPi = 2.0 / std::numbers::pi;

// W of |n><n| at alpha
double fock_wigner(unsigned n, Complex alpha) {
  const double r2 = std::norm(alpha);
  return kTwoOverPi * (n % 2 ? -1.0 : 1.0) * std::exp(-2.0 * r2) * std::assoc_laguerre(n, 0, 4.0 * r2);
}

}  // namespace

TEST_SUITE("wigner") {
  TEST_CASE("vacuum and single photon at the origin") {
    const FockDim d(40);
    CHECK(std::abs(wigner_point(DensityMatrix::pure(vacuum(d)), 0.0) - kTwoOverPi) < 1e-9);
    CHECK(std::abs(wigner_point(DensityMatrix::pure(fock_state(d, 1)), 0.0) + kTwoOverPi) < 1e-9);
  }

  TEST_CASE("fock states against the laguerre closed form") {
    const FockDim d(60);
    for (unsigned n : {0u, 1u, 2u, 5u}) {
      const DensityMatrix rho = DensityMatrix::pure(fock_state(d, static_cast<int>(n)));
      for (Complex alpha : {Complex(0.3, 0.1), Complex(-0.7, 0.9), Complex(1.4, -0.2)}) {
        CHECK(std::abs(wigner_point(rho, alpha) - fock_wigner(n, alpha)) < 1e-9);
      }
    }
  }

  TEST_CASE("grid layout and normalization") {
    const WignerGrid g = wigner_grid(vacuum(FockDim(64)), 5.0, 101);
    CHECK(g.values.rows() == 101);
    CHECK(g.values.cols() == 101);
    CHECK(g.x_axis.front() == -5.0);
    CHECK(g.x_axis.back() == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(g.cell_area == doctest::Approx(0.1 * 0.1 / 2));
    CHECK(std::abs(g.values.sum() * g.cell_area - 1.0) < 1e-3);
    CHECK(std::abs(g.values(50, 50) - kTwoOverPi) < 1e-9);

    const WignerGrid tiny = wigner_grid(vacuum(FockDim(16)), 1.0, 2);
    CHECK(tiny.values.rows() == 2);
    CHECK(tiny.values.cols() == 2);
  }

  TEST_CASE("axes follow x + i p over sqrt 2") {
    // a coherent state peaks at x = sqrt2 re(alpha), p = sqrt2 im(alpha)
    const Complex alpha(1.0, -0.5);
    const DensityMatrix rho = DensityMatrix::pure(testing::coherent(64, alpha));
    const WignerGrid g = wigner_grid(rho, 3.0, 61);
    Eigen::Index r, c;
    g.values.maxCoeff(&r, &c);
    CHECK(g.x_axis[c] == doctest::Approx(std::sqrt(2.0) * alpha.real()).epsilon(0.08));
    CHECK(g.p_axis[r] == doctest::Approx(std::sqrt(2.0) * alpha.imag()).epsilon(0.08));
  }

  TEST_CASE("mixed states and workers") {
    const DensityMatrix rho(testing::random_density(80, 5, 3));
    WignerOptions four;
    four.workers = 4;
    const WignerGrid a = wigner_grid(rho, 2.0, 21);
    const WignerGrid b = wigner_grid(rho, 2.0, 21, four);
    CHECK(a.values == b.values);
    // linearity in rho
    const DensityMatrix mix(0.5 * DensityMatrix::pure(vacuum(FockDim(80))).entries() +
                            0.5 * DensityMatrix::pure(fock_state(FockDim(80), 1)).entries());
    CHECK(std::abs(wigner_point(mix, 0.0)) < 1e-12);
  }

  TEST_CASE("tail guard") {
    try {
      wigner_grid(vacuum(FockDim(12)), 6.0, 5);
      FAIL("expected TruncationOverflow");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::TruncationOverflow);
    }
  }

  TEST_CASE("stage names") {
    CHECK(parse_wigner_stage("post_echo") == WignerStage::post_echo);
    CHECK(to_string(WignerStage::post_prep) == "post_prep");
    CHECK_THROWS_AS(parse_wigner_stage("midway"), Error);
  }

  TEST_CASE("protocol snapshots") {
    ProtocolConfig c = testing::small_config(2, 64, 6.0, 0.5);
    c.eps_dp = 0.0;
    const auto grids = snapshot_protocol(c, 0.0, {WignerStage::initial, WignerStage::post_echo}, 3.0, 21);
    REQUIRE(grids.size() == 2);
    CHECK(grids[0].stage == "initial");
    CHECK(grids[1].stage == "post_echo");
    CHECK((grids[0].values - grids[1].values).cwiseAbs().maxCoeff() < 1e-6);
    const WignerGrid reference = wigner_grid(vacuum(FockDim(64)), 3.0, 21);
    CHECK((grids[0].values - reference.values).cwiseAbs().maxCoeff() < 1e-12);
  }
}
