#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "echoqm/errors.hpp"
#include "echoqm/pulse.hpp"

using namespace echoqm;

TEST_SUITE("pulse") {
  TEST_CASE("sampling") {
    const PulseTrain zero = sample_train(DriveKind::single_photon, 0.0, 0.1, 2.0, 7);
    CHECK(std::all_of(zero.u1.begin(), zero.u1.end(), [](double u) { return u == 0.0; }));
    CHECK(std::all_of(zero.u2.begin(), zero.u2.end(), [](double u) { return u == 0.0; }));

    const PulseTrain t = sample_train(DriveKind::single_photon, 100.0, 0.1, 2.0, 7);
    CHECK(t.n_steps == 20);
    CHECK(t.u1.size() == 20);
    CHECK(t == sample_train(DriveKind::single_photon, 100.0, 0.1, 2.0, 7));
    CHECK(t != sample_train(DriveKind::single_photon, 100.0, 0.1, 2.0, 8));
    for (int k = 0; k < t.n_steps; ++k) {
      CHECK(std::abs(t.u1[k]) <= 100.0);
      CHECK(std::abs(t.u2[k]) <= 100.0);
    }
    CHECK(sample_train(DriveKind::two_photon, 6.0, 0.02, 0.8, 1).n_steps == 40);
  }

  TEST_CASE("horizon") {
    CHECK(commensurate_steps(2.0, 0.1) == 20);
    CHECK(commensurate_steps(1.5, 0.02) == 75);
    try {
      commensurate_steps(1.0, 0.3);
      FAIL("expected BadHorizon");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BadHorizon);
    }
  }

  TEST_CASE("uniformity") {
    // Kolmogorov-Smirnov distance of the pooled quadratures against U[-1, 1]
    const PulseTrain t = sample_train(DriveKind::single_photon, 1.0, 1e-3, 20.0, 11);
    std::vector<double> u = t.u1;
    u.insert(u.end(), t.u2.begin(), t.u2.end());
    std::sort(u.begin(), u.end());
    const double n = static_cast<double>(u.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double cdf = 0.5 * (u[i] + 1.0);
      ks = std::max({ks, std::abs(cdf - i / n), std::abs(cdf - (i + 1) / n)});
    }
    // 1% critical value
    CHECK(ks < 1.63 / std::sqrt(n));
  }

  TEST_CASE("fluctuations") {
    const PulseTrain base = sample_train(DriveKind::single_photon, 10.0, 1e-4, 5.0, 3);
    CHECK(inject_fluctuations(base, {0.0, 9}) == base);

    const double delta = 0.5;
    const PulseTrain noisy = inject_fluctuations(base, {delta, 9});
    CHECK(noisy.delta_eps == delta);
    double sum = 0.0, sum2 = 0.0;
    const int n = 2 * base.n_steps;
    for (int k = 0; k < base.n_steps; ++k) {
      for (double d : {noisy.u1[k] - base.u1[k], noisy.u2[k] - base.u2[k]}) {
        sum += d;
        sum2 += d * d;
        CHECK(std::abs(d) <= 6.0 * delta + 1e-12);
      }
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sum2 / n - mean * mean);
    CHECK(n >= 100000);
    CHECK(std::abs(sd - delta) < 0.03 * delta);

    const PulseTrain other = inject_fluctuations(base, {delta, 10});
    CHECK(other.u1 != noisy.u1);
    for (int k = 0; k < 50; ++k) {
      CHECK((other.u1[k] - (other.u1[k] - base.u1[k])) == doctest::Approx(base.u1[k]).epsilon(1e-12));
    }
  }

  TEST_CASE("echo schedule") {
    const PulseTrain t = sample_train(DriveKind::two_photon, 6.0, 0.02, 0.8, 5);
    const PulseTrain e = echo_schedule(t);
    CHECK(e.kerr_sign == -t.kerr_sign);
    CHECK(echo_schedule(e) == t);
    for (int k = 0; k < t.n_steps; ++k) {
      CHECK(e.u1[k] == -t.u1[t.n_steps - 1 - k]);
      CHECK(e.u2[k] == -t.u2[t.n_steps - 1 - k]);
    }

    PulseTrain one;
    one.n_steps = 1;
    one.u1 = {0.7};
    one.u2 = {0.0};
    const PulseTrain flipped = echo_schedule(one);
    CHECK(flipped.u1 == std::vector<double>{-0.7});
    CHECK(flipped.kerr_sign == -1);

    const PulseTrain zero = sample_train(DriveKind::single_photon, 0.0, 0.1, 1.0, 0);
    const PulseTrain zero_echo = echo_schedule(zero);
    CHECK(zero_echo.kerr_sign == -1);
    CHECK(std::all_of(zero_echo.u1.begin(), zero_echo.u1.end(), [](double u) { return u == 0.0; }));
  }

  TEST_CASE("drive kind names") {
    CHECK(parse_drive_kind(to_string(DriveKind::two_photon)) == DriveKind::two_photon);
    CHECK(parse_drive_kind("single_photon") == DriveKind::single_photon);
    CHECK_THROWS_AS(parse_drive_kind("three_photon"), Error);
  }
}
