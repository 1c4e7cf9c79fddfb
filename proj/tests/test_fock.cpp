#include <doctest.h>

#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "echoqm/errors.hpp"
#include "helpers.hpp"

using namespace echoqm;
using testing::max_abs;

TEST_SUITE("fock") {
  TEST_CASE("vacuum") {
    const StateVector v4 = vacuum(FockDim(4));
    CHECK(v4.amplitudes() == CVector::Unit(4, 0));
    CHECK(vacuum(FockDim(2)).amplitudes() == CVector::Unit(2, 0));
    CHECK(vacuum(FockDim(64)).norm() == 1.0);
    CHECK_THROWS_AS(FockDim(1), Error);
  }

  TEST_CASE("ladder operators") {
    CMatrix expected(2, 2);
    expected << 0, 1, 0, 0;
    CHECK(annihilation(FockDim(2)).matrix() == expected);
    CHECK(annihilation(FockDim(3)).matrix()(1, 2) == Complex(std::sqrt(2.0)));
    CHECK(annihilation(FockDim(8)).apply(vacuum(FockDim(8))).norm() == 0.0);

    const int d = 9;
    const CMatrix a = annihilation(FockDim(d)).matrix();
    const CMatrix ad = creation(FockDim(d)).matrix();
    const auto [n, n2] = number_ops(FockDim(d));
    CHECK(max_abs((ad * a - n.matrix()).topLeftCorner(d - 1, d - 1)) < 1e-14);
    CMatrix comm = a * ad - ad * a;
    CHECK(comm(d - 1, d - 1).real() == doctest::Approx(1.0 - d));
    comm(d - 1, d - 1) = 1.0;
    CHECK(max_abs(comm - CMatrix::Identity(d, d)) < 1e-12);
  }

  TEST_CASE("number operators") {
    const auto [n, n2] = number_ops(FockDim(3));
    CHECK(n.matrix().diagonal().real() == RVector::LinSpaced(3, 0, 2));
    RVector sq(3);
    sq << 0, 1, 4;
    CHECK(n2.matrix().diagonal().real() == sq);
    CHECK(n2.matrix() == n.matrix() * n.matrix());
  }

  TEST_CASE("parity") {
    const CMatrix p2 = parity(FockDim(2)).matrix();
    CHECK(p2(0, 0) == 1.0);
    CHECK(p2(1, 1) == -1.0);
    const CMatrix p = parity(FockDim(7)).matrix();
    CHECK(p * p == CMatrix::Identity(7, 7));
    CHECK(parity(FockDim(5)).apply(fock_state(FockDim(5), 1)).amplitudes() == -fock_state(FockDim(5), 1).amplitudes());
  }

  TEST_CASE("displacement") {
    CHECK(displacement(FockDim(6), 0.0).matrix() == CMatrix::Identity(6, 6));

    const int d = 64;
    const Operator d1 = displacement(FockDim(d), 1.0);
    const StateVector coh = d1.apply(vacuum(FockDim(d)));
    CHECK(photon_stats(coh).mean == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(max_abs(coh.amplitudes() - testing::coherent(d, 1.0).amplitudes()) < 1e-8);

    const Complex alpha(0.7, -1.1);
    const CMatrix plus = displacement(FockDim(d), alpha).matrix();
    const CMatrix minus = displacement(FockDim(d), -alpha).matrix();
    CHECK(max_abs(plus.adjoint() - minus) < 1e-9);
    CHECK(max_abs(plus.adjoint() * plus - CMatrix::Identity(d, d)) < 1e-8);

    // oracle: dense matrix exponential of the truncated generator
    const CMatrix a = annihilation(FockDim(d)).matrix();
    const CMatrix generator = alpha * a.adjoint() - std::conj(alpha) * a;
    const CMatrix reference = generator.exp();
    CHECK(max_abs(plus - reference) < 1e-10);

    // coherent amplitudes for |alpha|^2 <= d / 10
    const Complex big(1.5, 2.0);
    const StateVector far = displacement(FockDim(d), big).apply(vacuum(FockDim(d)));
    CHECK(max_abs(far.amplitudes() - testing::coherent(d, big).amplitudes()) < 1e-8);

    CHECK_THROWS_AS(displacement(FockDim(16), 4.0), Error);
    try {
      displacement(FockDim(16), 4.0);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::TruncationOverflow);
    }
  }

  TEST_CASE("phase rotation") {
    const StateVector psi = testing::coherent(20, Complex(0.8, 0.3));
    CHECK(phase_rotation(psi, 0.0).amplitudes() == psi.amplitudes());
    CHECK(phase_rotation(vacuum(FockDim(10)), 1.234).amplitudes() == vacuum(FockDim(10)).amplitudes());

    const DensityMatrix rho(testing::random_density(12, 3, 4));
    const DensityMatrix full = phase_rotation(rho, 2.0 * std::numbers::pi);
    CHECK(max_abs(full.entries() - rho.entries()) < 1e-12);

    const DensityMatrix twice = phase_rotation(phase_rotation(rho, 0.4), 1.1);
    CHECK(max_abs(twice.entries() - phase_rotation(rho, 1.5).entries()) < 1e-12);
    CHECK(phase_rotation(psi, 0.9).norm() == doctest::Approx(psi.norm()).epsilon(1e-15));
  }

  TEST_CASE("expectation") {
    const FockDim d(8);
    const Operator n = number_ops(d).first;
    CHECK(expectation(n, DensityMatrix::pure(vacuum(d))) == 0.0);
    CHECK(expectation(n, DensityMatrix::pure(fock_state(d, 1))) == doctest::Approx(1.0));
    const FockDim big(64);
    CHECK(expectation(number_ops(big).first, DensityMatrix::pure(testing::coherent(64, 2.0))) ==
          doctest::Approx(4.0).epsilon(1e-6));
    const StateVector plus(CVector::Ones(8) / std::sqrt(8.0));
    CHECK_THROWS_AS(expectation(Operator(Complex(0, 1) * CMatrix::Identity(8, 8), OperatorTag::custom),
                                DensityMatrix::pure(plus)),
                    Error);
  }

  TEST_CASE("density matrix helpers") {
    const DensityMatrix mixed = DensityMatrix::maximally_mixed(FockDim(5));
    CHECK(mixed.trace() == doctest::Approx(1.0));
    CHECK(mixed.purity() == doctest::Approx(0.2));
    const DensityMatrix pure = DensityMatrix::pure(testing::coherent(10, 0.5));
    CHECK(pure.hermiticity_defect() == 0.0);
    CHECK(trace_distance(pure.entries(), pure.entries()) == doctest::Approx(0.0));
    const CMatrix p0 = DensityMatrix::pure(fock_state(FockDim(4), 0)).entries();
    const CMatrix p1 = DensityMatrix::pure(fock_state(FockDim(4), 1)).entries();
    CHECK(trace_distance(p0, p1) == doctest::Approx(1.0));
    CHECK(tail_levels(256) == 13);
    CHECK(tail_levels(40) == 3);
  }
}
