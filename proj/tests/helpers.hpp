#pragma once

#include <cmath>
#include <vector>

#include "echoqm/fock.hpp"
#include "echoqm/protocol.hpp"
#include "echoqm/pulse.hpp"

namespace testing {

using namespace echoqm;

inline double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

/// Every step carries the same quadratures.
inline PulseTrain constant_train(DriveKind kind, double u1, double u2, double tau, int n_steps) {
  PulseTrain t;
  t.kind = kind;
  t.tau = tau;
  t.n_steps = n_steps;
  t.u1.assign(n_steps, u1);
  t.u2.assign(n_steps, u2);
  t.epsilon = std::max(std::abs(u1), std::abs(u2));
  return t;
}

inline ProtocolConfig small_config(std::uint64_t seed, int dim = 24, double epsilon = 5.0, double T = 0.5) {
  ProtocolConfig c;
  c.dim = dim;
  c.epsilon = epsilon;
  c.tau = 0.1;
  c.T = T;
  c.seed = seed;
  return c;
}

inline StateVector coherent(int d, Complex alpha) {
  CVector v(d);
  Complex term = std::exp(-0.5 * std::norm(alpha));
  for (int n = 0; n < d; ++n) {
    v[n] = term;
    term *= alpha / std::sqrt(static_cast<double>(n + 1));
  }
  return StateVector(v);
}

inline CMatrix random_density(int d, std::uint64_t seed, int rank) {
  CMatrix g(d, rank);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < rank; ++j) {
      const double re = std::sin(1.7 * (i + 1) * (j + 2) + seed);
      const double im = std::cos(2.3 * (i + 3) * (j + 1) + 0.5 * seed);
      g(i, j) = Complex(re, im) * std::exp(-0.3 * i);
    }
  }
  CMatrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

}  // namespace testing
