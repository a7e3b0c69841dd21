#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "tgate/calibrate.hpp"

namespace tgate::testing {

inline TrapSpec ytterbium_trap(int n_ions) {
  TrapSpec t;
  t.n_ions = n_ions;
  t.ion_mass = 170.936 * constants::atomic_mass_unit;
  t.axial_frequency = hz_to_angular(1.0e6);
  return t;
}

/// Two ions, COM mode only, E0 = 0.269 mV/m, delta = -2 pi 1 kHz.
inline GateConfig two_ion_gate(double tweezer_ratio) {
  GateConfig g;
  g.trap = ytterbium_trap(2);
  g.pair = {0, 1};
  g.tweezer_frequency = tweezer_ratio * g.trap.axial_frequency;
  g.field_amplitude = 2.69e-4;
  g.detuning = -hz_to_angular(1.0e3);
  return g;
}

inline Eigen::Matrix4cd random_unitary(std::mt19937& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Matrix4cd z;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) z(r, c) = cplx(n(rng), n(rng));
  Eigen::HouseholderQR<Eigen::Matrix4cd> qr(z);
  return qr.householderQ();
}

inline Eigen::Matrix2cd random_unitary2(std::mt19937& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Matrix2cd z;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) z(r, c) = cplx(n(rng), n(rng));
  Eigen::HouseholderQR<Eigen::Matrix2cd> qr(z);
  return qr.householderQ();
}

/// Independent equilibrium oracle: nonlinear Gauss-Seidel on the
/// dimensionless chain potential in long double. Each ion in turn is moved
/// to its force-free point between its neighbours (safeguarded Newton on a
/// bracket where the net force is monotone) with the others held fixed.
inline std::vector<long double> relaxed_positions(int n) {
  std::vector<long double> u(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) u[i] = 1.5L * (i - (n - 1) / 2.0L);
  auto force = [&](int i, long double x, long double& slope) {
    long double f = x;
    slope = 1.0L;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const long double d = x - u[j];
      f -= (d > 0 ? 1.0L : -1.0L) / (d * d);
      slope += 2.0L / std::fabs(d * d * d);
    }
    return f;
  };
  for (int sweep = 0; sweep < 20000; ++sweep) {
    long double change = 0.0L;
    for (int i = 0; i < n; ++i) {
      long double lo = i > 0 ? u[i - 1] : -1e3L, hi = i + 1 < n ? u[i + 1] : 1e3L;
      long double x = u[i];
      for (int it = 0; it < 200; ++it) {
        long double slope;
        const long double f = force(i, x, slope);
        if (f > 0) hi = x; else lo = x;
        long double next = x - f / slope;
        if (!(next > lo && next < hi)) next = 0.5L * (lo + hi);
        const long double step = std::fabs(next - x);
        x = next;
        if (step < 1e-19L) break;
      }
      change = std::max(change, std::fabs(x - u[i]));
      u[i] = x;
    }
    if (change < 1e-18L) break;
  }
  return u;
}

}  // namespace tgate::testing
