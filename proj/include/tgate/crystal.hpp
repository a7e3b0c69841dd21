#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "tgate/common.hpp"

namespace tgate {

struct TrapSpec {
  int n_ions = 2;
  double ion_mass = 0.0;  // kg
  double charge = constants::elementary_charge;
  double axial_frequency = 0.0;  // rad/s, equals the bare COM frequency

  void validate() const;
  /// (e^2 / (4 pi eps0 M w_z^2))^(1/3), the natural length of the chain.
  double coulomb_length() const;
};

/// Axial normal modes of a linear chain. Positions are in units of the
/// Coulomb length, the Hessian in units of axial_frequency^2.
struct CrystalModes {
  Eigen::VectorXd positions;
  Eigen::VectorXd frequencies;  // rad/s, ascending
  Eigen::MatrixXd vectors;      // column m is b_m
  Eigen::MatrixXd hessian;
  double axial_frequency = 0.0;

  Eigen::Index size() const { return frequencies.size(); }
  static constexpr Eigen::Index com = 0;
};

struct IonPair {
  int i = 0;
  int j = 1;
};

/// Eigenvalues of sigma_z for the two addressed ions, +1 for |1>.
struct SpinConfig {
  int si = 1;
  int sj = 1;
};

struct TweezerPerturbation {
  double tweezer_frequency = 0.0;  // rad/s
  IonPair pair;
  SpinConfig spins;

  void validate(int n_ions) const;
};

enum class ShiftMethod { perturbative, exact };

// Dimensionless chain mechanics. V(u) = sum u_i^2 / 2 + sum_{i<j} 1/|u_i-u_j|.

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> chain_force_residual(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& u) {
  const Eigen::Index n = u.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> r = u;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const Scalar d = u(i) - u(j);
      r(i) -= (d > Scalar(0) ? Scalar(1) : Scalar(-1)) / (d * d);
    }
  }
  return r;
}

/// Mass-weighted axial Hessian in units of w_z^2. Throws on coincident ions.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> chain_hessian(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& u) {
  using std::abs;
  const Eigen::Index n = u.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Scalar d = abs(u(i) - u(j));
      if (!(d > Scalar(0)))
        throw NumericalError("axial_hessian: ions " + std::to_string(i) + " and " +
                             std::to_string(j) + " coincide");
      const Scalar k = Scalar(2) / (d * d * d);
      a(i, j) = -k;
      a(j, i) = -k;
      a(i, i) += k;
      a(j, j) += k;
    }
  }
  return a;
}

Eigen::VectorXd equilibrium_positions(const TrapSpec& trap);

Eigen::MatrixXd axial_hessian(const TrapSpec& trap, const Eigen::VectorXd& positions);

CrystalModes normal_modes(const TrapSpec& trap);

/// Mode frequencies (rad/s, ascending) in the presence of state-dependent
/// tweezers on the pair.
Eigen::VectorXd shifted_mode_frequencies(const CrystalModes& modes,
                                         const TweezerPerturbation& pert,
                                         ShiftMethod method);

/// Frequency of the COM branch (largest overlap with the uniform vector)
/// of the exactly diagonalised, tweezer-modified Hessian.
double exact_com_branch_frequency(const CrystalModes& modes, const TweezerPerturbation& pert);

/// w_com - w~_com for the resonant mixed-spin manifold (+1 on i, -1 on j),
/// from exact diagonalisation. Zero when the tweezers are off.
double drive_frequency_correction(const TrapSpec& trap, const TweezerPerturbation& pert);

}  // namespace tgate
