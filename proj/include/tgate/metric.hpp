#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

#include "tgate/evolve.hpp"

namespace tgate {

/// {1, X, Y, Z} (x) {1, X, Y, Z}, lexicographic, qubit i as the left factor.
const std::array<Eigen::Matrix4cd, 16>& pauli_basis();

struct QuantumChannel {
  std::array<Eigen::Matrix4cd, 16> images;  // image of pauli_basis()[l]
  std::vector<double> nbar;
  std::vector<int> cutoffs;
  double tail = 0.0;

  /// Image of |a><b|.
  Eigen::Matrix4cd apply_basis(int a, int b) const;
  Eigen::Matrix4cd apply(const Eigen::Matrix4cd& rho) const;
  /// Choi matrix sum_ab |a><b| (x) Lambda(|a><b|).
  Eigen::Matrix<cplx, 16, 16> choi() const;
  /// Throws NumericalError when trace preservation or complete positivity
  /// fail beyond tol.
  void check(double tol = 1e-6) const;
};

/// Channel of a unitary on the qubit space.
QuantumChannel unitary_channel(const Eigen::Matrix4cd& u);

/// Channel from final composite states: columns[k] holds U|a, n_k> for a = 0..3
/// in its four columns, weights[k] the thermal weight of n_k.
QuantumChannel channel_from_columns(const std::vector<Eigen::MatrixXcd>& columns,
                                    const std::vector<double>& weights, Eigen::Index motional_dim);

QuantumChannel channel_from_sectors(const SectorStates& states, const Eigen::VectorXd& weights);

/// Maximum thermal tail (plus any dropped support weight) tolerated by
/// reconstruct_channel.
inline constexpr double max_thermal_tail = 1e-4;

/// Full simulation of the gate for a thermal initial motional state.
QuantumChannel reconstruct_channel(const GateConfig& config, const CrystalModes& modes,
                                   const ThermalEnsemble& thermal, const SpaceSpec& space,
                                   const GateRunOptions& options = {}, double support_floor = 0.0);

/// F = (sum_l tr[U sigma_l^dag U^dag Lambda(sigma_l)] + d^2) / (d^2 (d + 1)).
double process_fidelity(const QuantumChannel& channel, const Eigen::Matrix4cd& ideal);

struct IdealGate {
  Eigen::Vector4d phases = Eigen::Vector4d::Zero();  // unwrapped, u_00 phase removed
  std::string recipe;

  Eigen::Matrix4cd unitary() const;
  /// Unwrapped conditional phase from the phase vector.
  double conditional_phase_unwrapped() const { return phases(0) + phases(3) - phases(1) - phases(2); }
};

/// Second-order phase integral of one pulse envelope at detuning d:
/// int_0^T dt int_0^t dt' f(t) f(t') sin(d (t - t')).
double envelope_phase_integral(double duration, double ramp, double detuning);

/// Frequencies of the retained modes for a qubit sector with the tweezers
/// at a fraction f of full intensity.
Eigen::VectorXd sector_mode_frequencies(const GateConfig& config, const CrystalModes& modes,
                                        SpinConfig spins, double f = 1.0);
double sector_com_frequency(const GateConfig& config, const CrystalModes& modes, SpinConfig spins);

/// Qubit-diagonal gate predicted by the effective model: every field pulse
/// adds -gamma^2 * (phase integral at mu - w_com(q)) to sector q, every
/// tweezer pulse adds the zero-point shift of the retained modes; the
/// pi-pulse frames are followed label by label.
IdealGate ideal_gate(const GateConfig& config, const CrystalModes& modes);

/// arg u00 + arg u11 - arg u01 - arg u10 wrapped to (-pi, pi].
double conditional_phase(const Eigen::Matrix4cd& gate, double tol = 1e-6);

/// Diagonal unitary carrying the coherence phases Lambda(|a><0|)_{a0}.
Eigen::Matrix4cd diagonal_gate_estimate(const QuantumChannel& channel);

struct LocalInvariants {
  cplx g1;
  double g2 = 0.0;
};

/// Makhlin invariants through the magic basis.
LocalInvariants local_invariants(const Eigen::Matrix4cd& u, double tol = 1e-8);

struct FidelityReport {
  double fidelity = 0.0;
  double conditional_phase = 0.0;            // extracted from the simulated channel
  double predicted_conditional_phase = 0.0;  // from the ideal gate
  LocalInvariants invariants;                // of the extracted diagonal gate
  std::vector<double> nbar;
  std::vector<int> cutoffs;
  double tail = 0.0;
};

FidelityReport fidelity_report(const QuantumChannel& channel, const IdealGate& ideal);

double wrap_phase(double phi);

}  // namespace tgate
