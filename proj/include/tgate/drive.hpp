#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <optional>
#include <string>
#include <vector>

#include "tgate/crystal.hpp"
#include "tgate/hilbert.hpp"

namespace tgate {

enum class ModeSet { com_only, all };

/// How the drive frequency is chosen when none is given explicitly.
enum class DriveCorrection {
  none,   // mu = w_com + delta
  exact,  // mu = (exact mixed-spin COM-branch frequency) + delta
};

/// One gate pulse: whether the field and tweezers are on, and which qubits
/// (0 = ion i, 1 = ion j) receive an ideal pi-pulse when it ends.
struct PulsePlan {
  bool field_on = false;
  bool tweezer_on = true;
  std::vector<int> flips_after;
};

enum class EchoPreset {
  /// Each pulse runs in a different qubit frame: flips i, j, i, j after the
  /// four pulses, field on in pulses 1 and 3. Cancels every qubit-dependent
  /// mode shift, to all orders, for a single mode.
  balanced,
  /// Flips (i,j), i, j after pulses 1-3, field on in pulses 1 and 4.
  literal,
};

std::vector<PulsePlan> echo_schedule(EchoPreset preset);
std::string to_string(EchoPreset preset);
EchoPreset echo_preset_from_string(const std::string& name);

struct GateConfig {
  TrapSpec trap;
  IonPair pair{0, 1};
  double tweezer_frequency = 0.0;  // rad/s
  double field_amplitude = 0.0;    // V/m
  double detuning = 0.0;           // rad/s, signed: mu = w_com + detuning
  std::optional<double> drive_frequency;  // rad/s, overrides the correction rule
  DriveCorrection correction = DriveCorrection::exact;
  std::vector<PulsePlan> pulses = echo_schedule(EchoPreset::balanced);
  double ramp_fraction = 0.05;  // ramp length as a fraction of tau
  ModeSet modes = ModeSet::com_only;

  void validate() const;
  /// tau = 2 pi / |delta|.
  double gate_time() const;
  double ramp_time() const { return ramp_fraction * gate_time(); }
  /// tau plus one ramp length, so that the ramp-smoothed window has the
  /// Fourier zero of a sharp pulse of length tau at the detuning.
  double pulse_duration() const { return gate_time() + ramp_time(); }
  double total_duration() const { return pulse_duration() * double(pulses.size()); }
  std::vector<int> retained_modes() const;
};

/// gamma = e E0 l_com / 2 with l_com = sqrt(hbar / (2 M w_com)), as rad/s.
double gamma_from_field(double field_amplitude, const TrapSpec& trap);
/// Inverse of gamma_from_field.
double field_from_gamma(double gamma, const TrapSpec& trap);

/// Pulse envelope at time t in [0, duration]: sin^2 rise over the ramp
/// length, flat top, mirrored fall.
double envelope(double t, double duration, double ramp);
double envelope(double t, const GateConfig& config);

/// Closed-form integrals of f and f^2 over one pulse.
double envelope_integral(const GateConfig& config);
double envelope_square_integral(const GateConfig& config);

struct EffectiveModel {
  double gamma = 0.0;
  double detuning = 0.0;
  double g_plus = 0.0;
  double g_minus = 0.0;
  double zz_rate = 0.0;       // -gamma^2 / (2 delta)
  double w_plus_rate = 0.0;   // gamma^2 / (g+ - delta)
  double w_minus_rate = 0.0;  // gamma^2 / (g- - delta)
  bool dominant_zz_regime = true;  // |delta| << |g+-|
};

/// Shift of the COM frequency for sigma_z^i + sigma_z^j = spin_sum.
double com_shift(const CrystalModes& modes, double tweezer_frequency, int spin_sum);

EffectiveModel effective_model(const GateConfig& config, const CrystalModes& modes);

/// Drive frequency actually used by the simulation.
double resolve_drive_frequency(const GateConfig& config, const CrystalModes& modes);

/// Spin of one qubit label bit: sigma_z|1> = +|1>.
inline int spin_of(int bit) { return bit ? 1 : -1; }
/// Qubit basis label q = 2 b_i + b_j.
inline SpinConfig spins_of(int q) { return {spin_of((q >> 1) & 1), spin_of(q & 1)}; }

/// A term coeff * exp(i frequency t) * op, plus its Hermitian conjugate when
/// paired.
struct DriveTerm {
  MonomialOperator op;
  MonomialOperator op_adjoint;
  double frequency = 0.0;
  double coeff_i = 0.0;  // multiplies sigma_z^i (tweezer) or the field envelope
  double coeff_j = 0.0;  // multiplies sigma_z^j
  bool paired = true;
};

/// Interaction-picture tweezer Hamiltonian including every cross-mode term
/// between the retained modes.
class TweezerHamiltonian {
 public:
  TweezerHamiltonian(const CrystalModes& modes, const std::vector<int>& retained, IonPair pair,
                     double tweezer_frequency, const SpaceSpec& space);

  /// y += prefactor * scale * H_tw(t; spins) x on the motional space.
  void apply_add(double t, SpinConfig spins, cplx prefactor, Eigen::Ref<const Eigen::MatrixXcd> x,
                 Eigen::Ref<Eigen::MatrixXcd> y) const;
  Eigen::SparseMatrix<cplx> motional(double t, SpinConfig spins) const;
  /// Full composite operator with sigma_z^i, sigma_z^j on the two qubits.
  Eigen::SparseMatrix<cplx> operator()(double t) const;

  const std::vector<DriveTerm>& terms() const { return terms_; }

 private:
  SpaceSpec space_;
  std::vector<DriveTerm> terms_;
};

/// H_E(t) = 2 gamma cos(mu t) (a e^{-i w t} + a^dag e^{i w t}) on the COM mode.
class FieldHamiltonian {
 public:
  FieldHamiltonian(double gamma, double drive_frequency, double com_frequency,
                   const SpaceSpec& space, int com_slot = 0);

  void apply_add(double t, cplx prefactor, Eigen::Ref<const Eigen::MatrixXcd> x, Eigen::Ref<Eigen::MatrixXcd> y) const;
  Eigen::SparseMatrix<cplx> motional(double t) const;
  Eigen::SparseMatrix<cplx> operator()(double t) const;

 private:
  SpaceSpec space_;
  std::vector<DriveTerm> terms_;
};

/// Complete gate Hamiltonian for one configuration; per qubit sector it acts
/// on the motional space only.
class GateHamiltonian {
 public:
  GateHamiltonian(const GateConfig& config, const CrystalModes& modes, const SpaceSpec& space);

  const SpaceSpec& space() const { return space_; }
  double drive_frequency() const { return mu_; }
  double gamma() const { return gamma_; }

  /// y = prefactor * H_q(t) x with the given envelope scales.
  void apply(double t, SpinConfig spins, double tweezer_scale, double field_scale, cplx prefactor,
             Eigen::Ref<const Eigen::MatrixXcd> x, Eigen::Ref<Eigen::MatrixXcd> y) const;

  Eigen::SparseMatrix<cplx> motional(double t, SpinConfig spins, double tweezer_scale,
                                     double field_scale) const;
  Eigen::SparseMatrix<cplx> composite(double t, double tweezer_scale, double field_scale) const;

 private:
  SpaceSpec space_;
  double mu_ = 0.0;
  double gamma_ = 0.0;
  TweezerHamiltonian tweezer_;
  FieldHamiltonian field_;
};

}  // namespace tgate
