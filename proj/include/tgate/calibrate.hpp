#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tgate/metric.hpp"

namespace tgate {

enum class FieldRule {
  pi_over_4,                 // gamma^2 / delta^2 = pi / 4
  target_conditional_phase,  // solve for the ideal-gate conditional phase
};

/// Field amplitude (V/m) meeting the gate condition. target_phase is used by
/// target_conditional_phase only; a target that the sign of the detuning
/// cannot reach is moved by 2 pi.
double field_for_gate_condition(const GateConfig& base, const CrystalModes& modes, FieldRule rule,
                                double target_phase = 0.0);

/// mu = (exact mixed-spin COM-branch frequency) + delta.
double corrected_drive_frequency(const TrapSpec& trap, IonPair pair, double tweezer_frequency,
                                 double detuning);

/// Side-by-side comparison of the pi/4 rule and a given field amplitude.
struct FieldConsistency {
  double detuning = 0.0;
  double field_pi_over_4 = 0.0;
  double gamma_pi_over_4 = 0.0;
  double field_given = 0.0;
  double gamma_given = 0.0;
  double ratio_sq_given = 0.0;  // gamma^2 / delta^2 at the given field
  double field_ratio = 0.0;     // field_pi_over_4 / field_given
};

FieldConsistency field_consistency(const TrapSpec& trap, double detuning, double field_given);

struct ThermalPoint {
  std::vector<double> nbar;  // one value per retained mode
};

/// Thermal reports for several initial temperatures from one set of Fock
/// propagations. The Fock support is the union of all requested ensembles.
std::vector<FidelityReport> thermal_reports(const GateConfig& config, const CrystalModes& modes,
                                            const SpaceSpec& space,
                                            const std::vector<ThermalPoint>& temperatures,
                                            const GateRunOptions& options = {},
                                            double support_floor = 0.0);

enum class SweepAxis { tweezer_frequency, tweezer_ratio, detuning, nbar, field_amplitude };

std::string to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(const std::string& name);

struct SweepSpec {
  SweepAxis axis = SweepAxis::tweezer_ratio;
  std::vector<double> grid;  // SI angular units for frequencies, V/m for fields
  GateConfig baseline;
  SpaceSpec space;
  std::vector<double> nbar_values{0.0};  // uniform across modes; ignored for the nbar axis
  GateRunOptions options;
  double support_floor = 0.0;
  std::vector<double> fidelity_targets{0.99, 0.999};

  void validate() const;
  /// Configuration of grid point k.
  GateConfig point_config(std::size_t k) const;
  std::vector<double> point_nbar(std::size_t k) const;
};

struct SweepPoint {
  double value = 0.0;
  std::string config_hash;
  std::vector<double> nbar;
  std::vector<FidelityReport> reports;  // one per entry of nbar
  std::string error;                    // non-empty when the point failed
  bool cached = false;
};

/// Canonical 64-bit FNV-1a hash of everything that determines a point.
std::string sweep_point_hash(const SweepSpec& spec, std::size_t k);

/// Runs every grid point; failures are recorded per point. When cache_dir is
/// set, finished points are stored there under their hash and reused.
std::vector<SweepPoint> run_sweep(const SweepSpec& spec, int jobs = 1,
                                  const std::optional<std::string>& cache_dir = std::nullopt);

/// First grid value from which every later point meets the target, if any.
std::optional<double> threshold_crossing(const std::vector<SweepPoint>& points,
                                         std::size_t nbar_index, double target);

struct PairStudy {
  IonPair pair;  // 0-based
  double drive_frequency = 0.0;
  double com_minus_drive_hz = 0.0;
  double fidelity = 0.0;
  double infidelity_x1e4 = 0.0;
  double conditional_phase = 0.0;
  double predicted_conditional_phase = 0.0;
  std::optional<double> convergence_delta;  // |F(cutoffs + increment) - F|
  std::string config_hash;
  std::string error;
};

struct TableSpec {
  GateConfig baseline;  // four-ion trap, all modes retained
  SpaceSpec space;
  GateRunOptions options;
  int convergence_increment = 0;  // 0 disables the check
  std::vector<IonPair> pairs{{0, 1}, {0, 2}, {0, 3}, {1, 2}};

  void validate() const;
};

std::vector<PairStudy> four_ion_table(const TableSpec& spec, int jobs = 1,
                                      const std::optional<std::string>& cache_dir = std::nullopt);

/// Run fn(k) for k in [0, n) on up to jobs threads.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace tgate
