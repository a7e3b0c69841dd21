#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tgate/calibrate.hpp"
#include "tgate/report_io.hpp"

namespace tgate {

/// Where the field amplitude of a run comes from.
enum class FieldSource {
  value,         // field_amplitude_v_per_m as given
  pi_over_4,     // gamma^2 / delta^2 = pi / 4
  target_phase,  // ideal-gate conditional phase equals target_conditional_phase_rad
};

struct SweepSettings {
  SweepAxis axis = SweepAxis::tweezer_ratio;
  std::vector<double> grid;  // in the units named by the axis
};

/// A parsed run document. All physical quantities in the document carry a
/// unit suffix (_hz for cyclic frequencies, _v_per_m, _amu, _e, _rad) and
/// are converted to SI angular units here.
struct RunConfig {
  std::string name;
  bool has_gate = false;  // a trap-only document supports the modes command
  GateConfig gate;        // holds the trap even without a gate section
  SpaceSpec space;
  std::vector<double> nbar{0.0};
  double support_floor = 0.0;
  FieldSource field_source = FieldSource::value;
  double target_phase = 0.0;
  GateRunOptions options;
  std::optional<SweepSettings> sweep;
  std::vector<IonPair> table_pairs{{0, 1}, {0, 2}, {0, 3}, {1, 2}};
  int convergence_increment = 0;

  /// Resolved document with stable key order; its hash labels every output.
  Json resolved() const;
  std::string hash() const { return fnv1a_hex(resolved().dump()); }
};

/// Throws ConfigError naming the offending key for unknown keys, wrong
/// types, missing required entries, or invalid values.
RunConfig parse_run_config(const Json& document);
RunConfig load_run_config(const std::filesystem::path& path);

/// Replace the field amplitude according to field_source.
void resolve_field(RunConfig& config, const CrystalModes& modes);

SweepSpec make_sweep_spec(const RunConfig& config);
TableSpec make_table_spec(const RunConfig& config);

}  // namespace tgate
