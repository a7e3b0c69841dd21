#include "tgate/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace tgate {

namespace {

// Reads keys from one JSON object and rejects whatever it did not read.
class Section {
 public:
  Section(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const Json& raw(const std::string& key) {
    if (!j_.contains(key)) throw ConfigError(where(key) + ": required key is missing");
    used_.insert(key);
    return j_.at(key);
  }

  template <typename T>
  T get(const std::string& key) {
    const Json& v = raw(key);
    try {
      return v.get<T>();
    } catch (const Json::exception&) {
      throw ConfigError(where(key) + ": wrong type (" + std::string(v.type_name()) + ")");
    }
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    return has(key) ? get<T>(key) : fallback;
  }

  double positive(const std::string& key) {
    const double v = get<double>(key);
    if (!(v > 0.0)) throw ConfigError(where(key) + ": must be positive");
    return v;
  }

  Section sub(const std::string& key) { return Section(raw(key), where(key)); }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (used_.count(it.key())) continue;
      std::string msg = where(it.key()) + ": unknown key";
      static const char* suffixes[] = {"_hz", "_v_per_m", "_amu", "_e", "_rad"};
      for (const char* s : suffixes)
        if (known_with_suffix_.count(it.key() + s)) msg += " (did you mean '" + it.key() + s + "'?)";
      throw ConfigError(msg);
    }
  }

  void expect(std::initializer_list<const char*> keys) {
    for (const char* k : keys) known_with_suffix_.insert(k);
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> used_;
  std::set<std::string> known_with_suffix_;
};

IonPair parse_pair(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    throw ConfigError(where + ": expected a pair of 1-based ion positions");
  return {j[0].get<int>() - 1, j[1].get<int>() - 1};
}

std::vector<PulsePlan> parse_pulses(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a non-empty array");
  std::vector<PulsePlan> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    Section s(j[k], where + "[" + std::to_string(k) + "]");
    PulsePlan p;
    p.field_on = s.get<bool>("field_on");
    p.tweezer_on = s.get<bool>("tweezer_on", true);
    if (s.has("flips_after")) {
      for (const auto& f : s.raw("flips_after")) {
        if (f == "i") p.flips_after.push_back(0);
        else if (f == "j") p.flips_after.push_back(1);
        else throw ConfigError(s.where("flips_after") + ": entries must be \"i\" or \"j\"");
      }
    }
    s.finish();
    out.push_back(std::move(p));
  }
  return out;
}

FieldSource field_source_from_string(const std::string& s, const std::string& where) {
  if (s == "value") return FieldSource::value;
  if (s == "pi_over_4") return FieldSource::pi_over_4;
  if (s == "target_phase") return FieldSource::target_phase;
  throw ConfigError(where + ": expected value, pi_over_4 or target_phase");
}

std::string to_string(FieldSource f) {
  switch (f) {
    case FieldSource::value: return "value";
    case FieldSource::pi_over_4: return "pi_over_4";
    case FieldSource::target_phase: return "target_phase";
  }
  return "";
}

}  // namespace

RunConfig parse_run_config(const Json& document) {
  RunConfig rc;
  Section root(document, "");
  rc.name = root.get<std::string>("name", "run");

  {
    Section t = root.sub("trap");
    t.expect({"ion_mass_amu", "axial_frequency_hz", "charge_e"});
    rc.gate.trap.n_ions = t.get<int>("n_ions");
    rc.gate.trap.ion_mass = t.positive("ion_mass_amu") * constants::atomic_mass_unit;
    rc.gate.trap.charge = t.get<double>("charge_e", 1.0) * constants::elementary_charge;
    rc.gate.trap.axial_frequency = hz_to_angular(t.positive("axial_frequency_hz"));
    t.finish();
    rc.gate.trap.validate();
  }

  rc.has_gate = root.has("gate");
  if (rc.has_gate) {
    Section g = root.sub("gate");
    g.expect({"tweezer_frequency_hz", "field_amplitude_v_per_m", "detuning_hz", "drive_frequency_hz",
              "target_conditional_phase_rad"});
    if (g.has("pair")) rc.gate.pair = parse_pair(g.raw("pair"), g.where("pair"));
    const bool by_freq = g.has("tweezer_frequency_hz"), by_ratio = g.has("tweezer_ratio");
    if (by_freq && by_ratio) throw ConfigError("gate: give tweezer_frequency_hz or tweezer_ratio, not both");
    if (by_freq) rc.gate.tweezer_frequency = hz_to_angular(g.get<double>("tweezer_frequency_hz"));
    if (by_ratio) rc.gate.tweezer_frequency = g.get<double>("tweezer_ratio") * rc.gate.trap.axial_frequency;
    if (rc.gate.tweezer_frequency < 0.0) throw ConfigError("gate: tweezer frequency must be >= 0");
    rc.gate.field_amplitude = g.get<double>("field_amplitude_v_per_m", 0.0);
    rc.field_source = field_source_from_string(g.get<std::string>("field_source", "value"), g.where("field_source"));
    rc.target_phase = g.get<double>("target_conditional_phase_rad", 0.0);
    rc.gate.detuning = hz_to_angular(g.get<double>("detuning_hz"));
    if (g.has("drive_frequency_hz")) rc.gate.drive_frequency = hz_to_angular(g.positive("drive_frequency_hz"));
    const auto corr = g.get<std::string>("drive_correction", "exact");
    if (corr == "exact") rc.gate.correction = DriveCorrection::exact;
    else if (corr == "none") rc.gate.correction = DriveCorrection::none;
    else throw ConfigError("gate.drive_correction: expected exact or none");
    if (g.has("echo_schedule") && g.has("pulses"))
      throw ConfigError("gate: give echo_schedule or pulses, not both");
    if (g.has("pulses")) rc.gate.pulses = parse_pulses(g.raw("pulses"), g.where("pulses"));
    else rc.gate.pulses = echo_schedule(echo_preset_from_string(g.get<std::string>("echo_schedule", "balanced")));
    rc.gate.ramp_fraction = g.get<double>("ramp_fraction", 0.05);
    const auto modes = g.get<std::string>("modes", "com");
    if (modes == "com") rc.gate.modes = ModeSet::com_only;
    else if (modes == "all") rc.gate.modes = ModeSet::all;
    else throw ConfigError("gate.modes: expected com or all");
    g.finish();
    rc.gate.validate();
  }

  if (rc.has_gate) {
    Section s = root.sub("space");
    rc.space.mode_cutoffs = s.get<std::vector<int>>("cutoffs");
    s.finish();
    if (static_cast<std::size_t>(rc.space.n_modes()) != rc.gate.retained_modes().size())
      throw ConfigError("space.cutoffs: one cutoff per retained mode is required (" +
                        std::to_string(rc.gate.retained_modes().size()) + ")");
    rc.space.validate();
  }

  if (root.has("thermal")) {
    Section t = root.sub("thermal");
    rc.nbar = t.get<std::vector<double>>("nbar", rc.nbar);
    rc.support_floor = t.get<double>("support_floor", 0.0);
    t.finish();
    if (rc.nbar.empty()) throw ConfigError("thermal.nbar: at least one value is required");
    for (double n : rc.nbar)
      if (!(n >= 0.0)) throw ConfigError("thermal.nbar: values must be >= 0");
    if (!(rc.support_floor >= 0.0 && rc.support_floor < 1.0))
      throw ConfigError("thermal.support_floor: must lie in [0, 1)");
  }

  if (root.has("numerics")) {
    Section n = root.sub("numerics");
    rc.options.tol = n.get<double>("tol", rc.options.tol);
    rc.options.max_step_fraction = n.get<double>("max_step_fraction", rc.options.max_step_fraction);
    rc.options.samples_per_pulse = n.get<int>("samples_per_pulse", 200);
    n.finish();
  } else {
    rc.options.samples_per_pulse = 200;
  }
  if (!(rc.options.tol >= 1e-12 && rc.options.tol <= 1e-6))
    throw ConfigError("numerics.tol: must lie in [1e-12, 1e-6]");
  if (!(rc.options.max_step_fraction > 0.0 && rc.options.max_step_fraction <= 0.05))
    throw ConfigError("numerics.max_step_fraction: must lie in (0, 0.05]");
  if (rc.options.samples_per_pulse < 200)
    throw ConfigError("numerics.samples_per_pulse: at least 200 samples per pulse are required");

  if (!rc.has_gate)
    for (const char* k : {"space", "thermal", "numerics", "sweep", "table"})
      if (root.has(k)) throw ConfigError(std::string(k) + ": requires a gate section");

  if (root.has("sweep")) {
    Section s = root.sub("sweep");
    SweepSettings sw;
    sw.axis = sweep_axis_from_string(s.get<std::string>("axis"));
    sw.grid = s.get<std::vector<double>>("grid");
    s.finish();
    rc.sweep = sw;
    make_sweep_spec(rc);  // validates the grid
  }

  if (root.has("table")) {
    Section t = root.sub("table");
    if (t.has("pairs")) {
      rc.table_pairs.clear();
      for (const auto& p : t.raw("pairs")) rc.table_pairs.push_back(parse_pair(p, t.where("pairs")));
    }
    rc.convergence_increment = t.get<int>("convergence_increment", 0);
    t.finish();
    if (rc.convergence_increment < 0) throw ConfigError("table.convergence_increment: must be >= 0");
  }
  root.finish();
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_run_config(doc);
}

void resolve_field(RunConfig& config, const CrystalModes& modes) {
  switch (config.field_source) {
    case FieldSource::value: return;
    case FieldSource::pi_over_4:
      config.gate.field_amplitude = field_for_gate_condition(config.gate, modes, FieldRule::pi_over_4);
      return;
    case FieldSource::target_phase:
      config.gate.field_amplitude =
          field_for_gate_condition(config.gate, modes, FieldRule::target_conditional_phase, config.target_phase);
      return;
  }
}

Json RunConfig::resolved() const {
  Json j;
  j["name"] = name;
  if (!has_gate) {
    j["trap"] = to_json(gate.trap);
    return j;
  }
  j["gate"] = to_json(gate);
  j["field_source"] = to_string(field_source);
  if (field_source == FieldSource::target_phase) j["target_conditional_phase_rad"] = target_phase;
  j["space"] = to_json(space);
  j["thermal"] = {{"nbar", nbar}, {"support_floor", support_floor}};
  j["numerics"] = to_json(options);
  if (sweep) j["sweep"] = {{"axis", to_string(sweep->axis)}, {"grid", sweep->grid}};
  Json pairs = Json::array();
  for (auto p : table_pairs) pairs.push_back({p.i + 1, p.j + 1});
  j["table"] = {{"pairs", pairs}, {"convergence_increment", convergence_increment}};
  return j;
}

SweepSpec make_sweep_spec(const RunConfig& config) {
  if (!config.sweep) throw ConfigError("config has no sweep section");
  SweepSpec spec;
  spec.axis = config.sweep->axis;
  spec.grid = config.sweep->grid;
  if (spec.axis == SweepAxis::tweezer_frequency || spec.axis == SweepAxis::detuning)
    for (double& v : spec.grid) v = hz_to_angular(v);
  spec.baseline = config.gate;
  spec.space = config.space;
  spec.nbar_values = config.nbar;
  spec.options = config.options;
  spec.options.samples_per_pulse = 0;
  spec.support_floor = config.support_floor;
  spec.validate();
  return spec;
}

TableSpec make_table_spec(const RunConfig& config) {
  TableSpec spec;
  spec.baseline = config.gate;
  spec.space = config.space;
  spec.options = config.options;
  spec.options.samples_per_pulse = 0;
  spec.convergence_increment = config.convergence_increment;
  spec.pairs = config.table_pairs;
  spec.validate();
  return spec;
}

}  // namespace tgate
