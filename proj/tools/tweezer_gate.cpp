// Command-line front end: normal modes, phase-space trajectories, single
// gate reports, fidelity sweeps and the four-ion pair table.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>

#include "tgate/run_config.hpp"

namespace fs = std::filesystem;
using namespace tgate;

namespace {

constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

struct Options {
  std::string config;
  std::string out_dir = ".";
  int jobs = 1;
  std::optional<double> tol;
};

using Outputs = std::map<std::string, std::string>;  // file name -> content

RunConfig load(const Options& opt, bool need_gate = true) {
  RunConfig rc = load_run_config(opt.config);
  if (opt.tol) {
    if (!(*opt.tol >= 1e-12 && *opt.tol <= 1e-6)) throw ConfigError("--tol must lie in [1e-12, 1e-6]");
    rc.options.tol = *opt.tol;
  }
  if (opt.jobs < 1) throw ConfigError("--jobs must be >= 1");
  if (need_gate && !rc.has_gate) throw ConfigError("config has no gate section");
  return rc;
}

std::string d(double v) { return format_double(v); }

Json conventions(const RunConfig& rc) {
  return {{"qubit_labels", "|b_i b_j>, sigma_z|1> = +|1>, label index 2 b_i + b_j"},
          {"pi_pulse", "ideal sigma_x, no phase"},
          {"detuning_sign", "mu = w_com(mixed-spin branch) + delta, delta signed as configured"},
          {"pulse_length", "tau = 2 pi / |delta| plus one ramp length"},
          {"pair_indexing", "1-based chain positions"},
          {"echo", rc.gate.pulses.size() == 4 ? "see gate.pulses" : "custom"}};
}

Outputs cmd_modes(const Options& opt) {
  const RunConfig rc = load(opt, false);
  const CrystalModes modes = normal_modes(rc.gate.trap);
  const std::string hash = rc.hash();
  const int n = rc.gate.trap.n_ions;
  std::vector<std::string> header{"mode", "frequency_hz", "ratio_to_com"};
  for (int i = 0; i < n; ++i) header.push_back("b_ion" + std::to_string(i + 1));
  header.push_back("config_hash");
  CsvTable table(header);
  for (int m = 0; m < n; ++m) {
    std::vector<std::string> row{std::to_string(m), d(angular_to_hz(modes.frequencies(m))),
                                 d(modes.frequencies(m) / modes.frequencies(0))};
    for (int i = 0; i < n; ++i) row.push_back(d(modes.vectors(i, m)));
    row.push_back(hash);
    table.add_row(row);
  }
  CsvTable pos({"ion", "position_scaled", "position_m", "config_hash"});
  const double ell = rc.gate.trap.coulomb_length();
  for (int i = 0; i < n; ++i)
    pos.add_row({std::to_string(i + 1), d(modes.positions(i)), d(modes.positions(i) * ell), hash});
  Json manifest{{"config", rc.resolved()}, {"config_hash", hash}, {"files", {"modes.csv", "positions.csv"}}};
  return {{"modes.csv", table.str()}, {"positions.csv", pos.str()}, {"modes_manifest.json", dump(manifest)}};
}

Outputs cmd_phasespace(const Options& opt) {
  RunConfig rc = load(opt);
  const CrystalModes modes = normal_modes(rc.gate.trap);
  resolve_field(rc, modes);
  const std::string hash = rc.hash();
  Eigen::VectorXcd ground = Eigen::VectorXcd::Zero(rc.space.motional_dim());
  ground(0) = 1.0;
  std::array<GateResult, 4> results;
  std::array<std::string, 4> errors;
  parallel_for(4, opt.jobs, [&](std::size_t q) {
    Eigen::Vector4cd qubit = Eigen::Vector4cd::Zero();
    qubit(static_cast<Eigen::Index>(q)) = 1.0;
    try {
      results[q] = run_gate(rc.gate, modes, rc.space, qubit, ground, rc.options);
    } catch (const NumericalError& e) {
      errors[q] = e.what();
    }
  });
  for (int q = 0; q < 4; ++q)
    if (!errors[q].empty())
      throw NumericalError("state |" + qubit_label_string(q) + ">: " + errors[q]);

  Outputs out;
  Json states = Json::array();
  for (int q = 0; q < 4; ++q) {
    const Trajectory& tr = results[q].trajectory;
    const std::string label = qubit_label_string(q);
    CsvTable table({"time_s", "re_alpha", "im_alpha", "qubit_state_label", "config_hash"});
    double max_abs = 0.0;
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
      const cplx a = tr.alpha(static_cast<Eigen::Index>(k), 0);
      max_abs = std::max(max_abs, std::abs(a));
      table.add_row({d(tr.times[k]), d(a.real()), d(a.imag()), label, hash});
    }
    const std::string file = "trajectory_" + label + ".csv";
    out[file] = table.str();
    const double final_abs = std::abs(tr.alpha(tr.alpha.rows() - 1, 0));
    states.push_back({{"qubit_state_label", label},
                      {"file", file},
                      {"samples", tr.times.size()},
                      {"max_abs_alpha", max_abs},
                      {"final_abs_alpha", final_abs},
                      {"closure_ratio", max_abs > 0.0 ? final_abs / max_abs : 0.0},
                      {"norm_drift", results[q].norm_drift}});
  }
  Json manifest{{"config", rc.resolved()}, {"config_hash", hash}, {"states", states},
                {"conventions", conventions(rc)}};
  out["phasespace_manifest.json"] = dump(manifest);
  return out;
}

Json consistency_json(const RunConfig& rc, const CrystalModes& modes, const RunConfig& original) {
  const FieldConsistency fc = field_consistency(rc.gate.trap, rc.gate.detuning, rc.gate.field_amplitude);
  const EffectiveModel em = effective_model(rc.gate, modes);
  return {{"field_pi_over_4_v_per_m", fc.field_pi_over_4},
          {"gamma_pi_over_4_rad_s", fc.gamma_pi_over_4},
          {"field_used_v_per_m", fc.field_given},
          {"field_configured_v_per_m", original.gate.field_amplitude},
          {"gamma_used_rad_s", fc.gamma_given},
          {"gamma_sq_over_delta_sq_used", fc.ratio_sq_given},
          {"field_ratio_pi_over_4_to_used", fc.field_ratio},
          {"zz_rate_rad_s", em.zz_rate},
          {"w_plus_rate_rad_s", em.w_plus_rate},
          {"w_minus_rate_rad_s", em.w_minus_rate},
          {"g_plus_hz", angular_to_hz(em.g_plus)},
          {"g_minus_hz", angular_to_hz(em.g_minus)},
          {"dominant_zz_regime", em.dominant_zz_regime}};
}

Outputs cmd_gate(const Options& opt) {
  const RunConfig original = load(opt);
  RunConfig rc = original;
  const CrystalModes modes = normal_modes(rc.gate.trap);
  resolve_field(rc, modes);
  const std::string hash = rc.hash();
  std::vector<ThermalPoint> temps;
  for (double nb : rc.nbar) temps.push_back({std::vector<double>(static_cast<std::size_t>(rc.space.n_modes()), nb)});
  GateRunOptions o = rc.options;
  o.samples_per_pulse = 0;
  const auto reports = thermal_reports(rc.gate, modes, rc.space, temps, o, rc.support_floor);
  const IdealGate ideal = ideal_gate(rc.gate, modes);

  CsvTable table({"nbar", "fidelity", "infidelity_x1e4", "conditional_phase", "predicted_conditional_phase",
                  "config_hash"});
  Json reps = Json::array();
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const auto& r = reports[k];
    table.add_row({d(rc.nbar[k]), d(r.fidelity), d((1.0 - r.fidelity) * 1e4), d(r.conditional_phase),
                   d(r.predicted_conditional_phase), hash});
    Json rj = to_json(r);
    rj["phase_relative_deviation"] =
        r.predicted_conditional_phase != 0.0
            ? std::abs(r.conditional_phase - r.predicted_conditional_phase) / std::abs(r.predicted_conditional_phase)
            : 0.0;
    reps.push_back(rj);
  }
  Json report{{"config", rc.resolved()},
              {"config_hash", hash},
              {"drive_frequency_hz", angular_to_hz(resolve_drive_frequency(rc.gate, modes))},
              {"ideal_gate", {{"phases", std::vector<double>(ideal.phases.data(), ideal.phases.data() + 4)},
                              {"recipe", ideal.recipe}}},
              {"reports", reps},
              {"consistency", consistency_json(rc, modes, original)},
              {"conventions", conventions(rc)}};
  return {{"gate.csv", table.str()}, {"gate_report.json", dump(report)}};
}

Outputs cmd_sweep(const Options& opt) {
  RunConfig rc = load(opt);
  if (!rc.sweep) throw ConfigError("config has no sweep section");
  const CrystalModes modes = normal_modes(rc.gate.trap);
  resolve_field(rc, modes);
  const std::string hash = rc.hash();
  const SweepSpec spec = make_sweep_spec(rc);
  const auto points = run_sweep(spec, opt.jobs, (fs::path(opt.out_dir) / "cache").string());

  const std::string axis = to_string(spec.axis);
  CsvTable table({axis, "nbar", "fidelity", "conditional_phase", "predicted_conditional_phase", "infidelity_x1e4",
                  "meets_0.99", "meets_0.999", "error", "point_hash", "config_hash"});
  auto axis_value = [&](double v) {
    return (spec.axis == SweepAxis::tweezer_frequency || spec.axis == SweepAxis::detuning) ? angular_to_hz(v) : v;
  };
  bool any_error = false;
  for (const auto& p : points) {
    if (!p.error.empty()) {
      any_error = true;
      for (double nb : p.nbar)
        table.add_row({d(axis_value(p.value)), d(nb), "", "", "", "", "", "", p.error, p.config_hash, hash});
      continue;
    }
    for (std::size_t k = 0; k < p.reports.size(); ++k) {
      const auto& r = p.reports[k];
      table.add_row({d(axis_value(p.value)), d(p.nbar[k]), d(r.fidelity), d(r.conditional_phase),
                     d(r.predicted_conditional_phase), d((1.0 - r.fidelity) * 1e4),
                     r.fidelity >= 0.99 ? "1" : "0", r.fidelity >= 0.999 ? "1" : "0", "", p.config_hash, hash});
    }
  }
  Json crossings = Json::array();
  const std::size_t n_temps = spec.axis == SweepAxis::nbar ? 0 : spec.nbar_values.size();
  for (std::size_t t = 0; t < n_temps; ++t)
    for (double target : spec.fidelity_targets) {
      const auto c = threshold_crossing(points, t, target);
      crossings.push_back({{"nbar", spec.nbar_values[t]},
                           {"target", target},
                           {"stays_above_from", c ? Json(axis_value(*c)) : Json(nullptr)}});
    }
  Json pts = Json::array();
  for (const auto& p : points) pts.push_back(to_json(p));
  Json report{{"config", rc.resolved()}, {"config_hash", hash}, {"axis", axis}, {"crossings", crossings},
              {"points", pts}, {"any_point_failed", any_error}, {"conventions", conventions(rc)}};
  return {{"sweep.csv", table.str()}, {"sweep.json", dump(report)}};
}

Outputs cmd_table4(const Options& opt) {
  RunConfig rc = load(opt);
  const CrystalModes modes = normal_modes(rc.gate.trap);
  resolve_field(rc, modes);
  const std::string hash = rc.hash();
  const TableSpec spec = make_table_spec(rc);
  const auto rows = four_ion_table(spec, opt.jobs, (fs::path(opt.out_dir) / "cache").string());
  CsvTable table({"pair", "infidelity_x1e4", "omega_com_minus_mu_khz", "fidelity", "conditional_phase",
                  "predicted_conditional_phase", "convergence_delta", "error", "config_hash"});
  Json arr = Json::array();
  std::string first_error;
  for (const auto& r : rows) {
    const std::string pair = "(" + std::to_string(r.pair.i + 1) + "," + std::to_string(r.pair.j + 1) + ")";
    table.add_row({pair, r.error.empty() ? d(r.infidelity_x1e4) : "", d(r.com_minus_drive_hz / 1e3),
                   r.error.empty() ? d(r.fidelity) : "", r.error.empty() ? d(r.conditional_phase) : "",
                   r.error.empty() ? d(r.predicted_conditional_phase) : "",
                   r.convergence_delta ? d(*r.convergence_delta) : "", r.error, hash});
    arr.push_back(to_json(r));
    if (!r.error.empty() && first_error.empty()) first_error = pair + ": " + r.error;
  }
  if (!first_error.empty()) throw NumericalError(first_error);
  Json report{{"config", rc.resolved()}, {"config_hash", hash}, {"rows", arr}, {"conventions", conventions(rc)}};
  return {{"table4.csv", table.str()}, {"table4.json", dump(report)}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tweezer-controlled two-qubit gate simulator"};
  app.require_subcommand(1);
  Options opt;
  std::map<std::string, Outputs (*)(const Options&)> commands{
      {"modes", cmd_modes}, {"phasespace", cmd_phasespace}, {"gate", cmd_gate},
      {"sweep", cmd_sweep}, {"table4", cmd_table4}};
  const std::map<std::string, std::string> help{
      {"modes", "equilibrium positions and axial normal modes"},
      {"phasespace", "COM phase-space trajectories for the four basis states"},
      {"gate", "process fidelity and conditional phase at one operating point"},
      {"sweep", "fidelity along one parameter axis"},
      {"table4", "fidelities and drive corrections for the pairs of a four-ion chain"}};
  for (const auto& [name, fn] : commands) {
    auto* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", opt.config, "JSON run configuration")->required();
    sub->add_option("--out-dir", opt.out_dir, "output directory");
    sub->add_option("--jobs", opt.jobs, "worker threads");
    sub->add_option_function<double>("--tol", [&opt](double v) { opt.tol = v; }, "integrator tolerance");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_config;
  }

  try {
    for (const auto& [name, fn] : commands) {
      if (!app.got_subcommand(name)) continue;
      const Outputs out = fn(opt);
      for (const auto& [file, content] : out) atomic_write(fs::path(opt.out_dir) / file, content);
      for (const auto& [file, content] : out) std::cout << (fs::path(opt.out_dir) / file).string() << "\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return exit_numerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
