#include "tgate/calibrate.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "tgate/report_io.hpp"

namespace tgate {

double field_for_gate_condition(const GateConfig& base, const CrystalModes& modes, FieldRule rule,
                                double target_phase) {
  if (base.detuning == 0.0) throw ConfigError("field_for_gate_condition: detuning must be non-zero");
  if (rule == FieldRule::pi_over_4) {
    const double gamma = std::abs(base.detuning) * std::sqrt(constants::pi) / 2.0;
    return field_from_gamma(gamma, base.trap);
  }
  auto phase_at = [&](double e_sq) {
    GateConfig c = base;
    c.field_amplitude = std::sqrt(std::max(e_sq, 0.0));
    return ideal_gate(c, modes).conditional_phase_unwrapped();
  };
  const double phi0 = phase_at(0.0);
  if (std::abs(wrap_phase(target_phase - phi0)) == 0.0) return 0.0;

  // The phase is affine in E0^2; the probe field fixes its direction.
  const double probe = field_from_gamma(std::abs(base.detuning) * 0.1, base.trap);
  const double slope = (phase_at(probe * probe) - phi0) / (probe * probe);
  if (slope == 0.0) throw NumericalError("field_for_gate_condition: conditional phase does not depend on E0");
  double goal = phi0 + wrap_phase(target_phase - phi0);
  if ((goal - phi0) * slope < 0.0) goal += slope > 0.0 ? constants::two_pi : -constants::two_pi;

  auto f = [&](double e_sq) { return phase_at(e_sq) - goal; };
  double lo = 0.0, hi = probe * probe;
  double f_lo = f(lo), f_hi = f(hi);
  for (int k = 0; k < 60 && f_lo * f_hi > 0.0; ++k) {
    hi *= 4.0;
    f_hi = f(hi);
  }
  if (f_lo * f_hi > 0.0) {
    std::ostringstream msg;
    msg << "field_for_gate_condition: root not bracketed in E0 in [0, " << std::sqrt(hi)
        << "] V/m (phase offsets " << f_lo << ", " << f_hi << ")";
    throw NumericalError(msg.str());
  }
  if (f_hi == 0.0) return std::sqrt(hi);
  std::uintmax_t iters = 200;
  const auto root = boost::math::tools::toms748_solve(
      f, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(50), iters);
  return std::sqrt(0.5 * (root.first + root.second));
}

double corrected_drive_frequency(const TrapSpec& trap, IonPair pair, double tweezer_frequency,
                                 double detuning) {
  const TweezerPerturbation pert{tweezer_frequency, pair, {+1, -1}};
  pert.validate(trap.n_ions);
  return trap.axial_frequency - drive_frequency_correction(trap, pert) + detuning;
}

FieldConsistency field_consistency(const TrapSpec& trap, double detuning, double field_given) {
  FieldConsistency fc;
  fc.detuning = detuning;
  fc.gamma_pi_over_4 = std::abs(detuning) * std::sqrt(constants::pi) / 2.0;
  fc.field_pi_over_4 = field_from_gamma(fc.gamma_pi_over_4, trap);
  fc.field_given = field_given;
  fc.gamma_given = gamma_from_field(field_given, trap);
  fc.ratio_sq_given = fc.gamma_given * fc.gamma_given / (detuning * detuning);
  fc.field_ratio = field_given > 0.0 ? fc.field_pi_over_4 / field_given : 0.0;
  return fc;
}

std::vector<FidelityReport> thermal_reports(const GateConfig& config, const CrystalModes& modes,
                                            const SpaceSpec& space,
                                            const std::vector<ThermalPoint>& temperatures,
                                            const GateRunOptions& options, double support_floor) {
  if (temperatures.empty()) throw ConfigError("thermal_reports: no temperatures requested");
  std::vector<ThermalEnsemble> ensembles;
  std::vector<bool> keep(static_cast<std::size_t>(space.motional_dim()), false);
  for (const auto& tp : temperatures) {
    ensembles.push_back(thermal_ensemble(tp.nbar, space));
    for (auto k : ensembles.back().support(support_floor)) keep[static_cast<std::size_t>(k)] = true;
  }
  std::vector<Eigen::Index> support;
  for (std::size_t k = 0; k < keep.size(); ++k)
    if (keep[k]) support.push_back(static_cast<Eigen::Index>(k));

  std::vector<Eigen::VectorXd> weights;
  std::vector<double> lost;
  for (const auto& th : ensembles) {
    double kept = 0.0;
    for (auto k : support) kept += th.weights(k);
    const double l = th.tail + (1.0 - kept) * (1.0 - th.tail);
    if (l > max_thermal_tail) {
      std::ostringstream msg;
      msg << "thermal population beyond the Fock cutoff is " << l << " for nbar " << th.nbar.front()
          << " (limit " << max_thermal_tail << "); raise the mode cutoffs";
      throw ConfigError(msg.str());
    }
    Eigen::VectorXd w = Eigen::VectorXd::Zero(th.weights.size());
    for (auto k : support) w(k) = th.weights(k) / kept;
    weights.push_back(std::move(w));
    lost.push_back(l);
  }

  const SectorStates states = evolve_fock_states(config, modes, space, support, options);
  const IdealGate ideal = ideal_gate(config, modes);
  std::vector<FidelityReport> out;
  for (std::size_t t = 0; t < ensembles.size(); ++t) {
    QuantumChannel ch = channel_from_sectors(states, weights[t]);
    ch.nbar = ensembles[t].nbar;
    ch.cutoffs = space.mode_cutoffs;
    ch.tail = lost[t];
    out.push_back(fidelity_report(ch, ideal));
  }
  return out;
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::tweezer_frequency: return "tweezer_frequency_hz";
    case SweepAxis::tweezer_ratio: return "tweezer_ratio";
    case SweepAxis::detuning: return "detuning_hz";
    case SweepAxis::nbar: return "nbar";
    case SweepAxis::field_amplitude: return "field_amplitude_v_per_m";
  }
  return "";
}

SweepAxis sweep_axis_from_string(const std::string& name) {
  for (auto a : {SweepAxis::tweezer_frequency, SweepAxis::tweezer_ratio, SweepAxis::detuning,
                 SweepAxis::nbar, SweepAxis::field_amplitude})
    if (to_string(a) == name) return a;
  throw ConfigError("unknown sweep axis '" + name + "'");
}

void SweepSpec::validate() const {
  if (grid.empty()) throw ConfigError("sweep: grid must not be empty");
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (!(grid[k] > grid[k - 1])) throw ConfigError("sweep: grid must be strictly increasing");
  if (axis != SweepAxis::nbar && nbar_values.empty())
    throw ConfigError("sweep: at least one nbar value is required");
  for (std::size_t k = 0; k < grid.size(); ++k) point_config(k).validate();
  space.validate();
}

GateConfig SweepSpec::point_config(std::size_t k) const {
  GateConfig c = baseline;
  const double v = grid.at(k);
  switch (axis) {
    case SweepAxis::tweezer_frequency: c.tweezer_frequency = v; break;
    case SweepAxis::tweezer_ratio: c.tweezer_frequency = v * c.trap.axial_frequency; break;
    case SweepAxis::detuning: c.detuning = v; break;
    case SweepAxis::field_amplitude: c.field_amplitude = v; break;
    case SweepAxis::nbar: break;
  }
  return c;
}

std::vector<double> SweepSpec::point_nbar(std::size_t k) const {
  if (axis == SweepAxis::nbar) return {grid.at(k)};
  return nbar_values;
}

std::string sweep_point_hash(const SweepSpec& spec, std::size_t k) {
  Json j;
  j["gate"] = to_json(spec.point_config(k));
  j["space"] = to_json(spec.space);
  j["nbar"] = spec.point_nbar(k);
  j["options"] = to_json(spec.options);
  j["support_floor"] = spec.support_floor;
  return fnv1a_hex(j.dump());
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < n; k = next++) fn(k);
    });
  for (auto& t : pool) t.join();
}

namespace {

std::optional<Json> read_cache(const std::optional<std::string>& dir, const std::string& hash) {
  if (!dir) return std::nullopt;
  std::ifstream in(std::filesystem::path(*dir) / (hash + ".json"));
  if (!in) return std::nullopt;
  try {
    return Json::parse(in);
  } catch (const Json::exception&) {
    return std::nullopt;
  }
}

void write_cache(const std::optional<std::string>& dir, const std::string& hash, const Json& j) {
  if (dir) atomic_write(std::filesystem::path(*dir) / (hash + ".json"), dump(j));
}

}  // namespace

std::vector<SweepPoint> run_sweep(const SweepSpec& spec, int jobs,
                                  const std::optional<std::string>& cache_dir) {
  spec.validate();
  const CrystalModes modes = normal_modes(spec.baseline.trap);
  std::vector<SweepPoint> points(spec.grid.size());
  parallel_for(points.size(), jobs, [&](std::size_t k) {
    SweepPoint& p = points[k];
    p.value = spec.grid[k];
    p.config_hash = sweep_point_hash(spec, k);
    p.nbar = spec.point_nbar(k);
    if (auto cached = read_cache(cache_dir, p.config_hash)) {
      p = sweep_point_from_json(*cached);
      p.cached = true;
      return;
    }
    try {
      const GateConfig c = spec.point_config(k);
      std::vector<ThermalPoint> temps;
      for (double nb : p.nbar) temps.push_back({std::vector<double>(static_cast<std::size_t>(spec.space.n_modes()), nb)});
      p.reports = thermal_reports(c, modes, spec.space, temps, spec.options, spec.support_floor);
    } catch (const std::exception& e) {
      p.reports.clear();
      p.error = e.what();
    }
    if (p.error.empty()) write_cache(cache_dir, p.config_hash, to_json(p));
  });
  return points;
}

std::optional<double> threshold_crossing(const std::vector<SweepPoint>& points,
                                         std::size_t nbar_index, double target) {
  std::optional<double> crossing;
  for (auto it = points.rbegin(); it != points.rend(); ++it) {
    if (!it->error.empty() || nbar_index >= it->reports.size()) break;
    if (it->reports[nbar_index].fidelity < target) break;
    crossing = it->value;
  }
  return crossing;
}

void TableSpec::validate() const {
  baseline.validate();
  if (baseline.modes != ModeSet::all) throw ConfigError("table: all axial modes must be retained");
  if (space.n_modes() != baseline.trap.n_ions)
    throw ConfigError("table: one cutoff per axial mode is required");
  if (convergence_increment < 0) throw ConfigError("table: convergence increment must be >= 0");
  for (auto p : pairs) TweezerPerturbation{baseline.tweezer_frequency, p, {1, 1}}.validate(baseline.trap.n_ions);
  space.validate();
}

std::vector<PairStudy> four_ion_table(const TableSpec& spec, int jobs,
                                      const std::optional<std::string>& cache_dir) {
  spec.validate();
  const CrystalModes modes = normal_modes(spec.baseline.trap);
  std::vector<PairStudy> rows(spec.pairs.size());
  parallel_for(rows.size(), jobs, [&](std::size_t k) {
    PairStudy& row = rows[k];
    GateConfig c = spec.baseline;
    c.pair = spec.pairs[k];
    Json key;
    key["gate"] = to_json(c);
    key["space"] = to_json(spec.space);
    key["options"] = to_json(spec.options);
    key["convergence_increment"] = spec.convergence_increment;
    row.config_hash = fnv1a_hex(key.dump());
    row.pair = c.pair;
    if (auto cached = read_cache(cache_dir, row.config_hash)) {
      row = pair_study_from_json(*cached);
      return;
    }
    try {
      row.drive_frequency = c.drive_frequency ? *c.drive_frequency
                                              : corrected_drive_frequency(c.trap, c.pair, c.tweezer_frequency, c.detuning);
      row.com_minus_drive_hz = angular_to_hz(modes.frequencies(CrystalModes::com) - row.drive_frequency);
      const std::vector<ThermalPoint> ground{{std::vector<double>(modes.size(), 0.0)}};
      const auto r = thermal_reports(c, modes, spec.space, ground, spec.options).front();
      row.fidelity = r.fidelity;
      row.infidelity_x1e4 = (1.0 - r.fidelity) * 1e4;
      row.conditional_phase = r.conditional_phase;
      row.predicted_conditional_phase = r.predicted_conditional_phase;
      if (spec.convergence_increment > 0) {
        SpaceSpec bigger = spec.space;
        for (int& n : bigger.mode_cutoffs) n += spec.convergence_increment;
        const auto r2 = thermal_reports(c, modes, bigger, ground, spec.options).front();
        row.convergence_delta = std::abs(r2.fidelity - r.fidelity);
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    if (row.error.empty()) write_cache(cache_dir, row.config_hash, to_json(row));
  });
  return rows;
}

}  // namespace tgate
