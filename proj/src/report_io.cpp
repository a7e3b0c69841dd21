#include "tgate/report_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <system_error>

#include <unistd.h>

namespace tgate {

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw std::runtime_error("write to " + tmp.string() + " failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw std::logic_error("csv row width does not match the header");
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out += ',';
      out += csv_escape(cells[k]);
    }
    out += "\r\n";
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

namespace {

double hz(double angular) { return angular_to_hz(angular); }

Json pulses_json(const std::vector<PulsePlan>& pulses) {
  Json arr = Json::array();
  for (const auto& p : pulses) {
    Json flips = Json::array();
    for (int f : p.flips_after) flips.push_back(f == 0 ? "i" : "j");
    arr.push_back({{"field_on", p.field_on}, {"tweezer_on", p.tweezer_on}, {"flips_after", flips}});
  }
  return arr;
}

}  // namespace

Json to_json(const TrapSpec& trap) {
  return {{"n_ions", trap.n_ions},
          {"ion_mass_amu", trap.ion_mass / constants::atomic_mass_unit},
          {"charge_e", trap.charge / constants::elementary_charge},
          {"axial_frequency_hz", hz(trap.axial_frequency)}};
}

Json to_json(const GateConfig& c) {
  Json j;
  j["trap"] = to_json(c.trap);
  j["pair"] = {c.pair.i + 1, c.pair.j + 1};
  j["tweezer_frequency_hz"] = hz(c.tweezer_frequency);
  j["field_amplitude_v_per_m"] = c.field_amplitude;
  j["detuning_hz"] = hz(c.detuning);
  j["drive_frequency_hz"] = c.drive_frequency ? Json(hz(*c.drive_frequency)) : Json(nullptr);
  j["drive_correction"] = c.correction == DriveCorrection::exact ? "exact" : "none";
  j["pulses"] = pulses_json(c.pulses);
  j["ramp_fraction"] = c.ramp_fraction;
  j["modes"] = c.modes == ModeSet::all ? "all" : "com";
  return j;
}

Json to_json(const SpaceSpec& space) { return {{"n_qubits", space.n_qubits}, {"cutoffs", space.mode_cutoffs}}; }

Json to_json(const GateRunOptions& o) {
  return {{"tol", o.tol}, {"max_step_fraction", o.max_step_fraction}, {"samples_per_pulse", o.samples_per_pulse}};
}

Json to_json(const FidelityReport& r) {
  return {{"fidelity", r.fidelity},
          {"infidelity_x1e4", (1.0 - r.fidelity) * 1e4},
          {"conditional_phase", r.conditional_phase},
          {"predicted_conditional_phase", r.predicted_conditional_phase},
          {"g1", {{"re", r.invariants.g1.real()}, {"im", r.invariants.g1.imag()}}},
          {"g2", r.invariants.g2},
          {"nbar", r.nbar},
          {"cutoffs", r.cutoffs},
          {"thermal_tail", r.tail}};
}

FidelityReport fidelity_report_from_json(const Json& j) {
  FidelityReport r;
  r.fidelity = j.at("fidelity").get<double>();
  r.conditional_phase = j.at("conditional_phase").get<double>();
  r.predicted_conditional_phase = j.at("predicted_conditional_phase").get<double>();
  r.invariants.g1 = {j.at("g1").at("re").get<double>(), j.at("g1").at("im").get<double>()};
  r.invariants.g2 = j.at("g2").get<double>();
  r.nbar = j.at("nbar").get<std::vector<double>>();
  r.cutoffs = j.at("cutoffs").get<std::vector<int>>();
  r.tail = j.at("thermal_tail").get<double>();
  return r;
}

Json to_json(const SweepPoint& p) {
  Json reports = Json::array();
  for (const auto& r : p.reports) reports.push_back(to_json(r));
  return {{"value", p.value}, {"config_hash", p.config_hash}, {"nbar", p.nbar},
          {"reports", reports}, {"error", p.error}};
}

SweepPoint sweep_point_from_json(const Json& j) {
  SweepPoint p;
  p.value = j.at("value").get<double>();
  p.config_hash = j.at("config_hash").get<std::string>();
  p.nbar = j.at("nbar").get<std::vector<double>>();
  for (const auto& r : j.at("reports")) p.reports.push_back(fidelity_report_from_json(r));
  p.error = j.at("error").get<std::string>();
  return p;
}

Json to_json(const PairStudy& s) {
  return {{"pair", {s.pair.i + 1, s.pair.j + 1}},
          {"drive_frequency_hz", hz(s.drive_frequency)},
          {"omega_com_minus_mu_khz", s.com_minus_drive_hz / 1e3},
          {"fidelity", s.fidelity},
          {"infidelity_x1e4", s.infidelity_x1e4},
          {"conditional_phase", s.conditional_phase},
          {"predicted_conditional_phase", s.predicted_conditional_phase},
          {"convergence_delta", s.convergence_delta ? Json(*s.convergence_delta) : Json(nullptr)},
          {"config_hash", s.config_hash},
          {"error", s.error}};
}

PairStudy pair_study_from_json(const Json& j) {
  PairStudy s;
  s.pair = {j.at("pair").at(0).get<int>() - 1, j.at("pair").at(1).get<int>() - 1};
  s.drive_frequency = hz_to_angular(j.at("drive_frequency_hz").get<double>());
  s.com_minus_drive_hz = j.at("omega_com_minus_mu_khz").get<double>() * 1e3;
  s.fidelity = j.at("fidelity").get<double>();
  s.infidelity_x1e4 = j.at("infidelity_x1e4").get<double>();
  s.conditional_phase = j.at("conditional_phase").get<double>();
  s.predicted_conditional_phase = j.at("predicted_conditional_phase").get<double>();
  if (!j.at("convergence_delta").is_null()) s.convergence_delta = j.at("convergence_delta").get<double>();
  s.config_hash = j.at("config_hash").get<std::string>();
  s.error = j.at("error").get<std::string>();
  return s;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace tgate
