// Acceptance suite: one PASS/FAIL line per criterion, details indented.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "tgate/run_config.hpp"

using namespace tgate;
using tgate::testing::relaxed_positions;
using tgate::testing::ytterbium_trap;

namespace {

struct Check {
  std::vector<std::string> lines;
  bool pass = true;

  void expect(bool ok, const std::string& what) {
    lines.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    pass = pass && ok;
  }
  void info(const std::string& what) { lines.push_back("info " + what); }
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

RunConfig preset(const std::string& name) {
  RunConfig rc = load_run_config(std::string(TGATE_CONFIG_DIR) + "/" + name);
  resolve_field(rc, normal_modes(rc.gate.trap));
  return rc;
}

int failures = 0;

void criterion(int id, const std::string& title, const std::function<void(Check&)>& body) {
  const auto start = std::chrono::steady_clock::now();
  Check c;
  try {
    body(c);
  } catch (const std::exception& e) {
    c.expect(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("[%s] %d %s (%.1f s)\n", c.pass ? "PASS" : "FAIL", id, title.c_str(), secs);
  for (const auto& l : c.lines) std::printf("       %s\n", l.c_str());
  std::fflush(stdout);
  if (!c.pass) ++failures;
}

// Criterion 1: normal modes against closed forms and an independent
// relaxation oracle.
void mode_oracles(Check& c) {
  const CrystalModes two = normal_modes(ytterbium_trap(2));
  c.expect(std::abs(two.frequencies(1) / two.axial_frequency - std::sqrt(3.0)) < 1e-9,
           fmt("N=2 stretch/COM = %.12f (sqrt 3)", two.frequencies(1) / two.axial_frequency));

  const CrystalModes three = normal_modes(ytterbium_trap(3));
  const double ev3[] = {1.0, 3.0, 29.0 / 5.0};
  double worst3 = 0.0;
  for (int k = 0; k < 3; ++k)
    worst3 = std::max(worst3, std::abs(std::pow(three.frequencies(k) / three.axial_frequency, 2) - ev3[k]));
  c.expect(worst3 < 1e-9, fmt("N=3 eigenvalues {1, 3, 29/5}: max error %.2e", worst3));

  double worst_pos = 0.0, worst_com = 0.0, worst_orth = 0.0;
  for (int n = 1; n <= 8; ++n) {
    const TrapSpec trap = ytterbium_trap(n);
    const CrystalModes m = normal_modes(trap);
    const auto ref = relaxed_positions(n);
    for (int i = 0; i < n; ++i) {
      worst_pos = std::max(worst_pos, std::abs(m.positions(i) - static_cast<double>(ref[i])));
      worst_com = std::max(worst_com, std::abs(m.vectors(i, 0) * m.vectors(i, 0) - 1.0 / n));
    }
    const Eigen::MatrixXd gram = m.vectors.transpose() * m.vectors;
    worst_orth = std::max(worst_orth, (gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff());
  }
  c.expect(worst_pos < 1e-10, fmt("positions N=1..8 vs relaxation oracle: max error %.2e", worst_pos));
  c.expect(worst_com < 1e-10, fmt("COM weights 1/N for N=1..8: max error %.2e", worst_com));
  c.expect(worst_orth < 1e-10, fmt("mode vectors orthonormal: max error %.2e", worst_orth));
}

std::vector<SweepPoint> fig3_points;

// Criterion 2: single-mode thermal fidelities cross 0.99 and 0.999.
void fig3_thresholds(Check& c) {
  const RunConfig rc = preset("fig3_delta1kHz.json");
  const SweepSpec spec = make_sweep_spec(rc);
  fig3_points = run_sweep(spec, 1);
  for (const auto& p : fig3_points) {
    if (!p.error.empty()) {
      c.expect(false, fmt("r = %.2f failed: %s", p.value, p.error.c_str()));
      continue;
    }
    for (std::size_t k = 0; k < p.reports.size(); ++k) {
      const double f = p.reports[k].fidelity;
      const double need = p.value >= 0.22 - 1e-12 ? 0.999 : (p.value >= 0.12 - 1e-12 ? 0.99 : 0.0);
      const std::string what = fmt("r = %.2f nbar = %.1f: F = %.6f", p.value, p.nbar[k], f);
      if (need > 0.0)
        c.expect(f >= need, what + fmt(" (need >= %.3f)", need));
      else
        c.info(what);
    }
    if (p.reports.size() == 2 && p.reports[1].fidelity > p.reports[0].fidelity)
      c.info(fmt("r = %.2f: fidelity rises with nbar (%.2e)", p.value,
                 p.reports[1].fidelity - p.reports[0].fidelity));
  }
  for (std::size_t k = 0; k < spec.nbar_values.size(); ++k)
    for (double target : {0.99, 0.999}) {
      const auto x = threshold_crossing(fig3_points, k, target);
      c.info(fmt("nbar = %.1f: F >= %.3f from r = %s", spec.nbar_values[k], target,
                 x ? fmt("%.2f", *x).c_str() : "none"));
    }
}

// Criterion 3: the stretch mode barely matters for two ions.
void two_mode_agreement(Check& c) {
  const RunConfig two = preset("fig3_twomode.json");
  const RunConfig one = preset("fig3_delta1kHz.json");
  const CrystalModes modes = normal_modes(two.gate.trap);
  const std::vector<double> nbars{0.0, 0.6};
  std::vector<ThermalPoint> t2, t1;
  for (double n : nbars) {
    t2.push_back({{n, n}});
    t1.push_back({{n}});
  }
  const auto r2 = thermal_reports(two.gate, modes, two.space, t2, two.options, two.support_floor);
  GateConfig g1 = one.gate;
  g1.tweezer_frequency = two.gate.tweezer_frequency;
  const auto r1 = thermal_reports(g1, modes, one.space, t1, one.options, one.support_floor);
  for (std::size_t k = 0; k < nbars.size(); ++k) {
    const double d = std::abs(r2[k].fidelity - r1[k].fidelity);
    c.expect(d < 1e-3, fmt("r = 0.25 nbar = %.1f: F(COM+stretch) = %.6f F(COM) = %.6f |dF| = %.2e", nbars[k],
                           r2[k].fidelity, r1[k].fidelity, d));
    c.info(fmt("nbar = %.1f dropped thermal weight %.2e", nbars[k], r2[k].tail));
  }
}

// Criterion 4: four-ion pair table.
void four_ion(Check& c) {
  const RunConfig rc = preset("table1.json");
  TableSpec spec = make_table_spec(rc);
  const int increment = spec.convergence_increment;
  spec.convergence_increment = 0;
  c.info(fmt("echo balanced, ramp_fraction %.2f, tweezer %.0f Hz, drive correction exact, cutoffs (6,2,2,2), ground state",
             rc.gate.ramp_fraction, angular_to_hz(rc.gate.tweezer_frequency)));
  const auto rows = four_ion_table(spec, 1);
  const double ref_infidelity[] = {3.7, 4.7, 2.4, 1.1};
  const double ref_offset_khz[] = {1.212, 1.325, 1.488, 1.162};
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const PairStudy& r = rows[k];
    const std::string pair = fmt("(%d,%d)", r.pair.i + 1, r.pair.j + 1);
    if (!r.error.empty()) {
      c.expect(false, pair + " failed: " + r.error);
      continue;
    }
    const double x = r.infidelity_x1e4;
    const double off = r.com_minus_drive_hz / 1e3;
    c.expect(x < 10.0, fmt("%s (1-F) x 1e4 = %.3f < 10", pair.c_str(), x));
    c.expect(x <= 3 * ref_infidelity[k] && x >= ref_infidelity[k] / 3,
             fmt("%s (1-F) x 1e4 = %.3f within factor 3 of %.1f", pair.c_str(), x, ref_infidelity[k]));
    c.expect(std::abs(off - ref_offset_khz[k]) <= 0.1 * ref_offset_khz[k],
             fmt("%s w_com - mu = %.4f kHz within 10%% of %.3f", pair.c_str(), off, ref_offset_khz[k]));
  }
  if (increment > 0) {
    spec.pairs = {spec.pairs.front()};
    spec.convergence_increment = increment;
    const auto conv = four_ion_table(spec, 1);
    if (conv.front().convergence_delta)
      c.info(fmt("pair (%d,%d) cutoffs +%d: |dF| = %.2e", conv.front().pair.i + 1, conv.front().pair.j + 1,
                 increment, *conv.front().convergence_delta));
  }
}

// Criterion 5: integrator and metric sanity.
void physics_suite(Check& c) {
  const RunConfig fig2 = preset("fig2.json");
  const CrystalModes modes = normal_modes(fig2.gate.trap);

  {
    // all four sectors and a spread of Fock states at once
    Eigen::VectorXcd motional = Eigen::VectorXcd::Zero(fig2.space.motional_dim());
    for (int n = 0; n < 6; ++n) motional(n) = std::polar(1.0, 0.7 * n) / std::sqrt(6.0);
    const Eigen::Vector4cd qubit = Eigen::Vector4cd::Constant(0.5);
    const GateResult g = run_gate(fig2.gate, modes, fig2.space, qubit, motional, fig2.options);
    c.expect(g.norm_drift < 1e-9, fmt("norm drift over the fig2 gate %.2e < 1e-9", g.norm_drift));
  }

  {
    // no tweezer, sharp pulses: the COM mode is a driven oscillator with
    // both co- and counter-rotating terms
    GateConfig g = fig2.gate;
    g.tweezer_frequency = 0.0;
    g.ramp_fraction = 0.0;
    GateRunOptions o = fig2.options;
    o.samples_per_pulse = 200;
    Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(fig2.space.motional_dim());
    vac(0) = 1.0;
    const Eigen::Vector4cd qubit(1.0, 0.0, 0.0, 0.0);
    const GateResult r = run_gate(g, modes, fig2.space, qubit, vac, o);
    const double gamma = gamma_from_field(g.field_amplitude, g.trap);
    const double w = modes.frequencies(0), mu = resolve_drive_frequency(g, modes);
    const double dm = mu - w, sm = mu + w;
    const PulseSchedule sched(g);
    auto alpha = [&](double t) {
      cplx acc = 0.0;
      for (const auto& p : sched.pulses()) {
        if (!p.field_on || t <= p.start) continue;
        const double a = p.start, b = std::min(t, p.start + p.duration);
        acc += (std::exp(cplx(0, -dm * b)) - std::exp(cplx(0, -dm * a))) / cplx(0, -dm) +
               (std::exp(cplx(0, sm * b)) - std::exp(cplx(0, sm * a))) / cplx(0, sm);
      }
      return cplx(0, -gamma) * acc;
    };
    double worst = 0.0;
    for (std::size_t k = 0; k < r.trajectory.times.size(); ++k)
      worst = std::max(worst, std::abs(r.trajectory.alpha(static_cast<Eigen::Index>(k), 0) -
                                       alpha(r.trajectory.times[k])));
    c.expect(worst < 1e-6, fmt("driven-oscillator trajectory vs closed form: max |d alpha| = %.2e over %zu samples",
                               worst, r.trajectory.times.size()));
  }

  {
    GateRunOptions o = fig2.options;
    o.samples_per_pulse = std::max(o.samples_per_pulse, 200);
    Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(fig2.space.motional_dim());
    vac(0) = 1.0;
    const Eigen::Vector4cd qubit = Eigen::Vector4cd::Constant(0.5);
    const GateResult r = run_gate(fig2.gate, modes, fig2.space, qubit, vac, o);
    double loop_peak = 0.0, spectator_peak = 0.0;
    for (Eigen::Index col = 0; col < r.trajectory.alpha.cols(); ++col) {
      const int q = r.trajectory.labels[static_cast<std::size_t>(col)];
      const double peak = r.trajectory.alpha.col(col).cwiseAbs().maxCoeff();
      const double end = std::abs(r.trajectory.alpha(r.trajectory.alpha.rows() - 1, col));
      const std::string label = qubit_label_string(q);
      if (q == 1 || q == 2) {
        loop_peak = std::max(loop_peak, peak);
        c.expect(peak >= 10 * end, fmt("|%s> loop closes: max |alpha| = %.4f, final |alpha| = %.2e", label.c_str(), peak, end));
      } else {
        spectator_peak = std::max(spectator_peak, peak);
        c.info(fmt("|%s> max |alpha| = %.4f, final |alpha| = %.2e", label.c_str(), peak, end));
      }
    }
    c.expect(loop_peak >= 10 * spectator_peak,
             fmt("|01>/|10> vs |00>/|11> peak displacement ratio %.1f >= 10", loop_peak / spectator_peak));
  }

  {
    std::mt19937 rng(7);
    const Eigen::Matrix4cd u = tgate::testing::random_unitary(rng);
    const double same = process_fidelity(unitary_channel(u), u);
    const double orth = process_fidelity(unitary_channel(u * pauli_basis()[5]), u);
    c.expect(std::abs(same - 1.0) < 1e-12, fmt("F(U, U) = %.15f", same));
    c.expect(std::abs(orth - 0.2) < 1e-12, fmt("F for trace-orthogonal unitaries = %.15f (0.2)", orth));
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      const Eigen::Matrix4cd v = tgate::testing::random_unitary(rng);
      Eigen::Matrix4cd a, b;
      const Eigen::Matrix2cd a1 = tgate::testing::random_unitary2(rng), a2 = tgate::testing::random_unitary2(rng);
      const Eigen::Matrix2cd b1 = tgate::testing::random_unitary2(rng), b2 = tgate::testing::random_unitary2(rng);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          a.block(2 * i, 2 * j, 2, 2) = a1(i, j) * a2;
          b.block(2 * i, 2 * j, 2, 2) = b1(i, j) * b2;
        }
      const auto x = local_invariants(v), y = local_invariants(a * v * b);
      worst = std::max({worst, std::abs(x.g1 - y.g1), std::abs(x.g2 - y.g2)});
    }
    c.expect(worst < 1e-10, fmt("Makhlin invariants under local unitaries: max change %.2e", worst));
  }

  {
    Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(fig2.space.motional_dim());
    vac(0) = 1.0;
    const Eigen::Vector4cd qubit = Eigen::Vector4cd::Constant(0.5);
    GateRunOptions fine = fig2.options;
    fine.max_step_fraction /= 2;
    const GateResult a = run_gate(fig2.gate, modes, fig2.space, qubit, vac, fig2.options);
    const GateResult b = run_gate(fig2.gate, modes, fig2.space, qubit, vac, fine);
    const double overlap = std::abs(a.state.dot(b.state));
    c.expect(std::abs(1.0 - overlap) < 1e-9,
             fmt("halved step cap: 1 - |<a|b>| = %.2e, |a - b| = %.2e", 1.0 - overlap, (a.state - b.state).norm()));
  }

  {
    GateConfig doubled = fig2.gate;
    doubled.ramp_fraction *= 2;
    const std::vector<ThermalPoint> ground{{{0.0}}};
    const double f1 = thermal_reports(fig2.gate, modes, fig2.space, ground, fig2.options).front().fidelity;
    const double f2 = thermal_reports(doubled, modes, fig2.space, ground, fig2.options).front().fidelity;
    c.expect(std::abs(f1 - f2) < 1e-4, fmt("ramp_fraction %.2f -> %.2f: F %.7f -> %.7f", fig2.gate.ramp_fraction,
                                          doubled.ramp_fraction, f1, f2));
  }
}

// Criterion 6: field calibration and effective-model phase report.
void consistency(Check& c) {
  const RunConfig fig2 = preset("fig2.json");
  const CrystalModes modes = normal_modes(fig2.gate.trap);
  for (double delta_hz : {1.0e3, 2.0e3}) {
    const FieldConsistency fc = field_consistency(fig2.gate.trap, -hz_to_angular(delta_hz), fig2.gate.field_amplitude);
    c.info(fmt("delta %.0f kHz: pi/4 rule needs E0 = %.4e V/m, used %.4e V/m (ratio %.2f, gamma^2/delta^2 = %.4f)",
               delta_hz / 1e3, fc.field_pi_over_4, fc.field_given, fc.field_ratio, fc.ratio_sq_given));
  }
  auto compare = [&](const std::string& what, const FidelityReport& r) {
    const double rel = std::abs(r.conditional_phase - r.predicted_conditional_phase) /
                       std::abs(r.predicted_conditional_phase);
    c.expect(rel < 0.02, fmt("%s: phi_c simulated %.6f predicted %.6f (rel %.2e)", what.c_str(), r.conditional_phase,
                             r.predicted_conditional_phase, rel));
  };
  compare("fig2 point r=0.25 nbar=0 delta 1 kHz",
          thermal_reports(fig2.gate, modes, fig2.space, {{{0.0}}}, fig2.options).front());
  for (const auto& p : fig3_points)
    if (std::abs(p.value - 0.25) < 1e-12 && p.error.empty()) compare("fig3 point r=0.25 nbar=0.6 delta 1 kHz", p.reports[0]);
  RunConfig two = preset("fig3_delta2kHz.json");
  two.gate.tweezer_frequency = 0.25 * two.gate.trap.axial_frequency;
  compare("fig3 point r=0.25 nbar=0.6 delta 2 kHz",
          thermal_reports(two.gate, modes, two.space, {{{0.6}}}, two.options).front());
}

}  // namespace

int main() {
  criterion(1, "normal modes match closed forms and the relaxation oracle", mode_oracles);
  criterion(2, "single-mode thermal fidelity thresholds (delta 1 kHz, nbar 0.6 and 1.0)", fig3_thresholds);
  criterion(3, "COM+stretch agrees with COM-only within 1e-3 at r = 0.25", two_mode_agreement);
  criterion(4, "four-ion pair table at 257 kHz", four_ion);
  criterion(5, "integrator, trajectory and metric checks", physics_suite);
  criterion(6, "field consistency and conditional-phase prediction", consistency);
  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
