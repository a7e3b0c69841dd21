#include "tgate/metric.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tgate {

const std::array<Eigen::Matrix4cd, 16>& pauli_basis() {
  static const std::array<Eigen::Matrix4cd, 16> basis = [] {
    std::array<Eigen::Matrix2cd, 4> s;
    const cplx i(0.0, 1.0);
    s[0] << 1, 0, 0, 1;
    s[1] << 0, 1, 1, 0;
    s[2] << 0, -i, i, 0;
    s[3] << 1, 0, 0, -1;
    std::array<Eigen::Matrix4cd, 16> out;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        Eigen::Matrix4cd m;
        for (int r = 0; r < 4; ++r)
          for (int c = 0; c < 4; ++c) m(r, c) = s[a](r / 2, c / 2) * s[b](r % 2, c % 2);
        out[static_cast<std::size_t>(4 * a + b)] = m;
      }
    return out;
  }();
  return basis;
}

Eigen::Matrix4cd QuantumChannel::apply_basis(int a, int b) const {
  Eigen::Matrix4cd out = Eigen::Matrix4cd::Zero();
  const auto& p = pauli_basis();
  for (std::size_t l = 0; l < 16; ++l) out += std::conj(p[l](a, b)) * 0.25 * images[l];
  return out;
}

Eigen::Matrix4cd QuantumChannel::apply(const Eigen::Matrix4cd& rho) const {
  Eigen::Matrix4cd out = Eigen::Matrix4cd::Zero();
  const auto& p = pauli_basis();
  for (std::size_t l = 0; l < 16; ++l) out += 0.25 * (p[l].adjoint() * rho).trace() * images[l];
  return out;
}

Eigen::Matrix<cplx, 16, 16> QuantumChannel::choi() const {
  Eigen::Matrix<cplx, 16, 16> j = Eigen::Matrix<cplx, 16, 16>::Zero();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) j.block<4, 4>(4 * a, 4 * b) = apply_basis(a, b);
  return j;
}

void QuantumChannel::check(double tol) const {
  const cplx tr = images[0].trace();
  if (std::abs(tr - 4.0) > tol) {
    std::ostringstream msg;
    msg << "channel: image of the identity has trace " << tr << ", expected 4";
    throw NumericalError(msg.str());
  }
  const Eigen::Matrix<cplx, 16, 16> j = choi();
  const Eigen::Matrix<cplx, 16, 16> herm = 0.5 * (j + j.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<cplx, 16, 16>> es(herm, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  if (lo < -tol) {
    std::ostringstream msg;
    msg << "channel: Choi matrix has eigenvalue " << lo << " (not completely positive)";
    throw NumericalError(msg.str());
  }
}

namespace {

QuantumChannel channel_from_blocks(const std::array<std::array<Eigen::Matrix4cd, 4>, 4>& t) {
  QuantumChannel ch;
  const auto& p = pauli_basis();
  for (std::size_t l = 0; l < 16; ++l) {
    Eigen::Matrix4cd img = Eigen::Matrix4cd::Zero();
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        if (p[l](a, b) != cplx(0.0)) img += p[l](a, b) * t[a][b];
    ch.images[l] = img;
  }
  return ch;
}

}  // namespace

QuantumChannel unitary_channel(const Eigen::Matrix4cd& u) {
  QuantumChannel ch;
  const auto& p = pauli_basis();
  for (std::size_t l = 0; l < 16; ++l) ch.images[l] = u * p[l] * u.adjoint();
  return ch;
}

QuantumChannel channel_from_columns(const std::vector<Eigen::MatrixXcd>& columns,
                                    const std::vector<double>& weights, Eigen::Index motional_dim) {
  if (columns.size() != weights.size())
    throw ConfigError("channel_from_columns: one weight per Fock state is required");
  std::array<std::array<Eigen::Matrix4cd, 4>, 4> t;
  for (auto& row : t)
    for (auto& m : row) m.setZero();
  const Eigen::Index d = motional_dim;
  for (std::size_t k = 0; k < columns.size(); ++k) {
    const Eigen::MatrixXcd& v = columns[k];
    if (v.rows() != 4 * d || v.cols() != 4)
      throw ConfigError("channel_from_columns: expected a (4 * motional_dim) x 4 block");
    // tr_FS(|x><y|) = M_x M_y^dag with M the 4 x D reshape of the composite vector
    std::array<Eigen::MatrixXcd, 4> m;
    for (int a = 0; a < 4; ++a)
      m[static_cast<std::size_t>(a)] = Eigen::Map<const Eigen::MatrixXcd>(v.col(a).data(), d, 4);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        t[a][b] += weights[k] * (m[static_cast<std::size_t>(a)].transpose() *
                                 m[static_cast<std::size_t>(b)].conjugate());
  }
  return channel_from_blocks(t);
}

QuantumChannel channel_from_sectors(const SectorStates& states, const Eigen::VectorXd& weights) {
  std::array<std::array<Eigen::Matrix4cd, 4>, 4> t;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      cplx c = 0.0;
      const auto& xa = states.motional[static_cast<std::size_t>(a)];
      const auto& xb = states.motional[static_cast<std::size_t>(b)];
      for (std::size_t k = 0; k < states.fock.size(); ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        c += weights(states.fock[k]) * xb.col(kk).dot(xa.col(kk));
      }
      Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
      m(states.final_label[static_cast<std::size_t>(a)], states.final_label[static_cast<std::size_t>(b)]) = c;
      t[a][b] = m;
    }
  return channel_from_blocks(t);
}

QuantumChannel reconstruct_channel(const GateConfig& config, const CrystalModes& modes,
                                   const ThermalEnsemble& thermal, const SpaceSpec& space,
                                   const GateRunOptions& options, double support_floor) {
  const auto support = thermal.support(support_floor);
  double kept = 0.0;
  for (auto k : support) kept += thermal.weights(k);
  const double lost = thermal.tail + (1.0 - kept) * (1.0 - thermal.tail);
  if (lost > max_thermal_tail) {
    std::ostringstream msg;
    msg << "thermal population beyond the Fock cutoff is " << lost << " (limit " << max_thermal_tail
        << "); raise the mode cutoffs";
    throw ConfigError(msg.str());
  }
  Eigen::VectorXd w = Eigen::VectorXd::Zero(thermal.weights.size());
  for (auto k : support) w(k) = thermal.weights(k) / kept;
  const SectorStates states = evolve_fock_states(config, modes, space, support, options);
  QuantumChannel ch = channel_from_sectors(states, w);
  ch.nbar = thermal.nbar;
  ch.cutoffs = space.mode_cutoffs;
  ch.tail = lost;
  return ch;
}

double process_fidelity(const QuantumChannel& channel, const Eigen::Matrix4cd& ideal) {
  const auto& p = pauli_basis();
  cplx sum = 0.0;
  for (std::size_t l = 0; l < 16; ++l)
    sum += (ideal * p[l].adjoint() * ideal.adjoint() * channel.images[l]).trace();
  const double d = 4.0;
  return (sum.real() + d * d) / (d * d * (d + 1.0));
}

Eigen::Matrix4cd IdealGate::unitary() const {
  Eigen::Matrix4cd u = Eigen::Matrix4cd::Zero();
  for (int q = 0; q < 4; ++q) u(q, q) = std::polar(1.0, phases(q));
  return u;
}

namespace {

double phase_integral_trapezoid(double duration, double ramp, double d, long n) {
  const double h = duration / double(n);
  double c = 0.0, s = 0.0, acc = 0.0;
  double f_prev = 0.0, cos_prev = 1.0, sin_prev = 0.0, g_prev = 0.0;
  for (long k = 0; k <= n; ++k) {
    const double t = h * double(k);
    const double f = ramp > 0.0 ? envelope(t, duration, ramp) : 1.0;
    const double co = std::cos(d * t), si = std::sin(d * t);
    if (k > 0) {
      c += 0.5 * h * (f * co + f_prev * cos_prev);
      s += 0.5 * h * (f * si + f_prev * sin_prev);
    }
    const double g = f * (si * c - co * s);
    if (k > 0) acc += 0.5 * h * (g + g_prev);
    f_prev = f;
    cos_prev = co;
    sin_prev = si;
    g_prev = g;
  }
  return acc;
}

template <typename F>
double simpson(F f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int k = 1; k < n; ++k) acc += (k % 2 ? 4.0 : 2.0) * f(a + h * k);
  return acc * h / 3.0;
}

}  // namespace

double envelope_phase_integral(double duration, double ramp, double detuning) {
  if (!(duration > 0.0)) throw ConfigError("envelope_phase_integral: duration must be positive");
  const double cycles = std::abs(detuning) * duration / constants::two_pi;
  const long n = std::max<long>(100000, static_cast<long>(4000.0 * cycles));
  const double coarse = phase_integral_trapezoid(duration, ramp, detuning, n);
  const double fine = phase_integral_trapezoid(duration, ramp, detuning, 2 * n);
  return fine + (fine - coarse) / 3.0;
}

Eigen::VectorXd sector_mode_frequencies(const GateConfig& config, const CrystalModes& modes,
                                        SpinConfig spins, double f) {
  const double wtw2 = f * config.tweezer_frequency * config.tweezer_frequency;
  if (config.modes == ModeSet::com_only) {
    const double w = modes.frequencies(CrystalModes::com);
    const double bi = modes.vectors(config.pair.i, 0), bj = modes.vectors(config.pair.j, 0);
    const double w2 = w * w + wtw2 * (bi * bi * spins.si + bj * bj * spins.sj);
    if (w2 < 0.0) throw NumericalError("sector_mode_frequencies: COM mode anti-trapped");
    return Eigen::VectorXd::Constant(1, std::sqrt(w2));
  }
  TweezerPerturbation pert{std::sqrt(wtw2), config.pair, spins};
  return shifted_mode_frequencies(modes, pert, ShiftMethod::exact);
}

double sector_com_frequency(const GateConfig& config, const CrystalModes& modes, SpinConfig spins) {
  if (config.modes == ModeSet::com_only) return sector_mode_frequencies(config, modes, spins)(0);
  return exact_com_branch_frequency(modes, {config.tweezer_frequency, config.pair, spins});
}

IdealGate ideal_gate(const GateConfig& config, const CrystalModes& modes) {
  config.validate();
  const PulseSchedule schedule(config);
  const double gamma = gamma_from_field(config.field_amplitude, config.trap);
  const double mu = resolve_drive_frequency(config, modes);
  const auto retained = config.retained_modes();
  Eigen::VectorXd bare(static_cast<Eigen::Index>(retained.size()));
  for (std::size_t k = 0; k < retained.size(); ++k) bare(static_cast<Eigen::Index>(k)) = modes.frequencies(retained[k]);

  // Per-pulse contributions for each physical spin configuration.
  std::array<double, 4> field_phase{}, zero_point{};
  for (int q = 0; q < 4; ++q) {
    const SpinConfig s = spins_of(q);
    const auto& p = schedule.pulses().front();
    if (gamma > 0.0) {
      const double delta_q = mu - sector_com_frequency(config, modes, s);
      field_phase[q] = -gamma * gamma * envelope_phase_integral(p.duration, p.ramp, delta_q);
    }
    if (config.tweezer_frequency > 0.0) {
      auto shift = [&](double f) { return 0.5 * (sector_mode_frequencies(config, modes, s, f) - bare).sum(); };
      double integral = (p.duration - 2.0 * p.ramp) * shift(1.0);
      if (p.ramp > 0.0)
        integral += 2.0 * simpson([&](double t) { return shift(envelope(t, p.duration, p.ramp)); }, 0.0, p.ramp, 512);
      zero_point[q] = -integral;
    }
  }

  IdealGate gate;
  for (int q0 = 0; q0 < 4; ++q0) {
    double phi = 0.0;
    for (int k = 0; k < schedule.size(); ++k) {
      const int q = schedule.frame_label(q0, k);
      const auto& p = schedule.pulses()[static_cast<std::size_t>(k)];
      if (p.field_on) phi += field_phase[q];
      if (p.tweezer_on) phi += zero_point[q];
    }
    gate.phases(schedule.final_label(q0)) = phi;
  }
  gate.phases.array() -= gate.phases(0);
  std::ostringstream recipe;
  recipe << "sector energies of the detuned displaced COM oscillator, mu = " << mu
         << " rad/s, gamma = " << gamma << " rad/s, zero-point shifts of " << retained.size()
         << " mode(s), " << schedule.size() << " pulses";
  gate.recipe = recipe.str();
  return gate;
}

double wrap_phase(double phi) {
  double w = std::remainder(phi, constants::two_pi);
  if (w <= -constants::pi) w += constants::two_pi;
  return w;
}

double conditional_phase(const Eigen::Matrix4cd& gate, double tol) {
  Eigen::Matrix4cd off = gate;
  off.diagonal().setZero();
  if (off.norm() > tol) throw ConfigError("conditional_phase: gate is not diagonal");
  return wrap_phase(std::arg(gate(0, 0)) + std::arg(gate(3, 3)) - std::arg(gate(1, 1)) -
                    std::arg(gate(2, 2)));
}

Eigen::Matrix4cd diagonal_gate_estimate(const QuantumChannel& channel) {
  Eigen::Matrix4cd u = Eigen::Matrix4cd::Zero();
  u(0, 0) = 1.0;
  for (int a = 1; a < 4; ++a) {
    const cplx c = channel.apply_basis(a, 0)(a, 0);
    u(a, a) = std::abs(c) > 0.0 ? c / std::abs(c) : cplx(1.0);
  }
  return u;
}

LocalInvariants local_invariants(const Eigen::Matrix4cd& u, double tol) {
  if ((u.adjoint() * u - Eigen::Matrix4cd::Identity()).norm() > tol)
    throw ConfigError("local_invariants: input is not unitary");
  const cplx i(0.0, 1.0);
  Eigen::Matrix4cd q;
  q << 1, 0, 0, i, 0, i, 1, 0, 0, i, -1, 0, 1, 0, 0, -i;
  q /= std::sqrt(2.0);
  const Eigen::Matrix4cd ub = q.adjoint() * u * q;
  const Eigen::Matrix4cd m = ub.transpose() * ub;
  const cplx det = u.determinant();
  const cplx tr = m.trace();
  LocalInvariants inv;
  inv.g1 = tr * tr / (16.0 * det);
  inv.g2 = ((tr * tr - (m * m).trace()) / (4.0 * det)).real();
  return inv;
}

FidelityReport fidelity_report(const QuantumChannel& channel, const IdealGate& ideal) {
  FidelityReport r;
  r.fidelity = process_fidelity(channel, ideal.unitary());
  const Eigen::Matrix4cd est = diagonal_gate_estimate(channel);
  r.conditional_phase = conditional_phase(est);
  r.predicted_conditional_phase = wrap_phase(ideal.conditional_phase_unwrapped());
  r.invariants = local_invariants(est);
  r.nbar = channel.nbar;
  r.cutoffs = channel.cutoffs;
  r.tail = channel.tail;
  return r;
}

}  // namespace tgate
