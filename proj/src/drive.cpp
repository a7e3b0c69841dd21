#include "tgate/drive.hpp"

#include <algorithm>
#include <cmath>

namespace tgate {

std::vector<PulsePlan> echo_schedule(EchoPreset preset) {
  switch (preset) {
    case EchoPreset::balanced:
      return {{true, true, {0}}, {false, true, {1}}, {true, true, {0}}, {false, true, {1}}};
    case EchoPreset::literal:
      return {{true, true, {0, 1}}, {false, true, {0}}, {false, true, {1}}, {true, true, {}}};
  }
  throw ConfigError("unknown echo preset");
}

std::string to_string(EchoPreset preset) {
  return preset == EchoPreset::balanced ? "balanced" : "literal";
}

EchoPreset echo_preset_from_string(const std::string& name) {
  if (name == "balanced") return EchoPreset::balanced;
  if (name == "literal") return EchoPreset::literal;
  throw ConfigError("unknown echo schedule '" + name + "' (expected balanced or literal)");
}

void GateConfig::validate() const {
  trap.validate();
  TweezerPerturbation{tweezer_frequency, pair, {1, 1}}.validate(trap.n_ions);
  if (!(field_amplitude >= 0.0)) throw ConfigError("gate: field amplitude must be >= 0");
  if (detuning == 0.0 || !std::isfinite(detuning)) throw ConfigError("gate: detuning must be non-zero");
  if (std::abs(detuning) >= 0.5 * trap.axial_frequency)
    throw ConfigError("gate: |detuning| must be small compared to the COM frequency");
  if (!(ramp_fraction >= 0.0 && ramp_fraction <= 0.25))
    throw ConfigError("gate: ramp_fraction must lie in [0, 0.25]");
  if (pulses.empty()) throw ConfigError("gate: at least one pulse is required");
  for (const auto& p : pulses)
    for (int q : p.flips_after)
      if (q != 0 && q != 1) throw ConfigError("gate: pi-pulse targets must be 0 (ion i) or 1 (ion j)");
  if (drive_frequency && !(*drive_frequency > 0.0))
    throw ConfigError("gate: drive frequency must be positive");
}

double GateConfig::gate_time() const { return constants::two_pi / std::abs(detuning); }

std::vector<int> GateConfig::retained_modes() const {
  if (modes == ModeSet::com_only) return {0};
  std::vector<int> all(static_cast<std::size_t>(trap.n_ions));
  for (int m = 0; m < trap.n_ions; ++m) all[m] = m;
  return all;
}

double gamma_from_field(double field_amplitude, const TrapSpec& trap) {
  if (field_amplitude < 0.0) throw ConfigError("gamma_from_field: E0 must be >= 0");
  const double l_com = std::sqrt(constants::hbar / (2.0 * trap.ion_mass * trap.axial_frequency));
  return trap.charge * field_amplitude * l_com / (2.0 * constants::hbar);
}

double field_from_gamma(double gamma, const TrapSpec& trap) {
  return gamma / gamma_from_field(1.0, trap);
}

double envelope(double t, double duration, double ramp) {
  if (t <= 0.0 || t >= duration) return 0.0;
  if (ramp <= 0.0) return 1.0;
  const double edge = std::min(t, duration - t);
  if (edge >= ramp) return 1.0;
  const double s = std::sin(0.5 * constants::pi * edge / ramp);
  return s * s;
}

double envelope(double t, const GateConfig& config) {
  if (config.ramp_fraction <= 0.0) return (t >= 0.0 && t <= config.pulse_duration()) ? 1.0 : 0.0;
  return envelope(t, config.pulse_duration(), config.ramp_time());
}

double envelope_integral(const GateConfig& config) {
  return config.pulse_duration() - config.ramp_time();
}

double envelope_square_integral(const GateConfig& config) {
  // each sin^4 ramp integrates to 3w/8
  return config.pulse_duration() - 2.0 * config.ramp_time() + 0.75 * config.ramp_time();
}

double com_shift(const CrystalModes& modes, double tweezer_frequency, int spin_sum) {
  const double w = modes.frequencies(CrystalModes::com);
  const double n = static_cast<double>(modes.size());
  const double arg = w * w + tweezer_frequency * tweezer_frequency * spin_sum / n;
  if (arg < 0.0) throw NumericalError("com_shift: tweezers anti-trap the COM mode");
  return std::sqrt(arg) - w;
}

EffectiveModel effective_model(const GateConfig& config, const CrystalModes& modes) {
  EffectiveModel em;
  em.gamma = gamma_from_field(config.field_amplitude, config.trap);
  em.detuning = config.detuning;
  em.g_plus = com_shift(modes, config.tweezer_frequency, +2);
  em.g_minus = com_shift(modes, config.tweezer_frequency, -2);
  const double d = config.detuning;
  const double g2 = em.gamma * em.gamma;
  em.zz_rate = -g2 / (2.0 * d);
  auto rate = [&](double g) {
    const double den = g - d;
    if (std::abs(den) <= 1e-12 * std::abs(d))
      throw NumericalError("effective_model: detuning is resonant with a tweezer-shifted COM branch");
    return g2 / den;
  };
  em.w_plus_rate = rate(em.g_plus);
  em.w_minus_rate = rate(em.g_minus);
  em.dominant_zz_regime = std::abs(d) <= 0.2 * std::min(std::abs(em.g_plus), std::abs(em.g_minus));
  return em;
}

double resolve_drive_frequency(const GateConfig& config, const CrystalModes& modes) {
  if (config.drive_frequency) return *config.drive_frequency;
  const double w_com = modes.frequencies(CrystalModes::com);
  if (config.correction == DriveCorrection::none || config.modes == ModeSet::com_only ||
      config.tweezer_frequency == 0.0)
    return w_com + config.detuning;
  TweezerPerturbation mixed{config.tweezer_frequency, config.pair, {+1, -1}};
  return exact_com_branch_frequency(modes, mixed) + config.detuning;
}

namespace {

void apply_terms(const std::vector<DriveTerm>& terms, double t, double wi, double wj, cplx prefactor,
                 Eigen::Ref<const Eigen::MatrixXcd> x, Eigen::Ref<Eigen::MatrixXcd> y) {
  for (const auto& term : terms) {
    const double amp = term.coeff_i * wi + term.coeff_j * wj;
    if (amp == 0.0) continue;
    const cplx phase = std::polar(1.0, term.frequency * t);
    const cplx c = amp * phase;
    if (term.paired) {
      term.op.apply_add(prefactor * c, x, y);
      term.op_adjoint.apply_add(prefactor * std::conj(c), x, y);
    } else {
      term.op.apply_add(prefactor * c, x, y);
    }
  }
}

Eigen::SparseMatrix<cplx> assemble_terms(const std::vector<DriveTerm>& terms, Eigen::Index dim,
                                         double t, double wi, double wj) {
  Eigen::SparseMatrix<cplx> h(dim, dim);
  for (const auto& term : terms) {
    const double amp = term.coeff_i * wi + term.coeff_j * wj;
    if (amp == 0.0) continue;
    const cplx c = amp * std::polar(1.0, term.frequency * t);
    h += c * term.op.to_sparse();
    if (term.paired) h += std::conj(c) * term.op_adjoint.to_sparse();
  }
  h.prune(cplx(0.0));
  return h;
}

DriveTerm make_term(const SpaceSpec& space, std::vector<LadderFactor> word, double frequency,
                    double ci, double cj, bool paired = true) {
  DriveTerm t;
  t.op = MonomialOperator(space, word);
  t.op_adjoint = t.op.adjoint();
  t.frequency = frequency;
  t.coeff_i = ci;
  t.coeff_j = cj;
  t.paired = paired;
  return t;
}

Eigen::SparseMatrix<cplx> qubit_projector(int q) {
  Eigen::SparseMatrix<cplx> p(4, 4);
  p.insert(q, q) = 1.0;
  return p;
}

}  // namespace

TweezerHamiltonian::TweezerHamiltonian(const CrystalModes& modes, const std::vector<int>& retained,
                                       IonPair pair, double tweezer_frequency,
                                       const SpaceSpec& space)
    : space_(space) {
  if (static_cast<int>(retained.size()) != space.n_modes())
    throw ConfigError("tweezer_hamiltonian: one space mode per retained crystal mode is required");
  TweezerPerturbation{tweezer_frequency, pair, {1, 1}}.validate(static_cast<int>(modes.size()));
  if (tweezer_frequency == 0.0) return;
  const double wtw2 = tweezer_frequency * tweezer_frequency;
  const int r = space.n_modes();
  auto coeff = [&](int m, int n, int ion) {
    return wtw2 * modes.vectors(ion, m) * modes.vectors(ion, n) /
           (4.0 * std::sqrt(modes.frequencies(m) * modes.frequencies(n)));
  };
  for (int a = 0; a < r; ++a) {
    const int m = retained[a];
    const double wm = modes.frequencies(m);
    const double ci = coeff(m, m, pair.i), cj = coeff(m, m, pair.j);
    // (a e^{-iwt} + a^dag e^{iwt})^2 = a^2 e^{-2iwt} + h.c. + 2 a^dag a + 1
    terms_.push_back(make_term(space, {{a, 0, 2}}, -2.0 * wm, ci, cj));
    DriveTerm diag;
    diag.op = MonomialOperator::diagonal(
        space, 2.0 * number_diagonal(space, a) + Eigen::VectorXd::Ones(space.motional_dim()));
    diag.op_adjoint = diag.op;
    diag.coeff_i = ci;
    diag.coeff_j = cj;
    diag.paired = false;
    terms_.push_back(std::move(diag));
    for (int b = a + 1; b < r; ++b) {
      const int n = retained[b];
      const double wn = modes.frequencies(n);
      const double ci2 = 2.0 * coeff(m, n, pair.i), cj2 = 2.0 * coeff(m, n, pair.j);
      terms_.push_back(make_term(space, {{a, 0, 1}, {b, 0, 1}}, -(wm + wn), ci2, cj2));
      terms_.push_back(make_term(space, {{a, 1, 0}, {b, 0, 1}}, wm - wn, ci2, cj2));
    }
  }
}

void TweezerHamiltonian::apply_add(double t, SpinConfig spins, cplx prefactor,
                                   Eigen::Ref<const Eigen::MatrixXcd> x, Eigen::Ref<Eigen::MatrixXcd> y) const {
  apply_terms(terms_, t, spins.si, spins.sj, prefactor, x, y);
}

Eigen::SparseMatrix<cplx> TweezerHamiltonian::motional(double t, SpinConfig spins) const {
  return assemble_terms(terms_, space_.motional_dim(), t, spins.si, spins.sj);
}

Eigen::SparseMatrix<cplx> TweezerHamiltonian::operator()(double t) const {
  if (space_.n_qubits != 2) throw ConfigError("tweezer_hamiltonian: two qubits expected");
  Eigen::SparseMatrix<cplx> h(space_.dim(), space_.dim());
  for (int q = 0; q < 4; ++q) h += sparse_kron(qubit_projector(q), motional(t, spins_of(q)));
  return h;
}

FieldHamiltonian::FieldHamiltonian(double gamma, double drive_frequency, double com_frequency,
                                   const SpaceSpec& space, int com_slot)
    : space_(space) {
  if (com_slot < 0 || com_slot >= space.n_modes())
    throw ConfigError("field_hamiltonian: the COM mode must be part of the space");
  if (gamma == 0.0) return;
  // 2 gamma cos(mu t) a e^{-iwt} = gamma a (e^{i(mu-w)t} + e^{-i(mu+w)t})
  terms_.push_back(make_term(space, {{com_slot, 0, 1}}, drive_frequency - com_frequency, gamma, 0.0));
  terms_.push_back(make_term(space, {{com_slot, 0, 1}}, -(drive_frequency + com_frequency), gamma, 0.0));
}

void FieldHamiltonian::apply_add(double t, cplx prefactor, Eigen::Ref<const Eigen::MatrixXcd> x,
                                 Eigen::Ref<Eigen::MatrixXcd> y) const {
  apply_terms(terms_, t, 1.0, 0.0, prefactor, x, y);
}

Eigen::SparseMatrix<cplx> FieldHamiltonian::motional(double t) const {
  return assemble_terms(terms_, space_.motional_dim(), t, 1.0, 0.0);
}

Eigen::SparseMatrix<cplx> FieldHamiltonian::operator()(double t) const {
  return sparse_kron(sparse_identity<cplx>(space_.qubit_dim()), motional(t));
}

namespace {

int com_slot_of(const std::vector<int>& retained) {
  for (std::size_t k = 0; k < retained.size(); ++k)
    if (retained[k] == 0) return static_cast<int>(k);
  throw ConfigError("gate: the COM mode must be retained");
}

}  // namespace

GateHamiltonian::GateHamiltonian(const GateConfig& config, const CrystalModes& modes,
                                 const SpaceSpec& space)
    : space_(space),
      mu_(resolve_drive_frequency(config, modes)),
      gamma_(gamma_from_field(config.field_amplitude, config.trap)),
      tweezer_(modes, config.retained_modes(), config.pair, config.tweezer_frequency, space),
      field_(gamma_, mu_, modes.frequencies(CrystalModes::com), space,
             com_slot_of(config.retained_modes())) {}

void GateHamiltonian::apply(double t, SpinConfig spins, double tweezer_scale, double field_scale,
                            cplx prefactor, Eigen::Ref<const Eigen::MatrixXcd> x, Eigen::Ref<Eigen::MatrixXcd> y) const {
  y.setZero();
  if (tweezer_scale != 0.0) tweezer_.apply_add(t, spins, prefactor * tweezer_scale, x, y);
  if (field_scale != 0.0) field_.apply_add(t, prefactor * field_scale, x, y);
}

Eigen::SparseMatrix<cplx> GateHamiltonian::motional(double t, SpinConfig spins,
                                                    double tweezer_scale,
                                                    double field_scale) const {
  Eigen::SparseMatrix<cplx> h = tweezer_scale * tweezer_.motional(t, spins);
  h += field_scale * field_.motional(t);
  return h;
}

Eigen::SparseMatrix<cplx> GateHamiltonian::composite(double t, double tweezer_scale,
                                                     double field_scale) const {
  Eigen::SparseMatrix<cplx> h(space_.dim(), space_.dim());
  for (int q = 0; q < 4; ++q)
    h += sparse_kron(qubit_projector(q), motional(t, spins_of(q), tweezer_scale, field_scale));
  return h;
}

}  // namespace tgate
