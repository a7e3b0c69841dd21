#include "tgate/evolve.hpp"

#include <boost/numeric/odeint.hpp>
#include <boost/numeric/odeint/external/eigen/eigen.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace boost::numeric::odeint {

// The stock Eigen adaptor reports the complex scalar type as the norm type.
template <int R, int C, int O, int MR, int MC>
struct vector_space_norm_inf<Eigen::Matrix<std::complex<double>, R, C, O, MR, MC>> {
  using result_type = double;
  double operator()(const Eigen::Matrix<std::complex<double>, R, C, O, MR, MC>& m) const {
    return m.template lpNorm<Eigen::Infinity>();
  }
};

}  // namespace boost::numeric::odeint

namespace tgate {

namespace odeint = boost::numeric::odeint;

void PropagationOptions::validate() const {
  if (!(tol >= 1e-12 && tol <= 1e-6)) throw ConfigError("propagate: tol must lie in [1e-12, 1e-6]");
  if (max_step < 0.0) throw ConfigError("propagate: max_step must be >= 0");
}

namespace {

using Buffer = Eigen::VectorXcd;

struct MappedSystem {
  const Generator* h;
  Eigen::Index rows, cols;
  void operator()(const Buffer& x, Buffer& dxdt, double t) const {
    Eigen::Map<const Eigen::MatrixXcd> xm(x.data(), rows, cols);
    Eigen::Map<Eigen::MatrixXcd> ym(dxdt.data(), rows, cols);
    (*h)(t, cplx(0.0, -1.0), xm, ym);
  }
};

}  // namespace

Eigen::MatrixXcd propagate(const Generator& h, Eigen::MatrixXcd state, double t0, double t1,
                           const PropagationOptions& options) {
  options.validate();
  const Eigen::Index rows = state.rows(), cols = state.cols();
  const double span = t1 - t0;
  if (span == 0.0 || state.size() == 0) return state;
  const double dir = span > 0 ? 1.0 : -1.0;

  std::vector<double> targets;
  for (double s : options.sample_times)
    if ((s - t0) * dir > 0.0 && (t1 - s) * dir > 0.0) targets.push_back(s);
  std::sort(targets.begin(), targets.end(), [dir](double a, double b) { return a * dir < b * dir; });
  targets.push_back(t1);

  Buffer x = Eigen::Map<const Buffer>(state.data(), state.size());
  MappedSystem sys{&h, rows, cols};
  using Stepper = odeint::runge_kutta_fehlberg78<Buffer, double, Buffer, double,
                                                 odeint::vector_space_algebra>;
  auto stepper = odeint::make_controlled(options.tol, options.tol, Stepper());
  auto report = [&](double t) {
    if (!options.observer) return;
    Eigen::Map<const Eigen::MatrixXcd> xm(x.data(), rows, cols);
    options.observer(t, Eigen::MatrixXcd(xm));
  };
  for (double s : options.sample_times)
    if (s == t0) report(t0);

  const double cap = options.max_step > 0.0 ? options.max_step : std::abs(span);
  const double min_step = 1e-14 * std::max(std::abs(t0), std::abs(t1)) + 1e-300;
  double t = t0;
  double dt = dir * std::min(cap, std::abs(span) / 16.0);
  for (double target : targets) {
    while ((target - t) * dir > 0.0) {
      const double remaining = target - t;
      bool last = false;
      double step = dt;
      if (std::abs(step) > cap) step = dir * cap;
      if (std::abs(step) >= std::abs(remaining)) {
        step = remaining;
        last = true;
      }
      const double before = t;
      double trial = step;
      const auto result = stepper.try_step(sys, x, t, trial);
      if (result == odeint::success) {
        if (last) t = target;  // exact landing on the sample time
        // keep the suggested size unless the step was clipped to the target
        if (!last || std::abs(trial) > std::abs(dt)) dt = trial;
      } else {
        dt = trial;
        if (std::abs(dt) < min_step) {
          std::ostringstream msg;
          msg << "propagate: step size underflow at t = " << before << " s (dt = " << dt << ")";
          throw NumericalError(msg.str());
        }
      }
    }
    for (double s : options.sample_times)
      if (s == target && target != t0) report(target);
  }
  if (!x.allFinite())
    throw NumericalError("propagate: non-finite amplitude at t = " + std::to_string(t));
  return Eigen::Map<Eigen::MatrixXcd>(x.data(), rows, cols);
}

Eigen::MatrixXcd propagator(const Generator& h, Eigen::Index dim, double t0, double t1,
                            const PropagationOptions& options) {
  return propagate(h, Eigen::MatrixXcd::Identity(dim, dim), t0, t1, options);
}

Generator constant_generator(Eigen::SparseMatrix<cplx> h) {
  return [h = std::move(h)](double, cplx c, Eigen::Ref<const Eigen::MatrixXcd> x,
                            Eigen::Ref<Eigen::MatrixXcd> y) { y.noalias() = c * (h * x); };
}

Generator sparse_generator(std::function<Eigen::SparseMatrix<cplx>(double)> h) {
  return [h = std::move(h)](double t, cplx c, Eigen::Ref<const Eigen::MatrixXcd> x,
                            Eigen::Ref<Eigen::MatrixXcd> y) { y.noalias() = c * (h(t) * x); };
}

PulseSchedule::PulseSchedule(const GateConfig& config) {
  config.validate();
  double start = 0.0;
  for (const auto& plan : config.pulses) {
    PulseRecord r;
    r.start = start;
    r.duration = config.pulse_duration();
    r.ramp = config.ramp_time();
    r.field_on = plan.field_on;
    r.tweezer_on = plan.tweezer_on;
    r.flips_after = plan.flips_after;
    start += r.duration;
    pulses_.push_back(std::move(r));
  }
}

double PulseSchedule::total_duration() const {
  return pulses_.empty() ? 0.0 : pulses_.back().start + pulses_.back().duration;
}

double PulseSchedule::envelope(int k, double t) const {
  const auto& p = pulses_.at(static_cast<std::size_t>(k));
  if (p.ramp <= 0.0) return (t >= p.start && t <= p.start + p.duration) ? 1.0 : 0.0;
  return tgate::envelope(t - p.start, p.duration, p.ramp);
}

namespace {

int apply_flips(int q, const std::vector<int>& flips) {
  for (int f : flips) q ^= (f == 0 ? 2 : 1);
  return q;
}

}  // namespace

int PulseSchedule::frame_label(int q0, int k) const {
  int q = q0;
  for (int p = 0; p < k; ++p) q = apply_flips(q, pulses_[p].flips_after);
  return q;
}

int PulseSchedule::final_label(int q0) const { return frame_label(q0, size()); }

std::array<int, 2> PulseSchedule::flip_counts() const {
  std::array<int, 2> c{0, 0};
  for (const auto& p : pulses_)
    for (int f : p.flips_after) ++c[static_cast<std::size_t>(f)];
  return c;
}

bool PulseSchedule::pauli_frame_is_identity() const {
  const auto c = flip_counts();
  return c[0] % 2 == 0 && c[1] % 2 == 0;
}

void Trajectory::validate() const {
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw NumericalError("trajectory: sample times must increase");
  if (alpha.rows() != static_cast<Eigen::Index>(times.size()) ||
      alpha.cols() != static_cast<Eigen::Index>(labels.size()))
    throw NumericalError("trajectory: sample matrix shape mismatch");
}

std::string qubit_label_string(int q) {
  return std::string{char('0' + ((q >> 1) & 1)), char('0' + (q & 1))};
}

Eigen::VectorXcd SectorStates::composite(int a, Eigen::Index k) const {
  const Eigen::Index d = space.motional_dim();
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4 * d);
  v.segment(final_label[static_cast<std::size_t>(a)] * d, d) = motional[static_cast<std::size_t>(a)].col(k);
  return v;
}

int evolve_sector(const GateHamiltonian& h, const PulseSchedule& schedule, int q0,
                  Eigen::MatrixXcd& motional, const GateRunOptions& options,
                  std::vector<double>* times, std::vector<cplx>* alpha, int com_slot) {
  const SpaceSpec& space = h.space();
  const double cap = options.max_step_fraction * constants::two_pi / h.drive_frequency();
  MonomialOperator lower;
  if (alpha) lower = MonomialOperator(space, {{com_slot, 0, 1}});

  auto record = [&](double t, const Eigen::MatrixXcd& x) {
    Eigen::VectorXcd ax = Eigen::VectorXcd::Zero(x.rows());
    lower.apply_add(1.0, x.col(0), ax);
    const double n2 = x.col(0).squaredNorm();
    times->push_back(t);
    alpha->push_back(x.col(0).dot(ax) / n2);
  };

  for (int k = 0; k < schedule.size(); ++k) {
    const PulseRecord& p = schedule.pulses()[static_cast<std::size_t>(k)];
    const SpinConfig spins = spins_of(schedule.frame_label(q0, k));
    const double tw = p.tweezer_on ? 1.0 : 0.0;
    const double fe = p.field_on ? 1.0 : 0.0;
    Generator gen = [&, k, spins, tw, fe](double t, cplx c, Eigen::Ref<const Eigen::MatrixXcd> x,
                                          Eigen::Ref<Eigen::MatrixXcd> y) {
      const double f = schedule.envelope(k, t);
      h.apply(t, spins, tw * f, fe * f, c, x, y);
    };
    PropagationOptions po;
    po.tol = options.tol;
    po.max_step = cap;
    if (times && alpha && options.samples_per_pulse > 0) {
      const int n = options.samples_per_pulse;
      for (int s = (k == 0 ? 0 : 1); s <= n; ++s) po.sample_times.push_back(p.start + p.duration * s / n);
      po.observer = record;
    }
    motional = propagate(gen, std::move(motional), p.start, p.start + p.duration, po);
  }
  return schedule.final_label(q0);
}

SectorStates evolve_fock_states(const GateConfig& config, const CrystalModes& modes,
                                const SpaceSpec& space, const std::vector<Eigen::Index>& fock,
                                const GateRunOptions& options) {
  space.validate();
  if (space.n_qubits != 2) throw ConfigError("gate: the simulated space must hold two qubits");
  if (space.n_modes() != static_cast<int>(config.retained_modes().size()))
    throw ConfigError("gate: space cutoffs must match the retained modes");
  const GateHamiltonian h(config, modes, space);
  const PulseSchedule schedule(config);
  SectorStates out;
  out.space = space;
  out.fock = fock;
  const Eigen::Index d = space.motional_dim();
  for (int q = 0; q < 4; ++q) {
    Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(d, static_cast<Eigen::Index>(fock.size()));
    for (std::size_t k = 0; k < fock.size(); ++k) {
      if (fock[k] < 0 || fock[k] >= d) throw ConfigError("gate: Fock index out of range");
      x(fock[k], static_cast<Eigen::Index>(k)) = 1.0;
    }
    out.final_label[static_cast<std::size_t>(q)] = evolve_sector(h, schedule, q, x, options);
    out.motional[static_cast<std::size_t>(q)] = std::move(x);
  }
  return out;
}

GateResult run_gate(const GateConfig& config, const CrystalModes& modes, const SpaceSpec& space,
                    const Eigen::Vector4cd& qubit, const Eigen::VectorXcd& motional,
                    const GateRunOptions& options) {
  space.validate();
  if (space.n_qubits != 2) throw ConfigError("gate: the simulated space must hold two qubits");
  const Eigen::Index d = space.motional_dim();
  if (motional.size() != d) throw ConfigError("gate: motional state has the wrong dimension");
  const GateHamiltonian h(config, modes, space);
  const PulseSchedule schedule(config);
  const auto retained = config.retained_modes();
  const int com_slot =
      static_cast<int>(std::find(retained.begin(), retained.end(), 0) - retained.begin());

  GateResult res;
  res.state = Eigen::VectorXcd::Zero(4 * d);
  const double norm0 = qubit.squaredNorm() * motional.squaredNorm();
  std::vector<std::vector<cplx>> alphas;
  for (int q = 0; q < 4; ++q) {
    if (qubit(q) == cplx(0.0)) continue;
    Eigen::MatrixXcd x = motional;
    std::vector<double> times;
    std::vector<cplx> alpha;
    const bool track = options.samples_per_pulse > 0;
    const int fq = evolve_sector(h, schedule, q, x, options, track ? &times : nullptr,
                                 track ? &alpha : nullptr, com_slot);
    res.state.segment(fq * d, d) += qubit(q) * x.col(0);
    if (track) {
      res.trajectory.times = times;
      res.trajectory.labels.push_back(q);
      alphas.push_back(std::move(alpha));
    }
  }
  if (!alphas.empty()) {
    res.trajectory.alpha.resize(static_cast<Eigen::Index>(res.trajectory.times.size()),
                                static_cast<Eigen::Index>(alphas.size()));
    for (std::size_t c = 0; c < alphas.size(); ++c)
      for (std::size_t k = 0; k < alphas[c].size(); ++k)
        res.trajectory.alpha(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) = alphas[c][k];
    res.trajectory.validate();
  }
  res.norm_drift = std::abs(res.state.squaredNorm() - norm0);
  return res;
}

}  // namespace tgate
