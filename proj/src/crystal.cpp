#include "tgate/crystal.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <sstream>

namespace tgate {

void TrapSpec::validate() const {
  if (n_ions < 1) throw ConfigError("trap: n_ions must be >= 1");
  if (!(ion_mass > 0.0)) throw ConfigError("trap: ion_mass must be > 0");
  if (!(axial_frequency > 0.0)) throw ConfigError("trap: axial_frequency must be > 0");
  if (!(charge > 0.0)) throw ConfigError("trap: charge must be > 0");
}

double TrapSpec::coulomb_length() const {
  const double k = charge * charge /
                   (4.0 * constants::pi * constants::vacuum_permittivity * ion_mass *
                    axial_frequency * axial_frequency);
  return std::cbrt(k);
}

void TweezerPerturbation::validate(int n_ions) const {
  if (pair.i == pair.j) throw ConfigError("tweezer pair must address two distinct ions");
  if (pair.i < 0 || pair.j < 0 || pair.i >= n_ions || pair.j >= n_ions)
    throw ConfigError("tweezer pair index out of range for a chain of " +
                      std::to_string(n_ions) + " ions");
  auto sign_ok = [](int s) { return s == 1 || s == -1; };
  if (!sign_ok(spins.si) || !sign_ok(spins.sj))
    throw ConfigError("spin configuration entries must be +1 or -1");
  if (tweezer_frequency < 0.0) throw ConfigError("tweezer frequency must be >= 0");
}

Eigen::VectorXd equilibrium_positions(const TrapSpec& trap) {
  trap.validate();
  const int n = trap.n_ions;
  if (n == 1) return Eigen::VectorXd::Zero(1);

  // Uniform spacing with the large-N scaling of the central gap as the ansatz.
  const double spacing = 2.018 / std::pow(static_cast<double>(n), 0.559);
  Eigen::VectorXd u(n);
  for (int k = 0; k < n; ++k) u(k) = (k - 0.5 * (n - 1)) * spacing;

  Eigen::VectorXd r = chain_force_residual<double>(u);
  const int max_iter = 200;
  bool stalled = false;
  for (int iter = 0; iter < max_iter && !stalled && r.cwiseAbs().maxCoeff() > 1e-14; ++iter) {
    const Eigen::MatrixXd h = chain_hessian<double>(u);
    const Eigen::VectorXd step = h.ldlt().solve(-r);
    double lambda = 1.0;
    const double r0 = r.norm();
    while (true) {
      Eigen::VectorXd trial = u + lambda * step;
      bool ordered = true;
      for (int k = 1; k < n; ++k) ordered = ordered && trial(k) > trial(k - 1);
      if (ordered) {
        Eigen::VectorXd rt = chain_force_residual<double>(trial);
        if (rt.norm() < r0) {
          u = trial;
          r = rt;
          break;
        }
      }
      lambda *= 0.5;
      if (lambda < 1e-12) {
        if (r.cwiseAbs().maxCoeff() <= 1e-12) {  // at the round-off floor
          stalled = true;
          break;
        }
        std::ostringstream msg;
        msg << "equilibrium_positions: damped Newton stalled, residual " << r.cwiseAbs().maxCoeff();
        throw NumericalError(msg.str());
      }
    }
  }
  const double residual = r.cwiseAbs().maxCoeff();
  if (residual > 1e-12) {
    std::ostringstream msg;
    msg << "equilibrium_positions: no convergence for N=" << n << ", residual " << residual;
    throw NumericalError(msg.str());
  }
  // Enforce exact antisymmetry about the trap centre.
  Eigen::VectorXd sym = 0.5 * (u - u.reverse());
  return sym;
}

Eigen::MatrixXd axial_hessian(const TrapSpec& trap, const Eigen::VectorXd& positions) {
  trap.validate();
  if (positions.size() != trap.n_ions)
    throw ConfigError("axial_hessian: position count does not match n_ions");
  return chain_hessian<double>(positions);
}

namespace {

// Deterministic eigenvector sign: first significant component positive.
void fix_signs(Eigen::MatrixXd& v) {
  for (Eigen::Index m = 0; m < v.cols(); ++m) {
    for (Eigen::Index k = 0; k < v.rows(); ++k) {
      if (std::abs(v(k, m)) > 1e-8) {
        if (v(k, m) < 0) v.col(m) *= -1.0;
        break;
      }
    }
  }
}

Eigen::MatrixXd tweezer_curvature(const CrystalModes& modes, const TweezerPerturbation& pert) {
  const Eigen::Index n = modes.size();
  pert.validate(static_cast<int>(n));
  const double t = std::pow(pert.tweezer_frequency / modes.axial_frequency, 2);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  p(pert.pair.i, pert.pair.i) += t * pert.spins.si;
  p(pert.pair.j, pert.pair.j) += t * pert.spins.sj;
  return p;
}

}  // namespace

CrystalModes normal_modes(const TrapSpec& trap) {
  CrystalModes modes;
  modes.axial_frequency = trap.axial_frequency;
  modes.positions = equilibrium_positions(trap);
  modes.hessian = axial_hessian(trap, modes.positions);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(modes.hessian);
  if (es.info() != Eigen::Success) throw NumericalError("normal_modes: eigensolver failed");
  modes.vectors = es.eigenvectors();
  fix_signs(modes.vectors);
  modes.frequencies = es.eigenvalues().cwiseMax(0.0).cwiseSqrt() * trap.axial_frequency;
  return modes;
}

Eigen::VectorXd shifted_mode_frequencies(const CrystalModes& modes,
                                         const TweezerPerturbation& pert,
                                         ShiftMethod method) {
  const Eigen::Index n = modes.size();
  pert.validate(static_cast<int>(n));
  const double wz = modes.axial_frequency;
  if (method == ShiftMethod::perturbative) {
    const double wtw2 = pert.tweezer_frequency * pert.tweezer_frequency;
    Eigen::VectorXd out(n);
    for (Eigen::Index m = 0; m < n; ++m) {
      const double bi = modes.vectors(pert.pair.i, m);
      const double bj = modes.vectors(pert.pair.j, m);
      const double w2 = modes.frequencies(m) * modes.frequencies(m) +
                        wtw2 * (bi * bi * pert.spins.si + bj * bj * pert.spins.sj);
      if (w2 < 0.0)
        throw NumericalError("shifted_mode_frequencies: mode " + std::to_string(m) +
                             " is anti-trapped by the tweezers");
      out(m) = std::sqrt(w2);
    }
    std::sort(out.data(), out.data() + n);
    return out;
  }
  const Eigen::MatrixXd a = modes.hessian + tweezer_curvature(modes, pert);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd lam = es.eigenvalues();
  for (Eigen::Index m = 0; m < n; ++m) {
    if (lam(m) < 0.0)
      throw NumericalError("shifted_mode_frequencies: mode " + std::to_string(m) +
                           " has negative curvature " + std::to_string(lam(m)) +
                           " (anti-trapping instability)");
  }
  return lam.cwiseSqrt() * wz;
}

double exact_com_branch_frequency(const CrystalModes& modes, const TweezerPerturbation& pert) {
  const Eigen::MatrixXd a = modes.hessian + tweezer_curvature(modes, pert);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  const Eigen::Index n = modes.size();
  const Eigen::VectorXd com = modes.vectors.col(CrystalModes::com);
  Eigen::Index best = 0;
  double overlap = -1.0;
  for (Eigen::Index m = 0; m < n; ++m) {
    const double o = std::abs(es.eigenvectors().col(m).dot(com));
    if (o > overlap) {
      overlap = o;
      best = m;
    }
  }
  const double lam = es.eigenvalues()(best);
  if (lam < 0.0)
    throw NumericalError("exact_com_branch_frequency: COM branch (mode " + std::to_string(best) +
                         ") is unstable");
  return std::sqrt(lam) * modes.axial_frequency;
}

double drive_frequency_correction(const TrapSpec& trap, const TweezerPerturbation& pert) {
  const CrystalModes modes = normal_modes(trap);
  TweezerPerturbation mixed = pert;
  mixed.spins = {+1, -1};
  if (pert.tweezer_frequency == 0.0) return 0.0;
  return modes.frequencies(CrystalModes::com) - exact_com_branch_frequency(modes, mixed);
}

}  // namespace tgate
