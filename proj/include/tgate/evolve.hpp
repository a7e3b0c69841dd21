#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "tgate/drive.hpp"

namespace tgate {

/// y = prefactor * H(t) x, column by column.
using Generator = std::function<void(double t, cplx prefactor, Eigen::Ref<const Eigen::MatrixXcd> x,
                                     Eigen::Ref<Eigen::MatrixXcd> y)>;

struct PropagationOptions {
  double tol = 1e-10;    // absolute and relative local error target
  double max_step = 0.0; // seconds; 0 means unbounded
  /// Times at which the state is reported to the observer, strictly inside
  /// (t0, t1) or at the end points.
  std::vector<double> sample_times;
  std::function<void(double t, const Eigen::MatrixXcd& state)> observer;

  void validate() const;
};

/// Solve i d/dt x = H(t) x from t0 to t1 (t1 < t0 runs backwards) with an
/// adaptive 7(8) Runge-Kutta-Fehlberg scheme.
Eigen::MatrixXcd propagate(const Generator& h, Eigen::MatrixXcd state, double t0, double t1,
                           const PropagationOptions& options = {});

/// Columns are propagate applied to the basis states of a dim-dimensional
/// space.
Eigen::MatrixXcd propagator(const Generator& h, Eigen::Index dim, double t0, double t1,
                            const PropagationOptions& options = {});

/// Generator for a fixed sparse matrix.
Generator constant_generator(Eigen::SparseMatrix<cplx> h);

/// Generator for a time-dependent sparse operator factory.
Generator sparse_generator(std::function<Eigen::SparseMatrix<cplx>(double)> h);

struct PulseRecord {
  double start = 0.0;
  double duration = 0.0;
  double ramp = 0.0;
  bool field_on = false;
  bool tweezer_on = true;
  std::vector<int> flips_after;  // 0 = ion i, 1 = ion j
};

class PulseSchedule {
 public:
  explicit PulseSchedule(const GateConfig& config);

  const std::vector<PulseRecord>& pulses() const { return pulses_; }
  int size() const { return static_cast<int>(pulses_.size()); }
  double total_duration() const;
  /// Envelope of pulse k at absolute time t.
  double envelope(int k, double t) const;

  /// Qubit label during pulse k for a state that starts with label q0.
  int frame_label(int q0, int k) const;
  /// Label after the whole sequence (pi-pulses are sigma_x, no phases).
  int final_label(int q0) const;
  /// Number of pi-pulses each qubit receives.
  std::array<int, 2> flip_counts() const;
  /// True when every qubit is flipped an even number of times.
  bool pauli_frame_is_identity() const;

 private:
  std::vector<PulseRecord> pulses_;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<int> labels;  // initial qubit labels, one column each
  Eigen::MatrixXcd alpha;   // <a_com>(times[k]) for labels[c] at (k, c)

  void validate() const;
};

std::string qubit_label_string(int q);

struct GateRunOptions {
  double tol = 1e-10;
  /// Step cap as a fraction of the drive period 2 pi / mu.
  double max_step_fraction = 0.025;
  int samples_per_pulse = 0;
};

/// Final motional states of every qubit sector for a set of initial Fock
/// product states. U |a, n_k> = |final_label[a]> (x) motional[a].col(k).
struct SectorStates {
  SpaceSpec space;
  std::vector<Eigen::Index> fock;
  std::array<int, 4> final_label{};
  std::array<Eigen::MatrixXcd, 4> motional;

  /// Composite column U |a, n_k>.
  Eigen::VectorXcd composite(int a, Eigen::Index k) const;
};

/// Evolve the motional columns of one initial qubit sector through the full
/// schedule. Returns the final label.
int evolve_sector(const GateHamiltonian& h, const PulseSchedule& schedule, int q0,
                  Eigen::MatrixXcd& motional, const GateRunOptions& options,
                  std::vector<double>* times = nullptr, std::vector<cplx>* alpha = nullptr,
                  int com_slot = 0);

SectorStates evolve_fock_states(const GateConfig& config, const CrystalModes& modes,
                                const SpaceSpec& space, const std::vector<Eigen::Index>& fock,
                                const GateRunOptions& options = {});

struct GateResult {
  Eigen::VectorXcd state;  // composite final state
  Trajectory trajectory;
  double norm_drift = 0.0;
};

/// Run the gate sequence on |qubit> (x) |motional>.
GateResult run_gate(const GateConfig& config, const CrystalModes& modes, const SpaceSpec& space,
                    const Eigen::Vector4cd& qubit, const Eigen::VectorXcd& motional,
                    const GateRunOptions& options = {});

}  // namespace tgate
