#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "tgate/common.hpp"

namespace tgate {

/// Composite space: qubits (index major, qubit 0 most significant) then the
/// retained motional modes, occupation lexicographic with mode 0 most
/// significant.
struct SpaceSpec {
  int n_qubits = 2;
  std::vector<int> mode_cutoffs;  // n_max per mode, each >= 1

  /// Default budget for one dense complex state vector.
  static constexpr std::size_t default_budget_bytes = std::size_t(1) << 30;

  void validate(std::size_t budget_bytes = default_budget_bytes) const;
  Eigen::Index qubit_dim() const { return Eigen::Index(1) << n_qubits; }
  Eigen::Index motional_dim() const;
  Eigen::Index dim() const { return qubit_dim() * motional_dim(); }
  int n_modes() const { return static_cast<int>(mode_cutoffs.size()); }

  /// Stride of mode m inside the motional index.
  Eigen::Index stride(int mode) const;
  std::vector<int> occupations(Eigen::Index motional_index) const;
  Eigen::Index motional_index(const std::vector<int>& occupations) const;
};

template <typename Scalar>
struct LadderPair {
  Eigen::SparseMatrix<Scalar> lowering;
  Eigen::SparseMatrix<Scalar> raising;
};

/// Truncated annihilation/creation operators on Fock states 0..cutoff.
template <typename Scalar = cplx>
LadderPair<Scalar> ladder_operators(int cutoff) {
  if (cutoff < 1) throw ConfigError("ladder_operators: cutoff must be >= 1");
  const int n = cutoff + 1;
  Eigen::SparseMatrix<Scalar> a(n, n);
  std::vector<Eigen::Triplet<Scalar>> trips;
  trips.reserve(static_cast<std::size_t>(cutoff));
  for (int k = 1; k <= cutoff; ++k) trips.emplace_back(k - 1, k, Scalar(std::sqrt(double(k))));
  a.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseMatrix<Scalar> ad = a.adjoint();
  return {std::move(a), std::move(ad)};
}

/// Geometric occupation distribution p_n ~ nbar^n / (nbar+1)^(n+1),
/// renormalised over 0..cutoff.
Eigen::VectorXd thermal_weights(double nbar, int cutoff);

/// Unnormalised probability mass beyond the cutoff for one mode.
double thermal_tail(double nbar, int cutoff);

/// Product thermal state over the retained modes.
struct ThermalEnsemble {
  std::vector<double> nbar;
  Eigen::VectorXd weights;  // indexed by motional product index
  double tail = 0.0;        // discarded mass, 1 - prod(1 - tail_m)

  /// Indices with weight above floor * max weight, in index order.
  std::vector<Eigen::Index> support(double floor = 0.0) const;
};

ThermalEnsemble thermal_ensemble(const std::vector<double>& nbar, const SpaceSpec& space);

struct Factor {
  enum class Kind { qubit, mode };
  Kind kind;
  int index;
  static Factor qubit(int k) { return {Kind::qubit, k}; }
  static Factor mode(int m) { return {Kind::mode, m}; }
};

template <typename Scalar>
Eigen::SparseMatrix<Scalar> sparse_kron(const Eigen::SparseMatrix<Scalar>& a,
                                        const Eigen::SparseMatrix<Scalar>& b) {
  Eigen::SparseMatrix<Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
  std::vector<Eigen::Triplet<Scalar>> trips;
  trips.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
  for (int ka = 0; ka < a.outerSize(); ++ka)
    for (typename Eigen::SparseMatrix<Scalar>::InnerIterator ia(a, ka); ia; ++ia)
      for (int kb = 0; kb < b.outerSize(); ++kb)
        for (typename Eigen::SparseMatrix<Scalar>::InnerIterator ib(b, kb); ib; ++ib)
          trips.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                             ia.value() * ib.value());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

template <typename Scalar>
Eigen::SparseMatrix<Scalar> sparse_identity(Eigen::Index n) {
  Eigen::SparseMatrix<Scalar> id(n, n);
  id.setIdentity();
  return id;
}

/// Lift a single-factor operator to the composite space.
template <typename Scalar>
Eigen::SparseMatrix<Scalar> embed(const Eigen::SparseMatrix<Scalar>& op, Factor target,
                                  const SpaceSpec& space) {
  std::vector<Eigen::Index> dims;
  for (int q = 0; q < space.n_qubits; ++q) dims.push_back(2);
  for (int c : space.mode_cutoffs) dims.push_back(c + 1);
  const int slot = target.kind == Factor::Kind::qubit ? target.index : space.n_qubits + target.index;
  const int bound = target.kind == Factor::Kind::qubit ? space.n_qubits : space.n_modes();
  if (target.index < 0 || target.index >= bound)
    throw ConfigError("embed: target factor index out of range");
  if (op.rows() != dims[slot] || op.cols() != dims[slot])
    throw ConfigError("embed: operator dimension does not match the target factor");
  Eigen::Index left = 1, right = 1;
  for (int k = 0; k < slot; ++k) left *= dims[k];
  for (std::size_t k = slot + 1; k < dims.size(); ++k) right *= dims[k];
  return sparse_kron(sparse_kron(sparse_identity<Scalar>(left), op), sparse_identity<Scalar>(right));
}

/// Normal-ordered word a_m^dagger^raise a_m^lower on one mode.
struct LadderFactor {
  int mode;
  int raise;
  int lower;
};

/// Operator on the motional space with at most one non-zero per column:
/// products of ladder words on distinct modes, or diagonal operators. On the
/// product Fock basis such a word maps index k to k + offset with a
/// k-dependent coefficient. Matrix elements follow the projection of the
/// untruncated operator.
class MonomialOperator {
 public:
  MonomialOperator() = default;
  MonomialOperator(const SpaceSpec& space, const std::vector<LadderFactor>& word);

  static MonomialOperator diagonal(const SpaceSpec& space, const Eigen::VectorXd& values);

  Eigen::Index dim() const { return coeff_.size(); }
  Eigen::Index offset() const { return offset_; }
  MonomialOperator adjoint() const;
  Eigen::SparseMatrix<cplx> to_sparse() const;

  /// y += c * Op * x, column by column.
  void apply_add(cplx c, Eigen::Ref<const Eigen::MatrixXcd> x, Eigen::Ref<Eigen::MatrixXcd> y) const {
    const Eigen::Index n = coeff_.size() - std::abs(offset_);
    if (n <= 0) return;
    if (offset_ >= 0)
      y.middleRows(offset_, n).noalias() += c * (coeff_.head(n).asDiagonal() * x.topRows(n));
    else
      y.topRows(n).noalias() += c * (coeff_.tail(n).asDiagonal() * x.bottomRows(n));
  }

 private:
  Eigen::Index offset_ = 0;
  Eigen::VectorXd coeff_;  // coefficient by source index, zero where the word leaves the space
};

/// Number operator a_m^dagger a_m on the motional space as a diagonal.
Eigen::VectorXd number_diagonal(const SpaceSpec& space, int mode);

}  // namespace tgate
