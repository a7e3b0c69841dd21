#include "tgate/hilbert.hpp"

#include <algorithm>
#include <limits>

namespace tgate {

void SpaceSpec::validate(std::size_t budget_bytes) const {
  if (n_qubits < 0 || n_qubits > 8) throw ConfigError("space: n_qubits out of range");
  if (mode_cutoffs.empty()) throw ConfigError("space: at least one motional mode is required");
  double total = double(Eigen::Index(1) << n_qubits);
  for (int c : mode_cutoffs) {
    if (c < 1) throw ConfigError("space: every mode cutoff must be >= 1");
    total *= (c + 1);
  }
  if (total * sizeof(cplx) > double(budget_bytes))
    throw ConfigError("space: composite dimension " + std::to_string(static_cast<long long>(total)) +
                      " exceeds the memory budget");
}

Eigen::Index SpaceSpec::motional_dim() const {
  Eigen::Index d = 1;
  for (int c : mode_cutoffs) d *= (c + 1);
  return d;
}

Eigen::Index SpaceSpec::stride(int mode) const {
  Eigen::Index s = 1;
  for (int m = n_modes() - 1; m > mode; --m) s *= (mode_cutoffs[m] + 1);
  return s;
}

std::vector<int> SpaceSpec::occupations(Eigen::Index idx) const {
  std::vector<int> occ(mode_cutoffs.size());
  for (int m = n_modes() - 1; m >= 0; --m) {
    const int base = mode_cutoffs[m] + 1;
    occ[m] = static_cast<int>(idx % base);
    idx /= base;
  }
  return occ;
}

Eigen::Index SpaceSpec::motional_index(const std::vector<int>& occ) const {
  Eigen::Index idx = 0;
  for (int m = 0; m < n_modes(); ++m) idx = idx * (mode_cutoffs[m] + 1) + occ[m];
  return idx;
}

Eigen::VectorXd thermal_weights(double nbar, int cutoff) {
  if (!(nbar >= 0.0)) throw ConfigError("thermal_weights: nbar must be >= 0");
  if (cutoff < 0) throw ConfigError("thermal_weights: cutoff must be >= 0");
  Eigen::VectorXd p(cutoff + 1);
  const double ratio = nbar / (nbar + 1.0);
  p(0) = 1.0 / (nbar + 1.0);
  for (int n = 1; n <= cutoff; ++n) p(n) = p(n - 1) * ratio;
  return p / p.sum();
}

double thermal_tail(double nbar, int cutoff) {
  if (nbar <= 0.0) return 0.0;
  return std::pow(nbar / (nbar + 1.0), cutoff + 1);
}

std::vector<Eigen::Index> ThermalEnsemble::support(double floor) const {
  std::vector<Eigen::Index> out;
  const double cut = floor * weights.maxCoeff();
  for (Eigen::Index k = 0; k < weights.size(); ++k)
    if (weights(k) > cut) out.push_back(k);
  return out;
}

ThermalEnsemble thermal_ensemble(const std::vector<double>& nbar, const SpaceSpec& space) {
  if (static_cast<int>(nbar.size()) != space.n_modes())
    throw ConfigError("thermal_ensemble: one nbar per retained mode is required");
  ThermalEnsemble th;
  th.nbar = nbar;
  th.weights = Eigen::VectorXd::Ones(space.motional_dim());
  double kept = 1.0;
  std::vector<Eigen::VectorXd> per_mode;
  for (int m = 0; m < space.n_modes(); ++m) {
    per_mode.push_back(thermal_weights(nbar[m], space.mode_cutoffs[m]));
    kept *= 1.0 - thermal_tail(nbar[m], space.mode_cutoffs[m]);
  }
  th.tail = 1.0 - kept;
  for (Eigen::Index k = 0; k < th.weights.size(); ++k) {
    const auto occ = space.occupations(k);
    for (int m = 0; m < space.n_modes(); ++m) th.weights(k) *= per_mode[m](occ[m]);
  }
  return th;
}

namespace {

// <n + raise - lower| a^dag^raise a^lower |n>
double word_element(int n, int raise, int lower) {
  double v = 1.0;
  for (int k = 0; k < lower; ++k) v *= std::sqrt(double(n - k));
  const int mid = n - lower;
  for (int k = 1; k <= raise; ++k) v *= std::sqrt(double(mid + k));
  return v;
}

}  // namespace

MonomialOperator::MonomialOperator(const SpaceSpec& space, const std::vector<LadderFactor>& word) {
  for (std::size_t a = 0; a < word.size(); ++a) {
    if (word[a].mode < 0 || word[a].mode >= space.n_modes())
      throw ConfigError("MonomialOperator: mode index out of range");
    for (std::size_t b = a + 1; b < word.size(); ++b)
      if (word[a].mode == word[b].mode)
        throw ConfigError("MonomialOperator: one ladder word per mode");
    offset_ += (word[a].raise - word[a].lower) * space.stride(word[a].mode);
  }
  const Eigen::Index dim = space.motional_dim();
  coeff_ = Eigen::VectorXd::Zero(dim);
  for (Eigen::Index idx = 0; idx < dim; ++idx) {
    const auto occ = space.occupations(idx);
    double v = 1.0;
    for (const auto& f : word) {
      const int n = occ[f.mode];
      if (n < f.lower || n - f.lower + f.raise > space.mode_cutoffs[f.mode]) {
        v = 0.0;
        break;
      }
      v *= word_element(n, f.raise, f.lower);
    }
    coeff_(idx) = v;
  }
}

MonomialOperator MonomialOperator::diagonal(const SpaceSpec& space, const Eigen::VectorXd& values) {
  if (values.size() != space.motional_dim()) throw ConfigError("MonomialOperator::diagonal: size mismatch");
  MonomialOperator op;
  op.coeff_ = values;
  return op;
}

MonomialOperator MonomialOperator::adjoint() const {
  MonomialOperator op;
  op.offset_ = -offset_;
  op.coeff_ = Eigen::VectorXd::Zero(coeff_.size());
  const Eigen::Index n = coeff_.size() - std::abs(offset_);
  if (n <= 0) return op;
  if (offset_ >= 0)
    op.coeff_.segment(offset_, n) = coeff_.head(n);
  else
    op.coeff_.head(n) = coeff_.tail(n);
  return op;
}

Eigen::SparseMatrix<cplx> MonomialOperator::to_sparse() const {
  std::vector<Eigen::Triplet<cplx>> trips;
  const Eigen::Index dim = coeff_.size();
  for (Eigen::Index k = 0; k < dim; ++k) {
    const Eigen::Index dst = k + offset_;
    if (coeff_(k) != 0.0 && dst >= 0 && dst < dim) trips.emplace_back(dst, k, coeff_(k));
  }
  Eigen::SparseMatrix<cplx> m(dim, dim);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

Eigen::VectorXd number_diagonal(const SpaceSpec& space, int mode) {
  Eigen::VectorXd d(space.motional_dim());
  for (Eigen::Index k = 0; k < d.size(); ++k) d(k) = space.occupations(k)[mode];
  return d;
}

}  // namespace tgate
