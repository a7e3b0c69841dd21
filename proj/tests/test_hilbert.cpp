#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"

using namespace tgate;

namespace {

Eigen::MatrixXcd dense(const Eigen::SparseMatrix<cplx>& m) { return Eigen::MatrixXcd(m); }

Eigen::SparseMatrix<cplx> mode_operator(const SpaceSpec& s, int mode, int raise, int lower) {
  // Motional-only space: embed with zero qubits.
  SpaceSpec motional{0, s.mode_cutoffs};
  const auto l = ladder_operators(s.mode_cutoffs[static_cast<std::size_t>(mode)]);
  // Product of the untruncated word projected onto the cutoff: build it on a
  // larger space and cut.
  const int big = s.mode_cutoffs[static_cast<std::size_t>(mode)] + raise + lower + 2;
  const auto lb = ladder_operators(big);
  Eigen::MatrixXcd w = Eigen::MatrixXcd::Identity(big + 1, big + 1);
  for (int k = 0; k < raise; ++k) w = w * dense(lb.raising);
  for (int k = 0; k < lower; ++k) w = w * dense(lb.lowering);
  const int n = s.mode_cutoffs[static_cast<std::size_t>(mode)] + 1;
  Eigen::SparseMatrix<cplx> cut = w.topLeftCorner(n, n).sparseView();
  return embed(cut, Factor::mode(mode), motional);
}

}  // namespace

TEST(Hilbert, LadderCommutator) {
  const int c = 7;
  const auto l = ladder_operators(c);
  const Eigen::MatrixXcd comm = dense(l.lowering) * dense(l.raising) - dense(l.raising) * dense(l.lowering);
  for (int k = 0; k < c; ++k) EXPECT_NEAR(std::abs(comm(k, k) - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(comm(c, c).real(), -double(c), 1e-12);
  EXPECT_THROW(ladder_operators(0), ConfigError);
}

TEST(Hilbert, ThermalWeights) {
  const Eigen::VectorXd w0 = thermal_weights(0.0, 5);
  EXPECT_DOUBLE_EQ(w0(0), 1.0);
  EXPECT_DOUBLE_EQ(w0.tail(5).sum(), 0.0);
  // geometric law before renormalisation: p_0 = 1/(nbar+1)
  const int c = 60;
  const Eigen::VectorXd w1 = thermal_weights(1.0, c);
  const double norm = 1.0 - thermal_tail(1.0, c);
  EXPECT_NEAR(w1(0) * norm, 0.5, 1e-15);
  for (int n = 0; n < c; ++n) EXPECT_NEAR(w1(n + 1) / w1(n), 0.5, 1e-12);
  EXPECT_NEAR(w1.sum(), 1.0, 1e-14);
  EXPECT_THROW(thermal_weights(-0.1, 5), ConfigError);
}

TEST(Hilbert, ThermalMeanOfTruncatedDistribution) {
  // renormalised geometric law: <n> = nbar - (c+1) r^(c+1) / (1 - r^(c+1))
  for (double nbar : {0.3, 0.6, 1.0, 2.0}) {
    for (int c : {10, 20, 40}) {
      const Eigen::VectorXd w = thermal_weights(nbar, c);
      double mean = 0.0;
      for (int n = 0; n <= c; ++n) mean += n * w(n);
      const double rc = std::pow(nbar / (nbar + 1), c + 1);
      EXPECT_NEAR(mean, nbar - (c + 1) * rc / (1 - rc), 1e-12) << nbar << " " << c;
      EXPECT_NEAR(thermal_tail(nbar, c), rc, 1e-15);
    }
  }
}

TEST(Hilbert, ProductEnsemble) {
  SpaceSpec s{2, {4, 3}};
  const ThermalEnsemble th = thermal_ensemble({0.5, 0.2}, s);
  const Eigen::VectorXd a = thermal_weights(0.5, 4), b = thermal_weights(0.2, 3);
  for (int i = 0; i <= 4; ++i)
    for (int j = 0; j <= 3; ++j) EXPECT_NEAR(th.weights(s.motional_index({i, j})), a(i) * b(j), 1e-15);
  EXPECT_NEAR(th.tail, 1 - (1 - thermal_tail(0.5, 4)) * (1 - thermal_tail(0.2, 3)), 1e-15);
  const auto all = th.support(0.0);
  EXPECT_EQ(all.size(), 20u);
  const auto some = th.support(0.05);
  for (auto k : some) EXPECT_GE(th.weights(k), 0.05 * th.weights.maxCoeff());
  EXPECT_THROW(thermal_ensemble({0.5}, s), ConfigError);
}

TEST(Hilbert, SpaceIndexing) {
  SpaceSpec s{2, {3, 2, 4}};
  EXPECT_EQ(s.motional_dim(), 4 * 3 * 5);
  EXPECT_EQ(s.dim(), 4 * 60);
  for (Eigen::Index k = 0; k < s.motional_dim(); ++k) EXPECT_EQ(s.motional_index(s.occupations(k)), k);
  EXPECT_EQ(s.stride(2), 1);
  EXPECT_EQ(s.stride(0), 15);
  SpaceSpec bad{2, {0}};
  EXPECT_THROW(bad.validate(), ConfigError);
  SpaceSpec huge{2, {1000, 1000, 1000}};
  EXPECT_THROW(huge.validate(), ConfigError);
}

TEST(Hilbert, EmbeddedOperatorsOnDisjointFactorsCommute) {
  SpaceSpec s{2, {3, 2}};
  Eigen::SparseMatrix<cplx> sx(2, 2);
  sx.insert(0, 1) = 1.0;
  sx.insert(1, 0) = 1.0;
  const auto a0 = embed(ladder_operators(3).lowering, Factor::mode(0), s);
  const auto a1 = embed(ladder_operators(2).raising, Factor::mode(1), s);
  const auto x0 = embed(sx, Factor::qubit(0), s);
  const auto x1 = embed(sx, Factor::qubit(1), s);
  for (const auto* p : {&a0, &a1, &x0, &x1})
    for (const auto* q : {&a0, &a1, &x0, &x1}) {
      if (p == q) continue;
      EXPECT_LT((dense(*p) * dense(*q) - dense(*q) * dense(*p)).norm(), 1e-12);
    }
  EXPECT_THROW(embed(sx, Factor::qubit(2), s), ConfigError);
  EXPECT_THROW(embed(sx, Factor::mode(0), s), ConfigError);
}

TEST(Hilbert, EmbedOrderPutsQubitZeroFirst) {
  SpaceSpec s{2, {1}};
  Eigen::SparseMatrix<cplx> p1(2, 2);
  p1.insert(1, 1) = 1.0;
  const Eigen::MatrixXcd e = dense(embed(p1, Factor::qubit(0), s));
  // |1 0, n> has composite index 2 * 2 + n
  EXPECT_EQ(e(4, 4), cplx(1.0));
  EXPECT_EQ(e(2, 2), cplx(0.0));
}

TEST(Hilbert, SigmaZOnLeftQubitFollowsSpinConvention) {
  // |1> carries spin +1: sigma_z = diag(-1, +1) on (|0>, |1>)
  SpaceSpec s{2, {1}};
  Eigen::SparseMatrix<cplx> z(2, 2);
  z.insert(0, 0) = -1.0;
  z.insert(1, 1) = 1.0;
  const Eigen::MatrixXcd e = dense(embed(z, Factor::qubit(0), s));
  const double expect[] = {-1, -1, -1, -1, 1, 1, 1, 1};
  for (int k = 0; k < 8; ++k) EXPECT_EQ(e(k, k), cplx(expect[k])) << k;
  EXPECT_EQ((e - Eigen::MatrixXcd(e.diagonal().asDiagonal())).norm(), 0.0);
}

TEST(Hilbert, MonomialMatchesSparseProducts) {
  SpaceSpec s{0, {5, 3}};
  const std::vector<std::vector<LadderFactor>> words{
      {{0, 0, 1}}, {{0, 1, 0}}, {{0, 2, 0}}, {{1, 0, 2}}, {{0, 1, 0}, {1, 0, 1}}, {{0, 0, 1}, {1, 0, 1}},
      {{0, 1, 1}}, {{0, 2, 0}, {1, 1, 0}}};
  for (const auto& w : words) {
    const MonomialOperator op(s, w);
    Eigen::MatrixXcd ref = Eigen::MatrixXcd::Identity(s.motional_dim(), s.motional_dim());
    for (const auto& f : w) ref = ref * dense(mode_operator(s, f.mode, f.raise, f.lower));
    EXPECT_LT((dense(op.to_sparse()) - ref).norm(), 1e-12);
    EXPECT_LT((dense(op.adjoint().to_sparse()) - ref.adjoint()).norm(), 1e-12);

    std::mt19937 rng(7);
    std::normal_distribution<double> n(0, 1);
    Eigen::MatrixXcd x(s.motional_dim(), 3);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = cplx(n(rng), n(rng));
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Ones(s.motional_dim(), 3);
    const Eigen::MatrixXcd expect = y + cplx(0.3, -1.2) * (ref * x);
    op.apply_add(cplx(0.3, -1.2), x, y);
    EXPECT_LT((y - expect).norm(), 1e-12);
  }
}

TEST(Hilbert, NumberDiagonal) {
  SpaceSpec s{2, {3, 2}};
  const Eigen::VectorXd n1 = number_diagonal(s, 1);
  for (Eigen::Index k = 0; k < s.motional_dim(); ++k) EXPECT_EQ(n1(k), s.occupations(k)[1]);
  const MonomialOperator d = MonomialOperator::diagonal(s, n1);
  EXPECT_LT((dense(d.to_sparse()) - dense(MonomialOperator(s, {{1, 1, 1}}).to_sparse())).norm(), 1e-14);
}
