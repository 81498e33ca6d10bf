#include <gtest/gtest.h>

#include "nctorus/complex_structure.hpp"
#include "nctorus/errors.hpp"
#include "oracles.hpp"

using namespace nctorus;

namespace {
constexpr cd kI{0.0, 1.0};

double eig_residual(const AntiholFrame& f, const ComplexStructure& cs) {
  return (f.W * cs.J().transpose() + kI * f.W).cwiseAbs().maxCoeff();
}
}  // namespace

TEST(ComplexStruct, RejectsBadJ) {
  EXPECT_THROW(ComplexStructure(Eigen::MatrixXd::Identity(2, 2)), DomainError);
  EXPECT_THROW(ComplexStructure(Eigen::MatrixXd::Zero(3, 3)), DomainError);
}

TEST(ComplexStruct, StandardFrame) {
  for (std::size_t n : {1u, 2u, 3u}) {
    const auto cs = ComplexStructure::standard(n);
    const auto f = antihol_frame(cs);
    EXPECT_LT(eig_residual(f, cs), 1e-12);
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(f.W);
    EXPECT_EQ(static_cast<std::size_t>(lu.rank()), n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        EXPECT_NEAR(std::abs(f.W(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(f.pivots[k])) - (j == k ? 1.0 : 0.0)),
                    0.0, 1e-14);
  }
}

TEST(ComplexStruct, RandomFramesAndPeriods) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 3);
    const auto cs = random_complex_structure(n, rng);
    const auto f = antihol_frame(cs);
    EXPECT_LT(eig_residual(f, cs), 1e-10);
    Eigen::MatrixXcd M(2 * n, 2 * n);
    M << f.W, f.W.conjugate();
    EXPECT_GT(reciprocal_condition(M), 1e-12);

    const auto pm = period_from_j(cs);
    EXPECT_LT((pm.Q * cs.J() - kI * pm.Q).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((j_from_period(pm).J() - cs.J()).cwiseAbs().maxCoeff(), 1e-9);

    // Same input, same bits.
    const auto f2 = antihol_frame(cs);
    EXPECT_TRUE(f.W == f2.W);
  }
}

TEST(ComplexStruct, PeriodConvention) {
  // With Q J = i Q, the lattice (iI | I) carries -J0; J0 itself has period (-iI | I).
  for (std::size_t n : {1u, 2u}) {
    const auto N = static_cast<Eigen::Index>(n);
    PeriodMatrix pm;
    pm.Q.resize(N, 2 * N);
    pm.Q << kI * Eigen::MatrixXcd::Identity(N, N), Eigen::MatrixXcd::Identity(N, N);
    const auto cs = j_from_period(pm);
    EXPECT_LT((cs.J() + ComplexStructure::standard(n).J()).cwiseAbs().maxCoeff(), 1e-10);

    const auto q0 = period_from_j(ComplexStructure::standard(n));
    Eigen::MatrixXcd expected(N, 2 * N);
    expected << -kI * Eigen::MatrixXcd::Identity(N, N), Eigen::MatrixXcd::Identity(N, N);
    // Row equivalence: the left n x n block of q0 normalizes q0 to `expected` up to a left factor.
    const Eigen::MatrixXcd L = q0.Q.rightCols(N);
    EXPECT_LT((L.inverse() * q0.Q - expected).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(ComplexStruct, BlockFramesAreBlockSupported) {
  const auto cs = ComplexStructure::from_blocks(
      {ComplexStructure::block_from_tau(cd(0.3, 1.2)), ComplexStructure::block_from_tau(cd(-0.4, 0.8))});
  const auto f = antihol_frame(cs);
  for (Eigen::Index j = 0; j < 2; ++j) {
    const bool first = f.W.row(j).tail(2).cwiseAbs().maxCoeff() < 1e-12;
    const bool second = f.W.row(j).head(2).cwiseAbs().maxCoeff() < 1e-12;
    EXPECT_TRUE(first != second);
  }
}

TEST(ComplexStruct, InvariantMetric) {
  const auto cs0 = ComplexStructure::standard(2);
  EXPECT_LT((invariant_metric(cs0).G - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-15);
  std::mt19937_64 rng(12);
  for (int k = 0; k < 10; ++k) {
    const auto cs = random_complex_structure(2, rng);
    Eigen::MatrixXd A = Eigen::MatrixXd::Random(4, 4);
    const Eigen::MatrixXd G0 = A * A.transpose() + Eigen::MatrixXd::Identity(4, 4);
    const auto G = invariant_metric(cs, G0).G;
    EXPECT_LT((cs.J().transpose() * G * cs.J() - G).cwiseAbs().maxCoeff(), 1e-9 * G.cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
  }
  EXPECT_THROW(invariant_metric(cs0, -Eigen::MatrixXd::Identity(4, 4)), DomainError);
}
