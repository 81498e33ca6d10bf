#include <gtest/gtest.h>

#include <cmath>

#include "nctorus/errors.hpp"
#include "nctorus/heisenberg1d.hpp"

using namespace nctorus;

TEST(Heisenberg1D, Validation) {
  EXPECT_THROW((StandardModule1D{0, 1, cd(0, 1), 200}.validate()), DomainError);
  EXPECT_THROW((StandardModule1D{1, 0, cd(0, 1), 200}.validate()), DomainError);
  EXPECT_THROW((StandardModule1D{1, 1, cd(1, -1), 200}.validate()), DomainError);
  EXPECT_THROW((StandardModule1D{1, 1, cd(0, 1), 8}.validate()), DomainError);
  EXPECT_NO_THROW((StandardModule1D{-3, 2, cd(0.3, 2), 16}.validate()));
}

TEST(Heisenberg1D, BidiagonalAndAdjoint) {
  for (long q : {1L, -2L}) {
    const StandardModule1D sm{q, 1, cd(0.4, 1.3), 32};
    const auto D = hermite_dbar_matrix(sm);
    const auto Ds = hermite_dbar_adjoint_matrix(sm);
    ASSERT_EQ(D.rows(), 32 * std::abs(q));
    EXPECT_LT((Ds - D.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
    for (Eigen::Index i = 0; i < D.rows(); ++i)
      for (Eigen::Index j = 0; j < D.cols(); ++j)
        if (std::abs(i - j) != 1) EXPECT_EQ(D(i, j), cd(0.0)) << i << "," << j;
  }
}

TEST(Heisenberg1D, LadderGrowth) {
  const StandardModule1D sm{1, 1, cd(0, 1), 64};
  const auto lc = ladder_coefficients(sm);
  const auto D = hermite_dbar_matrix(sm);
  // A e_k = sqrt(k) e_{k-1}, A^* e_k = sqrt(k + 1) e_{k+1}.
  for (Eigen::Index k = 1; k < 63; ++k) {
    EXPECT_NEAR(std::abs(D(k - 1, k) - lc.alpha * std::sqrt(double(k))), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(D(k + 1, k) - lc.beta * std::sqrt(double(k + 1))), 0.0, 1e-12);
  }
  EXPECT_NEAR(lc.s, 2.0 * 3.14159265358979323846, 1e-12);
}

TEST(Heisenberg1D, ExampleCohomology) {
  struct Case {
    long q, h0, h1;
  };
  for (const auto& c : {Case{1, 1, 0}, Case{3, 3, 0}, Case{-2, 0, 2}}) {
    const auto rep = standard_module_cohomology({c.q, 1, cd(0, 1), 200});
    EXPECT_EQ(rep.h0, c.h0) << c.q;
    EXPECT_EQ(rep.h1, c.h1) << c.q;
    EXPECT_EQ(rep.index, c.q);
    EXPECT_TRUE(rep.stable);
    EXPECT_FALSE(rep.inconclusive);
  }
}

TEST(Heisenberg1D, IndexIsDegreeForAllModuli) {
  for (cd tau : {cd(0, 1), cd(1, 1), cd(0.3, 2)})
    for (long q = -4; q <= 4; ++q) {
      if (q == 0) continue;
      const auto rep = standard_module_cohomology({q, 2, tau, 128});
      EXPECT_EQ(rep.index, q) << q << " " << tau;
      EXPECT_TRUE(rep.h0 == 0 || rep.h1 == 0);
    }
}

TEST(Heisenberg1D, K0ClassCarriesRankAndDegree) {
  const StandardModule1D sm{-3, 2, cd(0, 1), 16};
  EXPECT_EQ(chern_top(sm.k0_class()), -3);
  EXPECT_EQ(sm.k0_class().component(0), 2);
}
