#include <gtest/gtest.h>

#include <map>
#include <numbers>

#include "nctorus/dolbeault.hpp"
#include "nctorus/errors.hpp"
#include "oracles.hpp"

using namespace nctorus;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ThetaPtr theta4() {
  Eigen::MatrixXd T(4, 4);
  T << 0, 0.31, -0.17, 0.44, -0.31, 0, 0.23, -0.62, 0.17, -0.23, 0, 0.09, -0.44, 0.62, -0.09, 0;
  return make_theta(ThetaMatrix(T));
}

ComplexStructure generic_cs(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_complex_structure(n, rng);
}

// a_j = dbar_j(phi) with phi supported on the line Z m: flat, gauge equivalent to the trivial connection.
FreeConnection exact_connection(const ThetaPtr& th, const AntiholFrame& frame, const Mode& m, cd amp) {
  FourierElement::Coefficients c;
  Mode m2 = m;
  for (auto& x : m2) x *= 2;
  c[m] = amp;
  c[m2] = 0.5 * amp;
  const FourierElement phi(th, c);
  std::vector<MatrixElement> terms;
  for (std::size_t j = 0; j < frame.n(); ++j) terms.push_back(MatrixElement::scalar(dbar(frame, j, phi)));
  return FreeConnection(1, terms);
}

}  // namespace

TEST(Dolbeault, FlatnessExamples) {
  auto th = theta4();
  const auto cs = generic_cs(2, 1);
  const auto frame = antihol_frame(cs);
  EXPECT_TRUE(flatness_curvature(FreeConnection::trivial(th, 2, 1), frame).is_flat);
  EXPECT_TRUE(flatness_curvature(FreeConnection::scalar_shift(th, 2, {cd(0.3, 1.0), cd(-2.0, 0.1)}), frame).is_flat);

  const auto u1 = FourierElement::generator(th, 0), u3 = FourierElement::generator(th, 2);
  const FreeConnection conn(1, {MatrixElement::scalar(u3), MatrixElement::scalar(u1)});
  const auto curv = flatness_curvature(conn, frame);
  EXPECT_FALSE(curv.is_flat);
  // [U_3, U_1] = (e^{2 pi i Theta_31} - 1) U^{(1,0,1,0)}
  const cd expected = std::polar(1.0, kTwoPi * (*th)(2, 0)) - 1.0;
  EXPECT_LT(std::abs(curv.at(0, 1)(0, 0).coefficient({1, 0, 1, 0}) - expected), 1e-14);
  EXPECT_THROW(cohomology_dims(cs, frame, conn, {3}), NonFlatError);
}

TEST(Dolbeault, FreeTrivialCohomology) {
  for (std::size_t n : {1u, 2u}) {
    auto th = make_theta(ThetaMatrix::zero(n));
    const auto cs = generic_cs(n, 2 + n);
    const auto frame = antihol_frame(cs);
    for (std::size_t r : {1u, 2u}) {
      const auto rep = cohomology_dims(cs, frame, FreeConnection::trivial(th, n, r), {3});
      std::vector<long> expected{static_cast<long>(r), static_cast<long>(n * r)};
      if (n == 2) expected = {static_cast<long>(r), static_cast<long>(2 * r), static_cast<long>(r)};
      EXPECT_EQ(rep.dims, expected);
      EXPECT_TRUE(rep.stable);
      EXPECT_FALSE(rep.inconclusive);
      EXPECT_EQ(rep.index, 0);
      ASSERT_EQ(rep.kernel_support_deg0.size(), 1u);
      EXPECT_EQ(rep.kernel_support_deg0[0], Mode(2 * n, 0));
    }
  }
}

TEST(Dolbeault, ScalarShiftOnAndOffLattice) {
  auto th = theta4();
  const auto cs = generic_cs(2, 5);
  const auto frame = antihol_frame(cs);
  const auto off = cohomology_dims(cs, frame, FreeConnection::scalar_shift(th, 1, {cd(0.37, 0.21), cd(-0.5, 0.9)}), {4});
  EXPECT_EQ(off.dims, (std::vector<long>{0, 0, 0}));
  // c = -2 pi i W m0 puts the kernel on the mode m0.
  const Mode m0{1, 0, -1, 1};
  const Eigen::VectorXcd v = frame.symbol(m0);
  const std::vector<cd> c{-cd(0.0, kTwoPi) * v(0), -cd(0.0, kTwoPi) * v(1)};
  const auto on = cohomology_dims(cs, frame, FreeConnection::scalar_shift(th, 1, c), {4});
  EXPECT_EQ(on.dims, (std::vector<long>{1, 2, 1}));
  ASSERT_EQ(on.kernel_support_deg0.size(), 1u);
  EXPECT_EQ(on.kernel_support_deg0[0], m0);
}

TEST(Dolbeault, ExactConnectionHasFreeCohomology) {
  auto th = make_theta(ThetaMatrix::product_blocks(std::vector<double>{0.29}));
  const auto cs = generic_cs(1, 6);
  const auto frame = antihol_frame(cs);
  const auto conn = exact_connection(th, frame, {1, 1}, 0.3);
  EXPECT_TRUE(flatness_curvature(conn, frame).is_flat);
  const auto rep = cohomology_dims(cs, frame, conn, {8});
  EXPECT_FALSE(rep.fast_path);
  EXPECT_EQ(rep.dims, (std::vector<long>{1, 1}));
  EXPECT_TRUE(rep.stable);
  EXPECT_FALSE(rep.inconclusive);
}

TEST(Dolbeault, IndexVanishesForPerturbations) {
  auto th = theta4();
  const auto cs = generic_cs(2, 7);
  const auto frame = antihol_frame(cs);
  EXPECT_EQ(index(cs, frame, FreeConnection::trivial(th, 2, 2), {3}).index, 0);
  // Non-flat perturbation: the index is still defined and still zero.
  const auto u1 = FourierElement::generator(th, 0), u3 = FourierElement::generator(th, 2);
  const FreeConnection conn(1, {MatrixElement::scalar(0.5 * u3), MatrixElement::scalar(0.5 * u1)});
  const auto rep = index(cs, frame, conn, {2});
  EXPECT_EQ(rep.index, 0);
  EXPECT_TRUE(rep.stable);
}

TEST(Dolbeault, DbarSquaredVanishes) {
  auto th = theta4();
  const auto cs = generic_cs(2, 8);
  const auto frame = antihol_frame(cs);
  const auto conn = FreeConnection::trivial(th, 2, 1);
  const auto d0 = export_dq(cs, frame, conn, {2}, 0);
  const auto d1 = export_dq(cs, frame, conn, {2}, 1);
  ASSERT_EQ(d0.rows, d1.cols);
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d0.rows), static_cast<Eigen::Index>(d0.cols));
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d1.rows), static_cast<Eigen::Index>(d1.cols));
  for (const auto& e : d0.entries) A(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) += cd(e.re, e.im);
  for (const auto& e : d1.entries) B(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) += cd(e.re, e.im);
  EXPECT_LT((B * A).cwiseAbs().maxCoeff(), 1e-10 * std::max(1.0, A.cwiseAbs().maxCoeff() * B.cwiseAbs().maxCoeff()));
}

TEST(Dolbeault, Kunneth) {
  EXPECT_EQ(kunneth_dims({1, 1}, {1, 1}), (std::vector<long>{1, 2, 1}));
  EXPECT_EQ(kunneth_dims({3, 5, 2}, {1}), (std::vector<long>{3, 5, 2}));
  EXPECT_EQ(kunneth_dims({2, 0}, {1, 1}), (std::vector<long>{2, 2, 0}));
}

TEST(Dolbeault, PushforwardSplitting) {
  const double theta = 0.37;
  auto small_th = make_theta(ThetaMatrix::product_blocks(std::vector<double>{theta}));
  Eigen::MatrixXd T(4, 4);
  T << 0, theta, 0.2, -0.1, -theta, 0, 0.05, 0.3, -0.2, -0.05, 0, 0.61, 0.1, -0.3, -0.61, 0;
  auto big_th = make_theta(ThetaMatrix(T));
  const Eigen::Matrix2d J1 = ComplexStructure::block_from_tau(cd(0.2, 1.1));
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(4, 4);
  J.topLeftCorner(2, 2) = J1;
  J.bottomRightCorner(2, 2) = generic_cs(1, 9).J();
  const ComplexStructure big(J);
  const ComplexStructure small(J1);
  const auto big_frame = block_adapted_frame(antihol_frame(big));
  const auto small_frame = antihol_frame(small);

  auto check = [&](const FreeConnection& c, long h0_small) {
    const auto pushed = pushforward_connection(*small_th, c, big, big_frame, big_th);
    EXPECT_TRUE(flatness_curvature(pushed, big_frame).is_flat);
    const auto s = cohomology_dims(small, small_frame, c, {4});
    const auto b = cohomology_dims(big, big_frame, pushed, {4});
    EXPECT_EQ(s.dims[0], h0_small);
    EXPECT_GE(b.dims[0], s.dims[0]);
  };
  check(FreeConnection::trivial(small_th, 1, 1), 1);
  check(FreeConnection::scalar_shift(small_th, 1, {cd(0.3, 0.45)}), 0);
  const Eigen::VectorXcd v = small_frame.symbol({1, -1});
  check(FreeConnection::scalar_shift(small_th, 1, {-cd(0.0, kTwoPi) * v(0)}), 1);

  const ComplexStructure dense = generic_cs(2, 10);
  EXPECT_THROW(pushforward_connection(*small_th, FreeConnection::trivial(small_th, 1, 1), dense, antihol_frame(dense), big_th),
               DomainError);
}
