#include "nctorus/heisenberg1d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nctorus/errors.hpp"
#include "nctorus/spectral.hpp"

namespace nctorus {

namespace {

// alpha A + beta A^* on rows [0, rows) x cols [0, cols) of one copy.
Eigen::MatrixXcd ladder(cd alpha, cd beta, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(rows, cols);
  for (Eigen::Index k = 0; k < cols; ++k) {
    if (k >= 1 && k - 1 < rows) m(k - 1, k) += alpha * std::sqrt(static_cast<double>(k));
    if (k + 1 < rows) m(k + 1, k) += beta * std::sqrt(static_cast<double>(k + 1));
  }
  return m;
}

Eigen::MatrixXcd block_copies(const Eigen::MatrixXcd& one, long copies) {
  const auto n = one.rows();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n * copies, n * copies);
  for (long c = 0; c < copies; ++c) out.block(c * n, c * n, n, n) = one;
  return out;
}

struct CopyCount {
  KernelSummary dbar, adj;
};

CopyCount count_one_copy(const StandardModule1D& sm, double tol_rel) {
  CopyCount out;
  for (int which = 0; which < 2; ++which) {
    const Eigen::MatrixXcd m = hermite_exact_image_matrix(sm, which == 1);
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
    SpectrumAccumulator acc(static_cast<std::size_t>(m.cols()) + 1);
    const auto& sv = svd.singularValues();
    for (Eigen::Index i = 0; i < sv.size(); ++i) acc.add(sv(i));
    (which == 0 ? out.dbar : out.adj) = acc.summarize(tol_rel);
  }
  return out;
}

}  // namespace

void StandardModule1D::validate() const {
  if (q == 0) throw DomainError("standard module degree q must be nonzero");
  if (p < 1) throw DomainError("standard module rank p must be positive");
  if (!(tau.imag() > 0.0)) throw DomainError("tau must lie in the upper half-plane");
  if (M < 16) throw DomainError("Hermite truncation M must be at least 16");
}

LadderCoefficients ladder_coefficients(const StandardModule1D& sm) {
  sm.validate();
  LadderCoefficients lc;
  lc.s = 2.0 * std::numbers::pi * sm.tau.imag();
  const double sgn = sm.q > 0 ? 1.0 : -1.0;
  const cd c = cd(0.0, -2.0 * std::numbers::pi) * sm.tau * sgn;
  const double norm = std::sqrt(2.0 * lc.s);
  lc.alpha = (lc.s + c) / norm;
  lc.beta = (c - lc.s) / norm;
  return lc;
}

Eigen::MatrixXcd hermite_dbar_matrix(const StandardModule1D& sm) {
  const auto lc = ladder_coefficients(sm);
  return block_copies(ladder(lc.alpha, lc.beta, sm.M, sm.M), std::abs(sm.q));
}

Eigen::MatrixXcd hermite_dbar_adjoint_matrix(const StandardModule1D& sm) {
  const auto lc = ladder_coefficients(sm);
  // (alpha A + beta A^*)^* = conj(beta) A + conj(alpha) A^*
  return block_copies(ladder(std::conj(lc.beta), std::conj(lc.alpha), sm.M, sm.M), std::abs(sm.q));
}

Eigen::MatrixXcd hermite_exact_image_matrix(const StandardModule1D& sm, bool adjoint) {
  const auto lc = ladder_coefficients(sm);
  if (adjoint) return ladder(std::conj(lc.beta), std::conj(lc.alpha), sm.M + 1, sm.M);
  return ladder(lc.alpha, lc.beta, sm.M + 1, sm.M);
}

Standard1DReport standard_module_cohomology(const StandardModule1D& sm, double tol_rel) {
  sm.validate();
  const long copies = std::abs(sm.q);
  auto doubled = sm;
  doubled.M = 2 * sm.M;
  const auto a = count_one_copy(sm, tol_rel);
  const auto b = count_one_copy(doubled, tol_rel);
  Standard1DReport rep;
  rep.h0 = copies * static_cast<long>(a.dbar.count);
  rep.h1 = copies * static_cast<long>(a.adj.count);
  rep.index = rep.h0 - rep.h1;
  rep.h0_double = copies * static_cast<long>(b.dbar.count);
  rep.h1_double = copies * static_cast<long>(b.adj.count);
  rep.sigma_kept = std::min(a.dbar.smallest_kept, a.adj.smallest_kept);
  rep.sigma_cut = std::max(a.dbar.largest_cut, a.adj.largest_cut);
  rep.stable = rep.h0 == rep.h0_double && rep.h1 == rep.h1_double;
  rep.inconclusive = a.dbar.inconclusive || a.adj.inconclusive || b.dbar.inconclusive || b.adj.inconclusive;
  return rep;
}

}  // namespace nctorus
