#include "nctorus/complex_structure.hpp"

#include <algorithm>
#include <cmath>

#include "nctorus/errors.hpp"

namespace nctorus {

namespace {

constexpr double kMinRcond = 1e-12;
constexpr cd kI{0.0, 1.0};

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

ComplexStructure::ComplexStructure(Eigen::MatrixXd J, double tol) : J_(std::move(J)), tol_(tol) {
  if (J_.rows() != J_.cols() || J_.rows() == 0 || J_.rows() % 2 != 0)
    throw DomainError("J must be a square matrix of even size");
  if (!J_.allFinite()) throw DomainError("J has non-finite entries");
  const Eigen::MatrixXd r = J_ * J_ + Eigen::MatrixXd::Identity(J_.rows(), J_.cols());
  if (max_abs(r) > tol_) throw DomainError("J*J + I exceeds tolerance; not a complex structure");
}

ComplexStructure ComplexStructure::standard(std::size_t n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    J(n + j, j) = 1.0;
    J(j, n + j) = -1.0;
  }
  return ComplexStructure(std::move(J));
}

ComplexStructure ComplexStructure::from_blocks(const std::vector<Eigen::Matrix2d>& blocks, double tol) {
  const auto n = blocks.size();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (std::size_t b = 0; b < n; ++b) J.block<2, 2>(2 * b, 2 * b) = blocks[b];
  return ComplexStructure(std::move(J), tol);
}

Eigen::Matrix2d ComplexStructure::block_from_tau(cd tau) {
  if (tau.imag() <= 0.0) throw DomainError("tau must lie in the upper half-plane");
  // Q = (tau, 1), Q J = i Q.
  Eigen::MatrixXcd Q(1, 2);
  Q << tau, 1.0;
  return j_from_period(PeriodMatrix{Q}).J();
}

Eigen::VectorXcd AntiholFrame::symbol(const std::vector<int>& m) const {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(W.rows());
  for (Eigen::Index k = 0; k < W.cols(); ++k) {
    if (m[k] != 0) out += W.col(k) * static_cast<double>(m[k]);
  }
  return out;
}

double reciprocal_condition(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0.0;
  return s(s.size() - 1) / s(0);
}

AntiholFrame pivot_normalize(const Eigen::MatrixXcd& basis, std::size_t n) {
  Eigen::MatrixXcd B = basis;
  const auto rows = static_cast<std::size_t>(B.rows());
  const auto cols = static_cast<std::size_t>(B.cols());
  std::vector<bool> used(cols, false);
  std::vector<std::size_t> pivots;
  const double scale = std::max(B.cwiseAbs().maxCoeff(), 1e-300);
  for (std::size_t s = 0; s < n; ++s) {
    // Column with the largest residual norm over the not-yet-reduced rows; ties go to the lowest index.
    std::size_t best_col = cols;
    double best_norm = -1.0;
    for (std::size_t c = 0; c < cols; ++c) {
      if (used[c]) continue;
      const double nrm = B.col(c).tail(rows - s).norm();
      if (nrm > best_norm) {
        best_norm = nrm;
        best_col = c;
      }
    }
    if (best_col == cols || best_norm <= kMinRcond * scale)
      throw ConditioningError("eigenspace is numerically rank deficient");
    Eigen::Index best_row = static_cast<Eigen::Index>(s);
    double best_abs = -1.0;
    for (std::size_t r = s; r < rows; ++r) {
      const double a = std::abs(B(r, best_col));
      if (a > best_abs) {
        best_abs = a;
        best_row = static_cast<Eigen::Index>(r);
      }
    }
    B.row(s).swap(B.row(best_row));
    B.row(s) /= B(s, best_col);
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == s) continue;
      const cd f = B(r, best_col);
      if (f != cd{}) B.row(r) -= f * B.row(s);
    }
    used[best_col] = true;
    pivots.push_back(best_col);
  }
  AntiholFrame out{B.topRows(n), pivots};
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) out.W(j, pivots[k]) = (j == k) ? cd{1.0} : cd{};
  }
  return out;
}

AntiholFrame antihol_frame(const ComplexStructure& cs) {
  const auto d = cs.dim();
  // (I + iJ)/2 projects onto the -i eigenspace; its columns span it.
  const Eigen::MatrixXcd P =
      (Eigen::MatrixXcd::Identity(d, d) + kI * cs.J().cast<cd>()) * 0.5;
  AntiholFrame frame = pivot_normalize(P.transpose(), cs.n());
  Eigen::MatrixXcd stacked(d, d);
  stacked << frame.W, frame.W.conjugate();
  if (reciprocal_condition(stacked) < kMinRcond) throw ConditioningError("antiholomorphic frame is ill-conditioned");
  return frame;
}

PeriodMatrix period_from_j(const ComplexStructure& cs) {
  const auto d = cs.dim();
  // Rows of (I - iJ)/2 are left eigenvectors with q J = i q.
  const Eigen::MatrixXcd P =
      (Eigen::MatrixXcd::Identity(d, d) - kI * cs.J().cast<cd>()) * 0.5;
  const AntiholFrame f = pivot_normalize(P, cs.n());
  Eigen::MatrixXcd stacked(d, d);
  stacked << f.W, f.W.conjugate();
  if (reciprocal_condition(stacked) < kMinRcond) throw ConditioningError("period matrix is ill-conditioned");
  return PeriodMatrix{f.W};
}

ComplexStructure j_from_period(const PeriodMatrix& pm, double tol) {
  const auto n = pm.n();
  if (static_cast<std::size_t>(pm.Q.cols()) != 2 * n) throw DomainError("period matrix must be n x 2n");
  Eigen::MatrixXcd M(2 * n, 2 * n);
  M << pm.Q, pm.Q.conjugate();
  if (reciprocal_condition(M) < kMinRcond) throw ConditioningError("degenerate lattice: [Q; conj Q] is singular");
  Eigen::VectorXcd diag(2 * n);
  diag.head(n).setConstant(kI);
  diag.tail(n).setConstant(-kI);
  const Eigen::MatrixXcd Jc = M.partialPivLu().solve(diag.asDiagonal() * M);
  if (Jc.imag().cwiseAbs().maxCoeff() > tol) throw ConditioningError("recovered J is not real");
  return ComplexStructure(Jc.real(), tol);
}

MetricG invariant_metric(const ComplexStructure& cs, const Eigen::MatrixXd& G0) {
  const auto d = static_cast<Eigen::Index>(cs.dim());
  if (G0.rows() != d || G0.cols() != d) throw DomainError("G0 has wrong size");
  if ((G0 - G0.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, G0.cwiseAbs().maxCoeff()))
    throw DomainError("G0 is not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(G0);
  if (llt.info() != Eigen::Success) throw DomainError("G0 is not positive definite");
  const Eigen::MatrixXd& J = cs.J();
  Eigen::MatrixXd G = 0.5 * (G0 + J.transpose() * G0 * J);
  G = 0.5 * (G + G.transpose()).eval();
  return MetricG{G};
}

MetricG invariant_metric(const ComplexStructure& cs) {
  return invariant_metric(cs, Eigen::MatrixXd::Identity(cs.dim(), cs.dim()));
}

}  // namespace nctorus
