#pragma once

// Complex structures J on the tangent space g = span(delta_1, ..., delta_2n).
//
// Conventions used throughout the library:
//   * holomorphic directions are the +i eigenspace of J, antiholomorphic the -i eigenspace;
//   * a frame row w (the antiholomorphic vector field sum_k w_k delta_k) satisfies J w^T = -i w^T;
//   * a period matrix Q maps lattice coordinates x to holomorphic coordinates z = Q x and is
//     complex-linear for J, i.e. Q J = i Q.

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace nctorus {

using cd = std::complex<double>;

class ComplexStructure {
 public:
  /// Throws DomainError unless J is 2n x 2n and ||J J + I||_max <= tol.
  explicit ComplexStructure(Eigen::MatrixXd J, double tol = 1e-10);

  /// delta_j -> delta_{n+j}, delta_{n+j} -> -delta_j.
  static ComplexStructure standard(std::size_t n);
  /// Block-diagonal J from 2x2 blocks (each trace 0, determinant 1).
  static ComplexStructure from_blocks(const std::vector<Eigen::Matrix2d>& blocks, double tol = 1e-10);
  /// 2x2 block with period (tau | 1), i.e. lattice basis (tau, 1) in C.
  static Eigen::Matrix2d block_from_tau(cd tau);

  std::size_t n() const { return static_cast<std::size_t>(J_.rows()) / 2; }
  std::size_t dim() const { return static_cast<std::size_t>(J_.rows()); }
  const Eigen::MatrixXd& J() const { return J_; }
  double tol() const { return tol_; }

 private:
  Eigen::MatrixXd J_;
  double tol_;
};

/// Normalized basis of the antiholomorphic tangent space.
struct AntiholFrame {
  Eigen::MatrixXcd W;               ///< n x 2n; row j is dbar_j in the delta basis.
  std::vector<std::size_t> pivots;  ///< W restricted to these columns is the identity.

  std::size_t n() const { return static_cast<std::size_t>(W.rows()); }
  /// Frequency of the monomial U^m along dbar_j: dbar_j U^m = 2 pi i (W m)_j U^m.
  Eigen::VectorXcd symbol(const std::vector<int>& m) const;
};

struct PeriodMatrix {
  Eigen::MatrixXcd Q;  ///< n x 2n
  std::size_t n() const { return static_cast<std::size_t>(Q.rows()); }
};

struct MetricG {
  Eigen::MatrixXd G;
};

AntiholFrame antihol_frame(const ComplexStructure& cs);
PeriodMatrix period_from_j(const ComplexStructure& cs);
/// J = M^{-1} diag(iI, -iI) M with M = [Q; conj(Q)]. Throws ConditioningError for degenerate lattices.
ComplexStructure j_from_period(const PeriodMatrix& pm, double tol = 1e-9);
/// G = (G0 + J^T G0 J) / 2. Throws DomainError if G0 is not symmetric positive definite.
MetricG invariant_metric(const ComplexStructure& cs, const Eigen::MatrixXd& G0);
MetricG invariant_metric(const ComplexStructure& cs);

/// Reciprocal condition number (smallest / largest singular value).
double reciprocal_condition(const Eigen::MatrixXcd& m);

/// Greedy-pivot row reduction used for both frames and period matrices: the rows of `basis`
/// span an n-dimensional subspace; returns n rows whose restriction to the pivot columns is I.
AntiholFrame pivot_normalize(const Eigen::MatrixXcd& basis, std::size_t n);

}  // namespace nctorus
