#pragma once

// Riemann forms on complex tori C^n / Q Z^{2n}.
//
// E is an integer alternating form on the lattice; it is compatible with J when J^T E J = E and
// then H(v, w) = E(Jv, w) + i E(v, w) is hermitian and complex-linear in v. In holomorphic
// coordinates z = Q x, a lattice vector is x(z) = 2 Re(A z) with A the first n columns of
// [Q; conj(Q)]^{-1}, so H_kl = E(J a_k, a_l) + i E(a_k, a_l) with a_k = x(e_k).

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nctorus/algebra.hpp"
#include "nctorus/complex_structure.hpp"
#include "nctorus/heisenberg1d.hpp"
#include "nctorus/lattice.hpp"

namespace nctorus {

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

struct IntegerSkewForm {
  IntMatrix E;

  /// Throws DomainError unless E is square, even-sized and exactly alternating.
  explicit IntegerSkewForm(IntMatrix e);
  /// d_j at (j, j + n) and -d_j at (j + n, j).
  static IntegerSkewForm canonical(const std::vector<std::int64_t>& divisors);
  /// [[0, 1], [-1, 0]] on each consecutive coordinate pair.
  static IntegerSkewForm block_standard(std::size_t n);

  std::size_t n() const { return static_cast<std::size_t>(E.rows()) / 2; }
  bool nondegenerate() const;
  friend bool operator==(const IntegerSkewForm& a, const IntegerSkewForm& b) { return a.E == b.E; }
};

struct HermitianFormReport {
  Eigen::MatrixXcd H;
  Eigen::VectorXd eigenvalues;
  double margin = 0.0;  ///< 1e-9 * sum |eigenvalue|
  bool positive_definite = false;
  bool borderline = false;  ///< some eigenvalue within the margin of zero
};

/// max |J^T E J - E|.
double compatibility_residual(const IntegerSkewForm& form, const ComplexStructure& cs);
/// Throws DomainError if the residual exceeds 1e-8 (1 + max |E|).
HermitianFormReport hermitian_from_form(const IntegerSkewForm& form, const ComplexStructure& cs);

/// Period matrix with exact Gaussian-rational entries (n x 2n).
struct ExactPeriod {
  DenseMatrix<GaussRational> Q;
  std::size_t n() const { return Q.size(); }
  PeriodMatrix to_float() const;
};

/// J = M^{-1} diag(iI, -iI) M computed exactly; throws DomainError if the result is not real.
DenseMatrix<Rational> exact_j_from_period(const ExactPeriod& pm);

struct RiemannSearchOptions {
  int bound = 6;
  bool exact = false;
  std::optional<ExactPeriod> exact_period;  ///< required for the exact path
  std::size_t max_candidates = 2000000;
};

enum class Verdict { found, none_within_bound, inconclusive };
const char* verdict_name(Verdict v);

struct RiemannSearchResult {
  Verdict verdict = Verdict::none_within_bound;
  int bound = 0;
  bool exact_path = false;
  std::size_t unknowns = 0;
  std::size_t real_kernel_dim = 0;  ///< dimension of the real compatible forms
  std::size_t kernel_dim = 0;       ///< rank of the integer compatible forms found
  std::vector<IntMatrix> kernel_basis;
  std::optional<IntegerSkewForm> form;
  std::optional<HermitianFormReport> hermitian;
  std::size_t candidates_tested = 0;
  std::size_t borderline_candidates = 0;
  std::string diagnostics;
};

RiemannSearchResult riemann_form_search(const ComplexStructure& cs, const RiemannSearchOptions& opts);

struct FrobeniusBasis {
  IntMatrix U;  ///< columns nu_1..nu_2n
  std::vector<std::int64_t> divisors;
};

/// Throws DomainError for degenerate E and OverflowError if int64 would overflow.
FrobeniusBasis frobenius_basis(const IntegerSkewForm& form);
/// True when U is unimodular, U^T E U is canonical with the divisors, and d_1 | d_2 | ... .
bool verify_frobenius(const IntegerSkewForm& form, const FrobeniusBasis& basis);

struct DecomposedPiece {
  IntegerSkewForm S;
  bool decomposable = false;  ///< S ^ S = 0
  bool compatible = false;    ///< J^T S J = S
  std::optional<HermitianFormReport> hermitian;  ///< only for compatible pieces
};

struct Decomposition {
  std::vector<DecomposedPiece> pieces;
  bool sum_exact = false;
  bool all_compatible = false;
};

/// S_j = U^{-T} S'_j U^{-1} where S'_j keeps only the (nu_j, nu_{j+n}) block of the canonical form.
/// Throws DomainError unless E is compatible with H positive definite.
Decomposition decompose_riemann_form(const IntegerSkewForm& form, const FrobeniusBasis& basis,
                                     const ComplexStructure& cs);

struct SiegelResult {
  Eigen::MatrixXcd Omega;
  Eigen::MatrixXcd Z;  ///< D Omega when divisors are supplied, else Omega
  double asymmetry = 0.0;
  double min_imag_eigenvalue = 0.0;
  bool symmetric = false;
  bool positive = false;
};

/// Omega = block2^{-1} block1 with block2 the columns in `split` and block1 the rest in order.
SiegelResult siegel_normalize(const PeriodMatrix& pm, const std::vector<std::size_t>& split,
                              const std::vector<std::int64_t>& divisors = {});

/// Columns (1, 0), (tau', 0), (0, 1), (w, tau).
PeriodMatrix split_torus_example(cd tau, cd tau_prime, cd w);
/// The same lattice with exact entries.
ExactPeriod split_torus_exact(const GaussRational& tau, const GaussRational& tau_prime, const GaussRational& w);

struct BlockStructure {
  bool product_type = false;
  bool splitting = false;
  std::optional<double> theta12;
};

BlockStructure detect_block_structure(const ThetaMatrix& theta, const ComplexStructure& cs, double tol = 1e-10);

struct NCRiemannBound {
  long bound = 0;  ///< dim H^0 of the degree k d_1 standard module
  long degree = 0;
  cd tau;
  std::vector<std::int64_t> divisors;  ///< of k E
  double theta_small = 0.0;           ///< Theta_12 in the reordered Frobenius basis
  Standard1DReport module;
};

/// Lower bound on dim H^0 of a holomorphic bundle pushed forward from the first symplectic plane
/// of the Frobenius basis of k E. Requires that plane to split off J.
NCRiemannBound ncriemann_h0_bound(const ThetaMatrix& theta, const ComplexStructure& cs, const IntegerSkewForm& form,
                                  long k, int M = 200);

}  // namespace nctorus
