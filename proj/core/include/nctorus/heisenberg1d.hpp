#pragma once

// Standard holomorphic modules over a noncommutative elliptic curve, realized on |q| copies of
// L^2(R) with dbar acting per copy as
//
//     D = d/dx + c x,   c = -2 pi i tau sgn(q).
//
// In the oscillator basis of width s = 2 pi Im(tau) (x = (A + A^*) / sqrt(2s),
// d/dx = sqrt(s/2) (A - A^*)):
//
//     D = alpha A + beta A^*,   alpha = (s + c) / sqrt(2s),   beta = (c - s) / sqrt(2s).
//
// For q > 0 the kernel is the Gaussian e^{-c x^2 / 2} (Re c = s > 0) and D^* = -d/dx + conj(c) x is
// injective; for q < 0 the roles swap. |beta / alpha| = |Re tau| / sqrt(4 Im(tau)^2 + Re(tau)^2) < 1.

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

#include "nctorus/ktheory.hpp"

namespace nctorus {

struct StandardModule1D {
  long q = 1;        ///< degree
  long p = 1;        ///< rank (only enters the K0 class)
  cd tau{0.0, 1.0};  ///< modulus of J
  int M = 200;       ///< Hermite functions per copy

  /// Throws DomainError unless q != 0, p >= 1, Im tau > 0 and M >= 16.
  void validate() const;
  K0Class k0_class() const { return K0Class::standard_1d(p, q); }
};

struct LadderCoefficients {
  cd alpha;
  cd beta;
  double s = 0.0;
};

LadderCoefficients ladder_coefficients(const StandardModule1D& sm);

/// Square compression of dbar to the first M Hermite functions of each copy (M|q| x M|q|).
Eigen::MatrixXcd hermite_dbar_matrix(const StandardModule1D& sm);
/// Compression of dbar^* assembled from its own ladder form conj(alpha) A^* + conj(beta) A.
Eigen::MatrixXcd hermite_dbar_adjoint_matrix(const StandardModule1D& sm);
/// One copy of dbar (or its adjoint) from the first M Hermite functions into the first M + 1. The
/// image is exact, so its kernel is an honest kernel rather than a truncation artifact.
Eigen::MatrixXcd hermite_exact_image_matrix(const StandardModule1D& sm, bool adjoint);

struct Standard1DReport {
  long h0 = 0;
  long h1 = 0;
  long index = 0;
  long h0_double = 0;  ///< at 2M
  long h1_double = 0;
  double sigma_kept = 0.0;
  double sigma_cut = 0.0;
  bool stable = false;
  bool inconclusive = false;
};

Standard1DReport standard_module_cohomology(const StandardModule1D& sm, double tol_rel = 1e-8);

}  // namespace nctorus
