#pragma once

// Smooth noncommutative torus as finitely supported twisted Fourier series.
//
// An element is a finite sum  sum_m c_m U^m  with U^m = U_1^{m_1} ... U_d^{m_d}
// (ordered monomial). The generators satisfy U_j U_k = e^{2 pi i Theta_jk} U_k U_j.
//
// Reordering: pushing U_k^{n_k} to the left past U_j^{m_j} with j > k costs
// e^{2 pi i Theta_jk m_j n_k}, so
//
//     U^m U^n = e^{2 pi i sigma(m, n)} U^{m+n},   sigma(m, n) = sum_{j>k} Theta_jk m_j n_k.
//
// sigma is bilinear, hence a 2-cocycle, which makes the product associative.
// The adjoint of a unitary monomial is its inverse: (U^m)^* = e^{2 pi i sigma(m, m)} U^{-m}.

#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace nctorus {

using cd = std::complex<double>;

/// Lattice point of Z^d labelling a monomial.
using Mode = std::vector<int>;

/// Coefficients below this magnitude are dropped after arithmetic.
inline constexpr double kPruneThreshold = 1e-15;

/// Real skew-symmetric d x d matrix of commutation phases, d = 2 n_half.
class ThetaMatrix {
 public:
  /// Throws DomainError unless `entries` is square of even size and exactly skew.
  explicit ThetaMatrix(Eigen::MatrixXd entries);

  /// Row-major construction, convenient for literals and the problem file.
  static ThetaMatrix from_row_major(std::size_t d, std::span<const double> values);
  /// Block-diagonal Theta with 2x2 blocks [[0, t], [-t, 0]].
  static ThetaMatrix product_blocks(std::span<const double> thetas);
  static ThetaMatrix zero(std::size_t n_half);

  std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
  std::size_t n_half() const { return dim() / 2; }
  const Eigen::MatrixXd& entries() const { return entries_; }
  double operator()(std::size_t j, std::size_t k) const { return entries_(j, k); }

  ThetaMatrix scaled(double t) const;

  friend bool operator==(const ThetaMatrix& a, const ThetaMatrix& b) {
    return a.entries_.rows() == b.entries_.rows() && a.entries_ == b.entries_;
  }

 private:
  Eigen::MatrixXd entries_;
};

using ThetaPtr = std::shared_ptr<const ThetaMatrix>;

inline ThetaPtr make_theta(ThetaMatrix t) { return std::make_shared<const ThetaMatrix>(std::move(t)); }

/// sigma(m, n) = sum_{j>k} Theta_jk m_j n_k.
double cocycle(const ThetaMatrix& theta, const Mode& m, const Mode& n);

/// e^{2 pi i sigma(m, n)}, with sigma reduced mod 1 before exponentiating.
cd cocycle_phase(const ThetaMatrix& theta, const Mode& m, const Mode& n);

/// e^{2 pi i x} with x reduced mod 1 first.
cd unit_phase(double x);

/// Element of the smooth algebra with finite support. Immutable value type.
class FourierElement {
 public:
  using Coefficients = std::map<Mode, cd>;

  explicit FourierElement(ThetaPtr theta);
  /// Coefficients with magnitude below kPruneThreshold are discarded.
  FourierElement(ThetaPtr theta, Coefficients coeffs);

  static FourierElement scalar(ThetaPtr theta, cd value);
  static FourierElement monomial(ThetaPtr theta, Mode m, cd value = 1.0);
  /// The generator U_j (0-based j).
  static FourierElement generator(ThetaPtr theta, std::size_t j);

  const ThetaMatrix& theta() const { return *theta_; }
  const ThetaPtr& theta_ptr() const { return theta_; }
  const Coefficients& coeffs() const { return coeffs_; }
  std::size_t dim() const { return theta_->dim(); }

  cd coefficient(const Mode& m) const;
  bool is_zero() const { return coeffs_.empty(); }
  /// True when the only mode present is the origin.
  bool is_scalar() const;
  double max_abs() const;

  bool same_context(const FourierElement& other) const;

  friend FourierElement operator+(const FourierElement& a, const FourierElement& b);
  friend FourierElement operator-(const FourierElement& a, const FourierElement& b);
  friend FourierElement operator*(cd s, const FourierElement& a);
  /// Twisted product; same as multiply().
  friend FourierElement operator*(const FourierElement& a, const FourierElement& b);

 private:
  ThetaPtr theta_;
  Coefficients coeffs_;
};

FourierElement multiply(const FourierElement& a, const FourierElement& b);
FourierElement star(const FourierElement& a);
/// Canonical tracial state: the coefficient of U^0.
cd trace(const FourierElement& a);
/// delta_j: c_m -> 2 pi i m_j c_m (0-based j).
FourierElement derivation(std::size_t j, const FourierElement& a);
/// Gauge torus action c_m -> (prod_j t_j^{m_j}) c_m. Requires |t_j| = 1 within 1e-12.
FourierElement gauge_act(std::span<const cd> t, const FourierElement& a);
/// Trace inner product <a, b> = trace(star(b) a).
cd inner(const FourierElement& a, const FourierElement& b);

/// Max |coefficient difference|, the test-facing distance.
double distance(const FourierElement& a, const FourierElement& b);

/// r x r matrix over the algebra; acts on column vectors of the free module from the left.
class MatrixElement {
 public:
  MatrixElement(ThetaPtr theta, std::size_t rank);
  MatrixElement(std::size_t rank, std::vector<FourierElement> entries);

  static MatrixElement zero(ThetaPtr theta, std::size_t rank) { return MatrixElement(std::move(theta), rank); }
  static MatrixElement identity(ThetaPtr theta, std::size_t rank, cd scale = 1.0);
  static MatrixElement scalar(const FourierElement& x) { return MatrixElement(1, {x}); }

  std::size_t rank() const { return rank_; }
  const ThetaPtr& theta_ptr() const { return theta_; }
  const FourierElement& operator()(std::size_t i, std::size_t j) const { return entries_[i * rank_ + j]; }
  const std::vector<FourierElement>& entries() const { return entries_; }

  bool is_zero() const;
  double max_abs() const;

  friend MatrixElement operator+(const MatrixElement& a, const MatrixElement& b);
  friend MatrixElement operator-(const MatrixElement& a, const MatrixElement& b);
  friend MatrixElement operator*(const MatrixElement& a, const MatrixElement& b);

 private:
  ThetaPtr theta_;
  std::size_t rank_;
  std::vector<FourierElement> entries_;
};

MatrixElement commutator(const MatrixElement& a, const MatrixElement& b);
/// Applies a derivation-like map entrywise.
MatrixElement map_entries(const MatrixElement& a, const std::function<FourierElement(const FourierElement&)>& f);

}  // namespace nctorus
