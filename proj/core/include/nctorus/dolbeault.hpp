#pragma once

// Truncated Dolbeault complexes of free modules E = A^r over the noncommutative torus.
//
// dbar_j acts on U^m by 2 pi i (W m)_j, and the connection is nabla_j = dbar_j + a_j with a_j an
// r x r matrix over the algebra acting on column vectors from the left. Forms are
// sum_I f_I dzbar_I with I increasing; dzbar_j ^ dzbar_I picks up (-1)^{#{i in I : i < j}}.
//
// The Hilbert structure is the trace inner product on coefficients (monomials are orthonormal)
// tensored with the form metric induced by a J-invariant metric G on the tangent space.
// Multiplication operators are compressed to the box |m|_inf <= N; entries leaving it are dropped.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nctorus/algebra.hpp"
#include "nctorus/complex_structure.hpp"
#include "nctorus/spectral.hpp"

namespace nctorus {

/// Zero-order part of a holomorphic structure on the free module of rank r.
class FreeConnection {
 public:
  /// Throws ContextError / DomainError unless all terms share one context and rank.
  FreeConnection(std::size_t rank, std::vector<MatrixElement> terms);

  static FreeConnection trivial(ThetaPtr theta, std::size_t n, std::size_t rank);
  /// a_j = c_j * identity.
  static FreeConnection scalar_shift(ThetaPtr theta, std::size_t rank, const std::vector<cd>& c);

  std::size_t rank() const { return rank_; }
  std::size_t n() const { return terms_.size(); }
  const ThetaPtr& theta_ptr() const { return theta_; }
  const std::vector<MatrixElement>& terms() const { return terms_; }
  const MatrixElement& term(std::size_t j) const { return terms_[j]; }

  /// Every entry of every term is supported at the origin.
  bool constant_coefficients() const;
  /// Every term is a constant multiple of the identity.
  bool scalar_constant() const;
  /// The c_j of a scalar-constant connection.
  std::vector<cd> scalar_values() const;
  /// Union of the supports of all entries, origin excluded, sorted.
  std::vector<Mode> nonconstant_support() const;

 private:
  std::size_t rank_;
  ThetaPtr theta_;
  std::vector<MatrixElement> terms_;
};

struct TruncationBox {
  int N = 8;
};

/// Default box size used when the caller does not choose one.
int default_truncation(std::size_t n);

/// dbar_j of an algebra element: c_m -> 2 pi i (W m)_j c_m (0-based j).
FourierElement dbar(const AntiholFrame& frame, std::size_t j, const FourierElement& a);

struct Curvature {
  std::size_t n = 0;
  std::vector<MatrixElement> F;  ///< row-major n x n, F_jk = dbar_j a_k - dbar_k a_j + [a_j, a_k]
  double max_abs = 0.0;
  bool is_flat = true;
  const MatrixElement& at(std::size_t j, std::size_t k) const { return F[j * n + k]; }
};

inline constexpr double kFlatTolerance = 1e-10;

Curvature flatness_curvature(const FreeConnection& conn, const AntiholFrame& frame);

struct DegreeSpectrum {
  std::size_t kernel = 0;
  double threshold = 0.0;
  double largest = 0.0;
  double sigma_kept = 0.0;
  double sigma_cut = 0.0;
  bool inconclusive = false;
};

struct SpectralReport {
  int N = 0;
  double tol_rel = 0.0;
  std::vector<long> dims;       ///< at N
  std::vector<long> dims_next;  ///< at N + 2
  long index = 0;               ///< sum (-1)^q dims[q]
  double sigma_kept = 0.0;      ///< smallest retained value over all degrees
  double sigma_cut = 0.0;       ///< largest discarded value over all degrees
  bool stable = false;
  bool inconclusive = false;
  std::vector<DegreeSpectrum> degrees;  ///< per-degree detail at N
  std::vector<Mode> kernel_support_deg0;  ///< modes carrying degree-0 kernel at N
  bool fast_path = false;
};

struct IndexReport {
  int N = 0;
  double tol_rel = 0.0;
  long index = 0;
  long index_next = 0;
  long ker_even = 0;
  long ker_odd = 0;
  double sigma_kept = 0.0;
  double sigma_cut = 0.0;
  bool stable = false;
  bool inconclusive = false;
  bool fast_path = false;
};

inline constexpr double kDefaultTolRel = 1e-8;

/// Largest dense block (rows) the general path will diagonalize.
inline constexpr std::size_t kMaxDenseBlock = 6000;

/// Kernel dimensions of the per-degree Laplacians at N and N + 2. Throws NonFlatError when the
/// curvature does not vanish.
SpectralReport cohomology_dims(const ComplexStructure& cs, const AntiholFrame& frame, const FreeConnection& conn,
                               TruncationBox box, double tol_rel = kDefaultTolRel);

/// Index of nabla + nabla^* from even to odd forms at N and N + 2. Flatness is not required.
IndexReport index(const ComplexStructure& cs, const AntiholFrame& frame, const FreeConnection& conn,
                  TruncationBox box, double tol_rel = kDefaultTolRel);

/// Graded convolution out[q] = sum_k a[k] b[q - k].
std::vector<long> kunneth_dims(const std::vector<long>& a, const std::vector<long>& b);

/// Reorders frame rows so the row supported on coordinates {0, 1} comes first. Throws DomainError
/// if no such row exists.
AntiholFrame block_adapted_frame(const AntiholFrame& frame);

/// (m_1, m_2) -> (m_1, m_2, 0, ..., 0) applied to every coefficient.
FourierElement embed_element(const FourierElement& a, const ThetaPtr& big);

/// Connection on A_Theta induced along u_j -> U_j: term 1 is the image of the small term, the
/// others vanish. Requires Theta_12 = theta, J block-diagonal with a 2x2 leading block, and a
/// frame whose first row matches the small frame on {0, 1} and whose other rows vanish there.
FreeConnection pushforward_connection(const ThetaMatrix& theta_small, const FreeConnection& conn_small,
                                      const ComplexStructure& big_cs, const AntiholFrame& big_frame,
                                      const ThetaPtr& big_theta);

struct CooEntry {
  std::size_t row = 0;
  std::size_t col = 0;
  double re = 0.0;
  double im = 0.0;
};

struct CooMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<CooEntry> entries;
};

/// d_q in orthonormal coordinates on the whole box. Basis order: (mode index in the box, fiber
/// index, increasing multi-index), with the box enumerated lexicographically from (-N, ..., -N).
CooMatrix export_dq(const ComplexStructure& cs, const AntiholFrame& frame, const FreeConnection& conn,
                    TruncationBox box, std::size_t q);

/// Increasing subsets of {0..n-1} of size q as bitmasks, in lexicographic order of their elements.
std::vector<std::uint32_t> subsets_of_size(std::size_t n, std::size_t q);

}  // namespace nctorus
