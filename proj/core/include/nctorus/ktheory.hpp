#pragma once

// K_0 classes as vectors in the even exterior algebra of Z^{2n}, and the two curvature
// evaluations that decide flatness of constant curvature connections on n = 2 tori.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "nctorus/algebra.hpp"
#include "nctorus/complex_structure.hpp"

namespace nctorus {

/// Components indexed by subsets of {1..2n}, encoded as bitmasks (bit k-1 for index k).
class K0Class {
 public:
  explicit K0Class(std::size_t n) : n_(n) {}
  K0Class(std::size_t n, std::map<std::uint32_t, long> comps);

  /// Class of the free module of rank r.
  static K0Class free(std::size_t n, long rank);
  /// n = 1 class with rank p and degree q.
  static K0Class standard_1d(long p, long q);

  std::size_t n() const { return n_; }
  const std::map<std::uint32_t, long>& comps() const { return comps_; }
  long component(std::uint32_t subset) const;

  friend K0Class operator+(const K0Class& a, const K0Class& b);
  friend bool operator==(const K0Class& a, const K0Class& b) = default;

 private:
  std::size_t n_;
  std::map<std::uint32_t, long> comps_;
};

/// Component in the top exterior power (0 if absent).
long chern_top(const K0Class& k);

/// mu = alpha ^ beta on the lattice.
struct Decomposable2Form {
  Eigen::Vector4i alpha;
  Eigen::Vector4i beta;
};

/// Plucker coordinates p_{ab} = w1_a w2_b - w1_b w2_a of the wedge of the two frame rows.
Eigen::Matrix4cd frame_bivector(const AntiholFrame& frame);

/// mu(dbar_1 ^ dbar_2) = (alpha . w1)(beta . w2) - (alpha . w2)(beta . w1).
cd curvature_functional(const AntiholFrame& frame, const Decomposable2Form& mu);
/// Determinant pairing of dbar_1 ^ dbar_2 ^ Theta, with Theta = sum_{a<b} Theta_ab e_a ^ e_b.
cd curvature_functional_top(const AntiholFrame& frame, const ThetaMatrix& theta);

struct VanishingPair {
  Eigen::Vector4i alpha;
  Eigen::Vector4i beta;
  double value = 0.0;  ///< |mu(dbar_1 ^ dbar_2)|
};

struct NonalgCertificate {
  int bound = 0;
  double tol = 0.0;
  std::vector<VanishingPair> vanishing_pairs;
  cd top_value = 0.0;
  bool top_nonzero = false;
  bool certified = false;
};

/// Default vanishing tolerance 1e-9 (1 + ||W||_max)^2.
double nonalg_tolerance(const AntiholFrame& frame);

/// Searches primitive integer 2-forms alpha ^ beta with |alpha|, |beta| <= B (sup norm) on which the
/// height-one functional vanishes, deduplicated by primitive Plucker vector; tol <= 0 selects the default.
NonalgCertificate nonalg_certificate(const ComplexStructure& cs, const ThetaMatrix& theta, int bound = 5,
                                     double tol = 0.0);

/// Deterministic seeding shared by the scans.
std::uint64_t splitmix64(std::uint64_t x);

/// S J0 S^{-1} for a Gaussian S drawn from rng (redrawn until well conditioned).
ComplexStructure random_complex_structure(std::size_t n, std::mt19937_64& rng);
/// Skew matrix with upper entries uniform in [-1, 1].
ThetaMatrix random_theta(std::size_t n, std::mt19937_64& rng);
/// Uniform double in [0, 1) from 53 random bits.
double uniform01(std::mt19937_64& rng);
/// Standard normal via Box-Muller.
double gaussian(std::mt19937_64& rng);

}  // namespace nctorus
