#pragma once

// Independent reference implementations used only by the tests.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "nctorus/algebra.hpp"
#include "nctorus/complex_structure.hpp"
#include "nctorus/ktheory.hpp"

namespace nctorus::testing {

// q x q clock and shift: U1 -> C = diag(w^k), U2 -> S (e_k -> e_{k+1}), with w = e^{2 pi i p/q}.
// Then C S = w S C, which is U1 U2 = e^{2 pi i theta} U2 U1.
inline Eigen::MatrixXcd clock(int p, int q) {
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(q, q);
  for (int k = 0; k < q; ++k) C(k, k) = std::polar(1.0, 2.0 * std::numbers::pi * p * k / q);
  return C;
}

inline Eigen::MatrixXcd shift(int q) {
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(q, q);
  for (int k = 0; k < q; ++k) S((k + 1) % q, k) = 1.0;
  return S;
}

inline Eigen::MatrixXcd matrix_power(const Eigen::MatrixXcd& A, int e) {
  const auto n = A.rows();
  Eigen::MatrixXcd base = e >= 0 ? A : A.inverse();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(n, n);
  for (int k = 0; k < std::abs(e); ++k) out = out * base;
  return out;
}

// Image of sum c_m U1^{m1} U2^{m2}.
inline Eigen::MatrixXcd clock_shift_rep(const FourierElement& a, int p, int q) {
  const auto C = clock(p, q), S = shift(q);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(q, q);
  for (const auto& [m, c] : a.coeffs()) out += c * matrix_power(C, m[0]) * matrix_power(S, m[1]);
  return out;
}

// Random element with `terms` monomials drawn from the box |m|_inf <= radius.
inline FourierElement random_element(const ThetaPtr& theta, std::mt19937_64& rng, int terms, int radius) {
  std::uniform_int_distribution<int> mode(-radius, radius);
  std::normal_distribution<double> g;
  FourierElement::Coefficients c;
  for (int t = 0; t < terms; ++t) {
    Mode m(theta->dim());
    for (auto& x : m) x = mode(rng);
    c[m] += cd(g(rng), g(rng));
  }
  return FourierElement(theta, std::move(c));
}

// Product expanded term by term straight from the commutation relation: move each generator of
// the right factor leftwards past the higher-index generators of the left factor.
inline FourierElement symbolic_product(const FourierElement& a, const FourierElement& b) {
  const auto& T = a.theta().entries();
  const auto d = static_cast<int>(a.dim());
  FourierElement::Coefficients out;
  for (const auto& [m, c] : a.coeffs())
    for (const auto& [n, e] : b.coeffs()) {
      double phase = 0.0;
      for (int k = 0; k < d; ++k)
        for (int j = k + 1; j < d; ++j) phase += T(j, k) * m[j] * n[k];
      Mode s(m.size());
      for (std::size_t i = 0; i < m.size(); ++i) s[i] = m[i] + n[i];
      out[s] += c * e * std::polar(1.0, 2.0 * std::numbers::pi * phase);
    }
  return FourierElement(a.theta_ptr(), std::move(out));
}

inline ComplexStructure random_cs(std::size_t n, std::mt19937_64& rng) { return random_complex_structure(n, rng); }

}  // namespace nctorus::testing
