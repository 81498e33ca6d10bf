#pragma once

// Exact rational and Gaussian-rational helpers, and LLL reduction.

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace nctorus {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// a + b i with rational parts.
struct GaussRational {
  Rational re{0};
  Rational im{0};

  GaussRational() = default;
  GaussRational(Rational r, Rational i = Rational(0)) : re(std::move(r)), im(std::move(i)) {}

  bool is_zero() const { return re == 0 && im == 0; }
  GaussRational conj() const { return {re, -im}; }

  friend GaussRational operator+(const GaussRational& a, const GaussRational& b) { return {a.re + b.re, a.im + b.im}; }
  friend GaussRational operator-(const GaussRational& a, const GaussRational& b) { return {a.re - b.re, a.im - b.im}; }
  friend GaussRational operator-(const GaussRational& a) { return {-a.re, -a.im}; }
  friend GaussRational operator*(const GaussRational& a, const GaussRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend GaussRational operator/(const GaussRational& a, const GaussRational& b) {
    const Rational n = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
  }
  friend bool operator==(const GaussRational& a, const GaussRational& b) = default;
};

template <class T>
using DenseMatrix = std::vector<std::vector<T>>;

/// Nearest rational with the given denominator: round(x * den) / den.
Rational rational_with_denominator(double x, std::int64_t den);

/// Exact inverse by Gauss-Jordan; throws DomainError when singular.
DenseMatrix<GaussRational> gauss_inverse(DenseMatrix<GaussRational> m);

/// Basis of the right kernel {x : A x = 0} via reduced row echelon form.
DenseMatrix<Rational> rational_kernel(DenseMatrix<Rational> A);

/// Scales a rational vector to a primitive integer vector with positive first nonzero entry.
std::vector<BigInt> primitive_integer(const std::vector<Rational>& v);

/// LLL reduction (delta = 3/4) of integer row vectors with exact rational Gram-Schmidt.
DenseMatrix<BigInt> lll_reduce(DenseMatrix<BigInt> basis);

/// LLL reduction in long double for real row vectors (integer-relation search).
DenseMatrix<long double> lll_reduce(DenseMatrix<long double> basis);

}  // namespace nctorus
