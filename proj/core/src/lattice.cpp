#include "nctorus/lattice.hpp"

#include <cmath>

#include "nctorus/errors.hpp"

namespace nctorus {

namespace {

template <class Int, class Real>
Real to_real(const Int& x) {
  return Real(x);
}

template <class Int, class Real>
Real dot(const std::vector<Int>& a, const std::vector<Real>& b) {
  Real s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += to_real<Int, Real>(a[k]) * b[k];
  return s;
}

template <class Real>
Real dot_real(const std::vector<Real>& a, const std::vector<Real>& b) {
  Real s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

template <class Int, class Real, class Round>
DenseMatrix<Int> lll_impl(DenseMatrix<Int> b, Round round) {
  const std::size_t k = b.size();
  if (k <= 1) return b;
  const std::size_t m = b.front().size();
  DenseMatrix<Real> bstar(k, std::vector<Real>(m));
  DenseMatrix<Real> mu(k, std::vector<Real>(k, Real(0)));
  std::vector<Real> B(k);

  auto gram_schmidt = [&]() {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t c = 0; c < m; ++c) bstar[i][c] = to_real<Int, Real>(b[i][c]);
      for (std::size_t j = 0; j < i; ++j) {
        mu[i][j] = (B[j] == 0) ? Real(0) : dot<Int, Real>(b[i], bstar[j]) / B[j];
        for (std::size_t c = 0; c < m; ++c) bstar[i][c] -= mu[i][j] * bstar[j][c];
      }
      B[i] = dot_real(bstar[i], bstar[i]);
    }
  };

  gram_schmidt();
  const Real delta = Real(3) / Real(4);
  std::size_t i = 1;
  std::size_t guard = 0;
  while (i < k) {
    if (++guard > 100000) throw ConditioningError("LLL did not converge");
    for (std::size_t j = i; j-- > 0;) {
      const Int q = round(mu[i][j]);
      if (q != 0) {
        for (std::size_t c = 0; c < m; ++c) b[i][c] -= q * b[j][c];
        gram_schmidt();
      }
    }
    if (B[i] >= (delta - mu[i][i - 1] * mu[i][i - 1]) * B[i - 1]) {
      ++i;
    } else {
      std::swap(b[i], b[i - 1]);
      gram_schmidt();
      i = std::max<std::size_t>(1, i - 1);
    }
  }
  return b;
}

}  // namespace

Rational rational_with_denominator(double x, std::int64_t den) {
  const long double scaled = static_cast<long double>(x) * static_cast<long double>(den);
  const auto num = static_cast<long long>(std::llround(scaled));
  return Rational(BigInt(num), BigInt(den));
}

DenseMatrix<GaussRational> gauss_inverse(DenseMatrix<GaussRational> m) {
  const std::size_t n = m.size();
  DenseMatrix<GaussRational> inv(n, std::vector<GaussRational>(n));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = GaussRational(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && m[piv][col].is_zero()) ++piv;
    if (piv == n) throw DomainError("matrix is singular");
    std::swap(m[piv], m[col]);
    std::swap(inv[piv], inv[col]);
    const GaussRational p = m[col][col];
    for (std::size_t c = 0; c < n; ++c) {
      m[col][c] = m[col][c] / p;
      inv[col][c] = inv[col][c] / p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || m[r][col].is_zero()) continue;
      const GaussRational f = m[r][col];
      for (std::size_t c = 0; c < n; ++c) {
        m[r][c] = m[r][c] - f * m[col][c];
        inv[r][c] = inv[r][c] - f * inv[col][c];
      }
    }
  }
  return inv;
}

DenseMatrix<Rational> rational_kernel(DenseMatrix<Rational> A) {
  if (A.empty()) return {};
  const std::size_t rows = A.size(), cols = A.front().size();
  std::vector<long> pivot_of_col(cols, -1);
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && A[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(A[piv], A[r]);
    const Rational p = A[r][c];
    for (auto& v : A[r]) v /= p;
    for (std::size_t o = 0; o < rows; ++o) {
      if (o == r || A[o][c] == 0) continue;
      const Rational f = A[o][c];
      for (std::size_t cc = 0; cc < cols; ++cc) A[o][cc] -= f * A[r][cc];
    }
    pivot_of_col[c] = static_cast<long>(r);
    ++r;
  }
  DenseMatrix<Rational> basis;
  for (std::size_t f = 0; f < cols; ++f) {
    if (pivot_of_col[f] >= 0) continue;
    std::vector<Rational> v(cols, Rational(0));
    v[f] = 1;
    for (std::size_t c = 0; c < cols; ++c)
      if (pivot_of_col[c] >= 0) v[c] = -A[static_cast<std::size_t>(pivot_of_col[c])][f];
    basis.push_back(std::move(v));
  }
  return basis;
}

std::vector<BigInt> primitive_integer(const std::vector<Rational>& v) {
  BigInt lcm = 1;
  for (const auto& x : v) {
    const BigInt d = boost::multiprecision::denominator(x);
    lcm = lcm / boost::multiprecision::gcd(lcm, d) * d;
  }
  std::vector<BigInt> out;
  BigInt g = 0;
  for (const auto& x : v) {
    out.push_back(boost::multiprecision::numerator(x) * (lcm / boost::multiprecision::denominator(x)));
    g = boost::multiprecision::gcd(g, boost::multiprecision::abs(out.back()));
  }
  if (g == 0) return out;
  int sign = 0;
  for (const auto& x : out)
    if (x != 0) {
      sign = x > 0 ? 1 : -1;
      break;
    }
  for (auto& x : out) x = x / g * sign;
  return out;
}

DenseMatrix<BigInt> lll_reduce(DenseMatrix<BigInt> basis) {
  auto round = [](const Rational& x) -> BigInt {
    // nearest integer, ties away from zero
    const BigInt num = boost::multiprecision::numerator(x), den = boost::multiprecision::denominator(x);
    const BigInt twice = 2 * num + (num >= 0 ? den : -den);
    return twice / (2 * den);
  };
  return lll_impl<BigInt, Rational>(std::move(basis), round);
}

DenseMatrix<long double> lll_reduce(DenseMatrix<long double> basis) {
  auto round = [](long double x) -> long double { return std::round(x); };
  return lll_impl<long double, long double>(std::move(basis), round);
}

}  // namespace nctorus
