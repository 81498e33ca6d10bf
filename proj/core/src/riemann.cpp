#include "nctorus/riemann.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "nctorus/errors.hpp"

namespace nctorus {

namespace {

__extension__ typedef __int128 i128;

std::int64_t checked(i128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    throw OverflowError("integer form arithmetic overflowed int64");
  return static_cast<std::int64_t>(v);
}

std::int64_t to_int64(const BigInt& v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    throw OverflowError("lattice vector does not fit in int64");
  return v.convert_to<std::int64_t>();
}

std::vector<std::pair<std::size_t, std::size_t>> skew_pairs(std::size_t d) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a + 1; b < d; ++b) out.emplace_back(a, b);
  return out;
}

IntMatrix form_from_vector(const std::vector<std::int64_t>& v, std::size_t d) {
  IntMatrix E = IntMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  const auto pairs = skew_pairs(d);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [a, b] = pairs[k];
    E(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v[k];
    E(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = -v[k];
  }
  return E;
}

// Coefficient of unknown e_ab in equation (J^T E J - E)_cd for a < b, c < d.
template <class T, class Jget>
T equation_coefficient(const Jget& J, std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
  T v = J(a, c) * J(b, d) - J(b, c) * J(a, d);
  if (a == c && b == d) v -= T(1);
  return v;
}

Eigen::MatrixXcd holomorphic_frame(const ComplexStructure& cs) {
  const auto pm = period_from_j(cs);
  const auto n = static_cast<Eigen::Index>(pm.n());
  Eigen::MatrixXcd M(2 * n, 2 * n);
  M.topRows(n) = pm.Q;
  M.bottomRows(n) = pm.Q.conjugate();
  const Eigen::MatrixXcd Minv = M.inverse();
  return Minv.leftCols(n);
}

HermitianFormReport hermitian_unchecked(const Eigen::MatrixXd& E, const ComplexStructure& cs) {
  const Eigen::MatrixXcd A = holomorphic_frame(cs);
  const auto n = A.cols();
  const Eigen::MatrixXd a = 2.0 * A.real();
  const Eigen::MatrixXd Ja = cs.J() * a;
  HermitianFormReport rep;
  rep.H.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index l = 0; l < n; ++l)
      rep.H(k, l) = cd(Ja.col(k).dot(E * a.col(l)), a.col(k).dot(E * a.col(l)));
  const Eigen::MatrixXcd Hs = 0.5 * (rep.H + rep.H.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Hs, Eigen::EigenvaluesOnly);
  rep.eigenvalues = es.eigenvalues();
  rep.margin = 1e-9 * rep.eigenvalues.cwiseAbs().sum();
  rep.positive_definite = rep.eigenvalues.minCoeff() > rep.margin;
  rep.borderline = (rep.eigenvalues.array().abs() <= rep.margin).any();
  return rep;
}

double residual_d(const Eigen::MatrixXd& E, const Eigen::MatrixXd& J) {
  return (J.transpose() * E * J - E).cwiseAbs().maxCoeff();
}

IntMatrix integer_inverse(const IntMatrix& U) {
  const auto n = static_cast<std::size_t>(U.rows());
  DenseMatrix<GaussRational> m(n, std::vector<GaussRational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i][j] = GaussRational(Rational(U(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
  const auto inv = gauss_inverse(std::move(m));
  IntMatrix out(U.rows(), U.cols());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const auto& x = inv[i][j].re;
      if (boost::multiprecision::denominator(x) != 1) throw DomainError("matrix is not unimodular");
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = to_int64(boost::multiprecision::numerator(x));
    }
  return out;
}

IntMatrix int_product(const IntMatrix& A, const IntMatrix& B) {
  IntMatrix C(A.rows(), B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < B.cols(); ++j) {
      i128 s = 0;
      for (Eigen::Index k = 0; k < A.cols(); ++k) s += static_cast<i128>(A(i, k)) * B(k, j);
      C(i, j) = checked(s);
    }
  return C;
}

bool wedge_square_zero(const IntMatrix& S) {
  const auto d = S.rows();
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = a + 1; b < d; ++b)
      for (Eigen::Index c = b + 1; c < d; ++c)
        for (Eigen::Index e = c + 1; e < d; ++e) {
          const i128 pf = static_cast<i128>(S(a, b)) * S(c, e) - static_cast<i128>(S(a, c)) * S(b, e) +
                          static_cast<i128>(S(a, e)) * S(b, c);
          if (pf != 0) return false;
        }
  return true;
}

// Integer vectors spanning {x in Z^u : C x = 0} for an integer equation matrix C (rows = equations).
std::vector<std::vector<BigInt>> saturated_kernel(const DenseMatrix<BigInt>& C, std::size_t u, std::size_t expected) {
  if (expected == 0) return {};
  if (expected == u || C.empty()) {
    std::vector<std::vector<BigInt>> id(u, std::vector<BigInt>(u, 0));
    for (std::size_t i = 0; i < u; ++i) id[i][i] = 1;
    return id;
  }
  BigInt lambda = BigInt(1) << 64;
  for (int attempt = 0; attempt < 6; ++attempt, lambda <<= 64) {
    DenseMatrix<BigInt> rows(u, std::vector<BigInt>(u + C.size(), 0));
    for (std::size_t i = 0; i < u; ++i) {
      rows[i][i] = 1;
      for (std::size_t e = 0; e < C.size(); ++e) rows[i][u + e] = lambda * C[e][i];
    }
    const auto red = lll_reduce(std::move(rows));
    std::vector<std::vector<BigInt>> out;
    for (const auto& r : red) {
      if (std::all_of(r.begin() + static_cast<long>(u), r.end(), [](const BigInt& x) { return x == 0; }))
        out.emplace_back(r.begin(), r.begin() + static_cast<long>(u));
    }
    if (out.size() == expected) return out;
  }
  throw ConditioningError("could not saturate the integer kernel");
}

}  // namespace

IntegerSkewForm::IntegerSkewForm(IntMatrix e) : E(std::move(e)) {
  if (E.rows() != E.cols() || E.rows() == 0 || E.rows() % 2 != 0) throw DomainError("form must be square of even size");
  for (Eigen::Index a = 0; a < E.rows(); ++a)
    for (Eigen::Index b = 0; b < E.cols(); ++b)
      if (E(a, b) != -E(b, a)) {
        std::ostringstream msg;
        msg << "form is not alternating at entries (" << a << "," << b << ") and (" << b << "," << a << ")";
        throw DomainError(msg.str());
      }
}

IntegerSkewForm IntegerSkewForm::canonical(const std::vector<std::int64_t>& divisors) {
  const auto n = static_cast<Eigen::Index>(divisors.size());
  IntMatrix E = IntMatrix::Zero(2 * n, 2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    E(j, j + n) = divisors[static_cast<std::size_t>(j)];
    E(j + n, j) = -divisors[static_cast<std::size_t>(j)];
  }
  return IntegerSkewForm(std::move(E));
}

IntegerSkewForm IntegerSkewForm::block_standard(std::size_t n) {
  const auto d = static_cast<Eigen::Index>(2 * n);
  IntMatrix E = IntMatrix::Zero(d, d);
  for (Eigen::Index b = 0; b < d; b += 2) {
    E(b, b + 1) = 1;
    E(b + 1, b) = -1;
  }
  return IntegerSkewForm(std::move(E));
}

bool IntegerSkewForm::nondegenerate() const {
  const auto d = static_cast<std::size_t>(E.rows());
  DenseMatrix<GaussRational> m(d, std::vector<GaussRational>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) m[i][j] = GaussRational(Rational(E(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
  try {
    gauss_inverse(std::move(m));
  } catch (const DomainError&) {
    return false;
  }
  return true;
}

double compatibility_residual(const IntegerSkewForm& form, const ComplexStructure& cs) {
  if (static_cast<std::size_t>(form.E.rows()) != cs.dim()) throw DomainError("form and complex structure sizes differ");
  return residual_d(form.E.cast<double>(), cs.J());
}

HermitianFormReport hermitian_from_form(const IntegerSkewForm& form, const ComplexStructure& cs) {
  const double res = compatibility_residual(form, cs);
  const double scale = 1.0 + static_cast<double>(form.E.cwiseAbs().maxCoeff());
  if (res > 1e-8 * scale) {
    std::ostringstream msg;
    msg << "form is not compatible with J (max |J^T E J - E| = " << res << ")";
    throw DomainError(msg.str());
  }
  return hermitian_unchecked(form.E.cast<double>(), cs);
}

PeriodMatrix ExactPeriod::to_float() const {
  const auto n = static_cast<Eigen::Index>(Q.size());
  const auto d = static_cast<Eigen::Index>(Q.front().size());
  PeriodMatrix pm;
  pm.Q.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      const auto& x = Q[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      pm.Q(i, j) = cd(x.re.convert_to<double>(), x.im.convert_to<double>());
    }
  return pm;
}

DenseMatrix<Rational> exact_j_from_period(const ExactPeriod& pm) {
  const std::size_t n = pm.n();
  const std::size_t d = 2 * n;
  if (n == 0 || pm.Q.front().size() != d) throw DomainError("period matrix must be n x 2n");
  DenseMatrix<GaussRational> M(d, std::vector<GaussRational>(d));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      M[i][j] = pm.Q[i][j];
      M[i + n][j] = pm.Q[i][j].conj();
    }
  const auto Minv = gauss_inverse(M);
  DenseMatrix<Rational> J(d, std::vector<Rational>(d, Rational(0)));
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      GaussRational s;
      for (std::size_t k = 0; k < d; ++k) {
        const GaussRational eig = k < n ? GaussRational(Rational(0), Rational(1)) : GaussRational(Rational(0), Rational(-1));
        s = s + Minv[a][k] * eig * M[k][b];
      }
      if (s.im != 0) throw DomainError("exact J has a nonzero imaginary part");
      J[a][b] = s.re;
    }
  return J;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::found: return "found";
    case Verdict::none_within_bound: return "none_within_bound";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

RiemannSearchResult riemann_form_search(const ComplexStructure& cs, const RiemannSearchOptions& opts) {
  if (opts.bound < 1) throw DomainError("search bound must be at least 1");
  const std::size_t d = cs.dim();
  const auto pairs = skew_pairs(d);
  const std::size_t u = pairs.size();
  RiemannSearchResult res;
  res.bound = opts.bound;
  res.unknowns = u;
  std::ostringstream diag;

  std::vector<std::vector<BigInt>> int_basis;
  if (opts.exact && opts.exact_period) {
    res.exact_path = true;
    const auto J = exact_j_from_period(*opts.exact_period);
    if (J.size() != d) throw DomainError("exact period does not match the complex structure");
    Eigen::MatrixXd Jf(d, d);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) Jf(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = J[a][b].convert_to<double>();
    if ((Jf - cs.J()).cwiseAbs().maxCoeff() > 1e-6) throw DomainError("exact period does not match the complex structure");
    auto Jget = [&](std::size_t a, std::size_t b) -> const Rational& { return J[a][b]; };
    DenseMatrix<Rational> C(u, std::vector<Rational>(u));
    for (std::size_t e = 0; e < u; ++e)
      for (std::size_t k = 0; k < u; ++k)
        C[e][k] = equation_coefficient<Rational>(Jget, pairs[k].first, pairs[k].second, pairs[e].first, pairs[e].second);
    const auto ker = rational_kernel(C);
    res.real_kernel_dim = ker.size();
    DenseMatrix<BigInt> Cint;
    for (const auto& row : C) {
      if (std::all_of(row.begin(), row.end(), [](const Rational& x) { return x == 0; })) continue;
      Cint.push_back(primitive_integer(row));
    }
    int_basis = saturated_kernel(Cint, u, ker.size());
    diag << "exact rational compatibility system; ";
  } else {
    if (opts.exact) diag << "exact path requested without rational period data; used floating path; ";
    const auto& J = cs.J();
    auto Jget = [&](std::size_t a, std::size_t b) { return J(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)); };
    Eigen::MatrixXd C(u, u);
    for (std::size_t e = 0; e < u; ++e)
      for (std::size_t k = 0; k < u; ++k)
        C(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(k)) =
            equation_coefficient<double>(Jget, pairs[k].first, pairs[k].second, pairs[e].first, pairs[e].second);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = std::max(sv.maxCoeff(), 1.0);
    std::vector<Eigen::Index> range_cols;
    std::size_t null = 0;
    bool ambiguous = false;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) < 1e-8 * smax) {
        ++null;
        if (sv(i) > 1e-12 * smax) ambiguous = true;
      } else {
        range_cols.push_back(i);
        if (sv(i) < 1e-5 * smax) ambiguous = true;
      }
    }
    res.real_kernel_dim = null;
    if (ambiguous) {
      res.verdict = Verdict::inconclusive;
      diag << "compatibility system has singular values near the nullspace threshold";
      res.diagnostics = diag.str();
      return res;
    }
    if (null == u) {
      int_basis.assign(u, std::vector<BigInt>(u, 0));
      for (std::size_t i = 0; i < u; ++i) int_basis[i][i] = 1;
    } else if (null > 0) {
      // Integer relations: x in Z^u with V_range^T x = 0, found by LLL on [I | lambda V_range].
      const long double lambda = 1e8L;
      DenseMatrix<long double> rows(u, std::vector<long double>(u + range_cols.size(), 0.0L));
      for (std::size_t i = 0; i < u; ++i) {
        rows[i][i] = 1.0L;
        for (std::size_t c = 0; c < range_cols.size(); ++c)
          rows[i][u + c] = lambda * static_cast<long double>(svd.matrixV()(static_cast<Eigen::Index>(i), range_cols[c]));
      }
      const auto red = lll_reduce(std::move(rows));
      for (const auto& r : red) {
        std::vector<std::int64_t> x(u);
        double norm = 0.0;
        for (std::size_t i = 0; i < u; ++i) {
          x[i] = static_cast<std::int64_t>(std::llround(r[i]));
          norm = std::max(norm, std::abs(static_cast<double>(x[i])));
        }
        if (norm == 0.0) continue;
        const Eigen::MatrixXd Ef = form_from_vector(x, d).cast<double>();
        if (residual_d(Ef, J) <= 1e-8 * (1.0 + norm)) {
          std::vector<BigInt> v(x.begin(), x.end());
          int_basis.push_back(std::move(v));
        }
      }
    }
    diag << "floating nullspace with integer-relation reduction; ";
  }

  res.kernel_dim = int_basis.size();
  std::vector<std::vector<std::int64_t>> basis;
  for (const auto& v : int_basis) {
    std::vector<std::int64_t> w;
    for (const auto& x : v) w.push_back(to_int64(x));
    res.kernel_basis.push_back(form_from_vector(w, d));
    basis.push_back(std::move(w));
  }
  const std::size_t k = basis.size();
  if (k == 0) {
    res.verdict = Verdict::none_within_bound;
    diag << "no integer compatible forms";
    res.diagnostics = diag.str();
    return res;
  }

  // Combinations ordered by sup norm s = 1..B, lexicographic within a shell.
  const int B = opts.bound;
  std::vector<int> c(k);
  for (int s = 1; s <= B; ++s) {
    std::fill(c.begin(), c.end(), -s);
    for (;;) {
      bool on_shell = std::any_of(c.begin(), c.end(), [s](int x) { return std::abs(x) == s; });
      if (on_shell) {
        if (++res.candidates_tested > opts.max_candidates) {
          res.verdict = Verdict::inconclusive;
          diag << "candidate cap " << opts.max_candidates << " reached at sup norm " << s;
          res.diagnostics = diag.str();
          return res;
        }
        std::vector<std::int64_t> e(u, 0);
        for (std::size_t i = 0; i < k; ++i) {
          if (c[i] == 0) continue;
          for (std::size_t j = 0; j < u; ++j) e[j] = checked(static_cast<i128>(e[j]) + static_cast<i128>(c[i]) * basis[i][j]);
        }
        IntegerSkewForm form(form_from_vector(e, d));
        auto h = hermitian_unchecked(form.E.cast<double>(), cs);
        if (h.positive_definite) {
          res.verdict = Verdict::found;
          res.form = form;
          res.hermitian = h;
          diag << "positive form at sup norm " << s;
          res.diagnostics = diag.str();
          return res;
        }
        // A degenerate integer form has an exactly singular H, so only nondegenerate ones are ambiguous.
        if (h.borderline && h.eigenvalues.maxCoeff() > h.margin && h.eigenvalues.minCoeff() > -h.margin &&
            form.nondegenerate())
          ++res.borderline_candidates;
      }
      std::size_t pos = k;
      while (pos-- > 0) {
        if (c[pos] < s) {
          ++c[pos];
          break;
        }
        c[pos] = -s;
      }
      if (pos == static_cast<std::size_t>(-1)) break;
    }
  }
  res.verdict = res.borderline_candidates > 0 ? Verdict::inconclusive : Verdict::none_within_bound;
  if (res.borderline_candidates > 0) diag << res.borderline_candidates << " borderline positivity candidates";
  else diag << "no positive definite combination within the bound";
  res.diagnostics = diag.str();
  return res;
}

FrobeniusBasis frobenius_basis(const IntegerSkewForm& form) {
  const auto d = form.E.rows();
  const auto n = d / 2;
  IntMatrix A = form.E;
  IntMatrix U = IntMatrix::Identity(d, d);

  // e_k <- e_k + q e_src as a congruence on A and a column operation on U.
  auto add = [&](Eigen::Index k, Eigen::Index src, std::int64_t q) {
    if (q == 0) return;
    for (Eigen::Index i = 0; i < d; ++i) U(i, k) = checked(static_cast<i128>(U(i, k)) + static_cast<i128>(q) * U(i, src));
    for (Eigen::Index i = 0; i < d; ++i) A(i, k) = checked(static_cast<i128>(A(i, k)) + static_cast<i128>(q) * A(i, src));
    for (Eigen::Index i = 0; i < d; ++i) A(k, i) = checked(static_cast<i128>(A(k, i)) + static_cast<i128>(q) * A(src, i));
  };
  auto swap_basis = [&](Eigen::Index a, Eigen::Index b) {
    if (a == b) return;
    U.col(a).swap(U.col(b));
    A.col(a).swap(A.col(b));
    A.row(a).swap(A.row(b));
  };
  auto negate = [&](Eigen::Index a) {
    U.col(a) = -U.col(a);
    A.col(a) = -A.col(a);
    A.row(a) = -A.row(a);
  };
  auto floor_div = [](std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
  };

  for (Eigen::Index s = 0; s < d; s += 2) {
    for (;;) {
      // Smallest nonzero |A_ij| among the remaining indices, first in lexicographic order.
      Eigen::Index bi = -1, bj = -1;
      std::int64_t best = 0;
      for (Eigen::Index i = s; i < d; ++i)
        for (Eigen::Index j = i + 1; j < d; ++j) {
          const auto v = A(i, j) < 0 ? -A(i, j) : A(i, j);
          if (v != 0 && (best == 0 || v < best)) {
            best = v;
            bi = i;
            bj = j;
          }
        }
      if (best == 0) throw DomainError("form is degenerate");
      swap_basis(s, bi);
      if (bj == s) bj = bi;
      swap_basis(s + 1, bj);
      if (A(s, s + 1) < 0) negate(s + 1);
      const std::int64_t dd = A(s, s + 1);
      bool clean = true;
      for (Eigen::Index k = s + 2; k < d; ++k) {
        // A(s, k) -= q A(s, s+1) via e_k -= q e_{s+1}; A(s+1, k) -= q' A(s+1, s) ... via e_k += q' e_s.
        add(k, s + 1, -floor_div(A(s, k), dd));
        add(k, s, floor_div(A(s + 1, k), dd));
        if (A(s, k) != 0 || A(s + 1, k) != 0) clean = false;
      }
      if (!clean) continue;
      // Divisibility: fold an offending row into e_s so the next pass finds a smaller entry.
      bool divisible = true;
      for (Eigen::Index k = s + 2; k < d && divisible; ++k)
        for (Eigen::Index l = k + 1; l < d; ++l)
          if (A(k, l) % dd != 0) {
            add(s, k, 1);
            divisible = false;
            break;
          }
      if (divisible) break;
    }
  }

  FrobeniusBasis out;
  out.U.resize(d, d);
  for (Eigen::Index j = 0; j < n; ++j) {
    out.U.col(j) = U.col(2 * j);
    out.U.col(j + n) = U.col(2 * j + 1);
    out.divisors.push_back(A(2 * j, 2 * j + 1));
  }
  return out;
}

bool verify_frobenius(const IntegerSkewForm& form, const FrobeniusBasis& basis) {
  const auto d = form.E.rows();
  if (basis.U.rows() != d || basis.U.cols() != d) return false;
  try {
    integer_inverse(basis.U);
  } catch (const Error&) {
    return false;
  }
  const IntMatrix T = int_product(int_product(basis.U.transpose(), form.E), basis.U);
  if (!(T == IntegerSkewForm::canonical(basis.divisors).E)) return false;
  for (std::size_t j = 0; j < basis.divisors.size(); ++j) {
    if (basis.divisors[j] <= 0) return false;
    if (j > 0 && basis.divisors[j] % basis.divisors[j - 1] != 0) return false;
  }
  return true;
}

Decomposition decompose_riemann_form(const IntegerSkewForm& form, const FrobeniusBasis& basis,
                                     const ComplexStructure& cs) {
  const auto h = hermitian_from_form(form, cs);
  if (!h.positive_definite) throw DomainError("hermitian form of E is not positive definite");
  if (!verify_frobenius(form, basis)) throw DomainError("basis is not a Frobenius basis of E");
  const auto n = static_cast<Eigen::Index>(basis.divisors.size());
  const IntMatrix Uinv = integer_inverse(basis.U);
  Decomposition out;
  IntMatrix sum = IntMatrix::Zero(2 * n, 2 * n);
  out.all_compatible = true;
  for (Eigen::Index j = 0; j < n; ++j) {
    IntMatrix Sp = IntMatrix::Zero(2 * n, 2 * n);
    Sp(j, j + n) = basis.divisors[static_cast<std::size_t>(j)];
    Sp(j + n, j) = -basis.divisors[static_cast<std::size_t>(j)];
    IntegerSkewForm S(int_product(int_product(Uinv.transpose(), Sp), Uinv));
    DecomposedPiece piece{S, wedge_square_zero(S.E), false, std::nullopt};
    const double res = compatibility_residual(S, cs);
    piece.compatible = res <= 1e-8 * (1.0 + static_cast<double>(S.E.cwiseAbs().maxCoeff()));
    if (piece.compatible) piece.hermitian = hermitian_unchecked(S.E.cast<double>(), cs);
    out.all_compatible = out.all_compatible && piece.compatible;
    sum += S.E;
    out.pieces.push_back(std::move(piece));
  }
  out.sum_exact = sum == form.E;
  return out;
}

SiegelResult siegel_normalize(const PeriodMatrix& pm, const std::vector<std::size_t>& split,
                              const std::vector<std::int64_t>& divisors) {
  const auto n = static_cast<Eigen::Index>(pm.n());
  if (static_cast<Eigen::Index>(split.size()) != n) throw DomainError("split must select n columns");
  std::vector<bool> used(static_cast<std::size_t>(2 * n), false);
  Eigen::MatrixXcd B2(n, n), B1(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto c = split[static_cast<std::size_t>(j)];
    if (c >= used.size() || used[c]) throw DomainError("split columns must be distinct and in range");
    used[c] = true;
    B2.col(j) = pm.Q.col(static_cast<Eigen::Index>(c));
  }
  Eigen::Index k = 0;
  for (std::size_t c = 0; c < used.size(); ++c)
    if (!used[c]) B1.col(k++) = pm.Q.col(static_cast<Eigen::Index>(c));
  if (reciprocal_condition(B2) < 1e-12) throw ConditioningError("selected column block is singular");
  SiegelResult out;
  out.Omega = B2.partialPivLu().solve(B1);
  out.Z = out.Omega;
  if (!divisors.empty()) {
    if (static_cast<Eigen::Index>(divisors.size()) != n) throw DomainError("need n divisors");
    for (Eigen::Index i = 0; i < n; ++i) out.Z.row(i) *= static_cast<double>(divisors[static_cast<std::size_t>(i)]);
  }
  out.asymmetry = (out.Z - out.Z.transpose()).cwiseAbs().maxCoeff();
  out.symmetric = out.asymmetry <= 1e-8 * std::max(1.0, out.Z.cwiseAbs().maxCoeff());
  const Eigen::MatrixXd Im = out.Z.imag();
  const Eigen::MatrixXd ImS = 0.5 * (Im + Im.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ImS, Eigen::EigenvaluesOnly);
  out.min_imag_eigenvalue = es.eigenvalues().minCoeff();
  // Decide positivity on the unit-diagonal congruent matrix, so large divisors cannot hide it.
  const Eigen::VectorXd diag = ImS.diagonal();
  if (diag.minCoeff() > 0.0) {
    const Eigen::VectorXd s = diag.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd scaled = s.asDiagonal() * ImS * s.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ss(scaled, Eigen::EigenvaluesOnly);
    out.positive = ss.eigenvalues().minCoeff() > 1e-12;
  }
  return out;
}

PeriodMatrix split_torus_example(cd tau, cd tau_prime, cd w) {
  if (!(tau.imag() > 0.0) || !(tau_prime.imag() > 0.0)) throw DomainError("tau and tau' must lie in the upper half-plane");
  PeriodMatrix pm;
  pm.Q.resize(2, 4);
  pm.Q << cd(1.0), tau_prime, cd(0.0), w, cd(0.0), cd(0.0), cd(1.0), tau;
  return pm;
}

ExactPeriod split_torus_exact(const GaussRational& tau, const GaussRational& tau_prime, const GaussRational& w) {
  if (!(tau.im > 0) || !(tau_prime.im > 0)) throw DomainError("tau and tau' must lie in the upper half-plane");
  const GaussRational one(Rational(1)), zero;
  ExactPeriod pm;
  pm.Q = {{one, tau_prime, zero, w}, {zero, zero, one, tau}};
  return pm;
}

BlockStructure detect_block_structure(const ThetaMatrix& theta, const ComplexStructure& cs, double tol) {
  if (theta.dim() != cs.dim()) throw DomainError("Theta and J sizes differ");
  const auto d = static_cast<Eigen::Index>(cs.dim());
  const auto& J = cs.J();
  const auto& T = theta.entries();
  BlockStructure out;
  if (d == 2) {
    out.product_type = out.splitting = true;
    out.theta12 = T(0, 1);
    return out;
  }
  out.splitting = J.topRightCorner(2, d - 2).cwiseAbs().maxCoeff() <= tol &&
                  J.bottomLeftCorner(d - 2, 2).cwiseAbs().maxCoeff() <= tol;
  bool product = true;
  for (Eigen::Index i = 0; i < d && product; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      if (i / 2 != j / 2 && (std::abs(J(i, j)) > tol || std::abs(T(i, j)) > tol)) {
        product = false;
        break;
      }
  out.product_type = product;
  if (out.splitting) out.theta12 = T(0, 1);
  return out;
}

NCRiemannBound ncriemann_h0_bound(const ThetaMatrix& theta, const ComplexStructure& cs, const IntegerSkewForm& form,
                                  long k, int M) {
  if (k < 1) throw DomainError("multiplier k must be at least 1");
  if (theta.dim() != cs.dim()) throw DomainError("Theta and J sizes differ");
  const auto h = hermitian_from_form(form, cs);
  if (!h.positive_definite) throw DomainError("E is not a Riemann form: hermitian form is not positive definite");
  const IntegerSkewForm kE(form.E * static_cast<std::int64_t>(k));
  const auto fb = frobenius_basis(kE);
  const auto d = static_cast<Eigen::Index>(cs.dim());
  const auto n = d / 2;

  // Bring (nu_1, nu_{n+1}) to the front.
  std::vector<Eigen::Index> order{0, n};
  for (Eigen::Index j = 1; j < n; ++j) order.push_back(j);
  for (Eigen::Index j = n + 1; j < d; ++j) order.push_back(j);
  IntMatrix V(d, d);
  for (Eigen::Index c = 0; c < d; ++c) V.col(c) = fb.U.col(order[static_cast<std::size_t>(c)]);
  const IntMatrix Vinv = integer_inverse(V);
  const Eigen::MatrixXd Jp = Vinv.cast<double>() * cs.J() * V.cast<double>();
  const Eigen::MatrixXd Tp = V.cast<double>().transpose() * theta.entries() * V.cast<double>();
  if (d > 2) {
    const double off = std::max(Jp.topRightCorner(2, d - 2).cwiseAbs().maxCoeff(),
                                Jp.bottomLeftCorner(d - 2, 2).cwiseAbs().maxCoeff());
    if (off > 1e-8) {
      std::ostringstream msg;
      msg << "J does not split along the first symplectic plane of the Frobenius basis (off-block " << off << ")";
      throw DomainError(msg.str());
    }
  }
  const Eigen::Matrix2d J1 = Jp.topLeftCorner(2, 2);
  if (std::abs(J1(0, 1)) < 1e-12) throw ConditioningError("degenerate 2x2 complex structure block");
  // (tau, 1) J1 = i (tau, 1)
  const cd tau = (cd(0.0, 1.0) - J1(1, 1)) / J1(0, 1);
  if (!(tau.imag() > 0.0)) throw DomainError("induced elliptic curve modulus is not in the upper half-plane");

  NCRiemannBound out;
  out.divisors = fb.divisors;
  out.degree = fb.divisors.front();
  out.tau = tau;
  out.theta_small = Tp(0, 1);
  StandardModule1D sm;
  sm.q = out.degree;
  sm.p = 1;
  sm.tau = tau;
  sm.M = M;
  out.module = standard_module_cohomology(sm);
  out.bound = out.module.h0;
  return out;
}

}  // namespace nctorus
