#include "nctorus/dolbeault.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>

#include "nctorus/errors.hpp"

namespace nctorus {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kSupportCandidates = 64;
constexpr double kSupportWeight = 1e-6;

// Lexicographic enumeration of the box |m|_inf <= N in Z^d.
struct Box {
  int N;
  std::size_t d;
  std::size_t side;
  std::size_t count;

  Box(int N_, std::size_t d_) : N(N_), d(d_), side(static_cast<std::size_t>(2 * N_ + 1)), count(1) {
    for (std::size_t k = 0; k < d; ++k) count *= side;
  }

  // count when m lies outside the box
  std::size_t index(const int* m) const {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < d; ++k) {
      if (m[k] < -N || m[k] > N) return count;
      idx = idx * side + static_cast<std::size_t>(m[k] + N);
    }
    return idx;
  }

  void mode(std::size_t idx, int* m) const {
    for (std::size_t k = d; k-- > 0;) {
      m[k] = static_cast<int>(idx % side) - N;
      idx /= side;
    }
  }

  Mode mode(std::size_t idx) const {
    Mode m(d);
    mode(idx, m.data());
    return m;
  }
};

struct FormBasis {
  std::size_t n;
  std::vector<std::vector<std::uint32_t>> subsets;
  // wedge[q][p][j] = (position in degree q + 1, sign) or position -1 when j is already in the subset
  std::vector<std::vector<std::vector<std::pair<long, int>>>> wedge;

  explicit FormBasis(std::size_t n_) : n(n_) {
    for (std::size_t q = 0; q <= n; ++q) subsets.push_back(subsets_of_size(n, q));
    wedge.resize(n + 1);
    for (std::size_t q = 0; q < n; ++q) {
      const auto& next = subsets[q + 1];
      for (auto I : subsets[q]) {
        std::vector<std::pair<long, int>> row(n, {-1, 0});
        for (std::size_t j = 0; j < n; ++j) {
          const std::uint32_t bit = 1u << j;
          if (I & bit) continue;
          const int below = std::popcount(I & (bit - 1));
          const auto pos = std::find(next.begin(), next.end(), I | bit) - next.begin();
          row[j] = {static_cast<long>(pos), (below % 2 == 0) ? 1 : -1};
        }
        wedge[q].push_back(std::move(row));
      }
    }
  }

  std::size_t size(std::size_t q) const { return subsets[q].size(); }
};

// Gram of the dzbar basis in Lambda^q as x^H Gamma_q x, with Gamma_q[I, J] = det(h^{-1}[I, J])
// and h = W G W^H the Gram matrix of the dbar_j. Stored as upper Cholesky factors.
struct FormMetric {
  Eigen::MatrixXcd h_inv;
  std::vector<Eigen::MatrixXcd> up;      // L_q^H
  std::vector<Eigen::MatrixXcd> up_inv;  // L_q^{-H}
};

FormMetric make_form_metric(const ComplexStructure& cs, const AntiholFrame& frame, const FormBasis& basis) {
  const Eigen::MatrixXd G = invariant_metric(cs).G;
  const Eigen::MatrixXcd h = frame.W * G.cast<cd>() * frame.W.adjoint();
  FormMetric fm;
  fm.h_inv = h.inverse();
  fm.h_inv = (0.5 * (fm.h_inv + fm.h_inv.adjoint())).eval();
  const std::size_t n = basis.n;
  for (std::size_t q = 0; q <= n; ++q) {
    const auto& subs = basis.subsets[q];
    const auto c = subs.size();
    Eigen::MatrixXcd gram(c, c);
    for (std::size_t a = 0; a < c; ++a) {
      for (std::size_t b = 0; b < c; ++b) {
        std::vector<Eigen::Index> ia, ib;
        for (std::size_t j = 0; j < n; ++j) {
          if (subs[a] & (1u << j)) ia.push_back(static_cast<Eigen::Index>(j));
          if (subs[b] & (1u << j)) ib.push_back(static_cast<Eigen::Index>(j));
        }
        Eigen::MatrixXcd sub(q, q);
        for (std::size_t x = 0; x < q; ++x)
          for (std::size_t y = 0; y < q; ++y) sub(x, y) = fm.h_inv(ia[x], ib[y]);
        gram(a, b) = (q == 0) ? cd(1.0) : sub.determinant();
      }
    }
    gram = (0.5 * (gram + gram.adjoint())).eval();
    Eigen::LLT<Eigen::MatrixXcd> llt(gram);
    if (llt.info() != Eigen::Success) throw ConditioningError("form metric is not positive definite");
    Eigen::MatrixXcd U = llt.matrixU();
    fm.up.push_back(U);
    fm.up_inv.push_back(U.inverse());
  }
  return fm;
}

struct TermEntry {
  std::size_t dst;
  std::size_t src;
  Mode shift;
  cd value;
};

// Everything needed to emit raw matrix entries of d_q on a box.
struct Complex {
  const ThetaMatrix& theta;
  Eigen::MatrixXcd W;
  std::size_t n, d, r;
  Box box;
  FormBasis basis;
  FormMetric metric;
  std::vector<std::vector<TermEntry>> terms;  // per direction j

  Complex(const ComplexStructure& cs, const AntiholFrame& frame, const FreeConnection& conn, int N)
      : theta(*conn.theta_ptr()),
        W(frame.W),
        n(conn.n()),
        d(2 * conn.n()),
        r(conn.rank()),
        box(N, 2 * conn.n()),
        basis(conn.n()),
        metric(make_form_metric(cs, frame, basis)) {
    terms.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const auto& a = conn.term(j);
      for (std::size_t i2 = 0; i2 < r; ++i2)
        for (std::size_t i1 = 0; i1 < r; ++i1)
          for (const auto& [s, c] : a(i2, i1).coeffs()) terms[j].push_back({i2, i1, s, c});
    }
  }

  std::size_t block(std::size_t q) const { return r * basis.size(q); }

  Eigen::VectorXcd frequency(const int* m) const {
    Eigen::VectorXcd f = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < d; ++k)
      if (m[k] != 0) f += static_cast<double>(m[k]) * W.col(static_cast<Eigen::Index>(k));
    return cd(0.0, kTwoPi) * f;
  }

  // f(target box index, target local offset, source local offset, value); offsets are
  // fiber * C(n, q') + subset position within the mode block.
  template <class F>
  void emit(std::size_t q, const int* m, F&& f) const {
    const std::size_t cq = basis.size(q), cq1 = basis.size(q + 1);
    const std::size_t here = box.index(m);
    const Eigen::VectorXcd freq = frequency(m);
    Mode mv(m, m + d), target(d);
    for (std::size_t p = 0; p < cq; ++p) {
      for (std::size_t j = 0; j < n; ++j) {
        const auto [tp, sign] = basis.wedge[q][p][j];
        if (tp < 0) continue;
        const auto tpos = static_cast<std::size_t>(tp);
        for (std::size_t i = 0; i < r; ++i) f(here, i * cq1 + tpos, i * cq + p, static_cast<double>(sign) * freq(j));
        for (const auto& t : terms[j]) {
          for (std::size_t k = 0; k < d; ++k) target[k] = m[k] + t.shift[k];
          const std::size_t there = box.index(target.data());
          if (there == box.count) continue;
          const cd v = static_cast<double>(sign) * t.value * cocycle_phase(theta, t.shift, mv);
          f(there, t.dst * cq1 + tpos, t.src * cq + p, v);
        }
      }
    }
  }

  // d_q restricted to a component, converted to orthonormal form coordinates.
  Eigen::MatrixXcd dq(std::size_t q, const std::vector<std::size_t>& comp) const {
    const std::size_t bq = block(q), bq1 = block(q + 1);
    const auto K = comp.size();
    Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(K * bq1), static_cast<Eigen::Index>(K * bq));
    std::vector<int> m(d);
    for (std::size_t k = 0; k < K; ++k) {
      box.mode(comp[k], m.data());
      emit(q, m.data(), [&](std::size_t there, std::size_t row_off, std::size_t col_off, cd v) {
        const auto it = std::lower_bound(comp.begin(), comp.end(), there);
        const auto k2 = static_cast<std::size_t>(it - comp.begin());
        D(static_cast<Eigen::Index>(k2 * bq1 + row_off), static_cast<Eigen::Index>(k * bq + col_off)) += v;
      });
    }
    return orthonormalize(q, D, K);
  }

  Eigen::MatrixXcd orthonormalize(std::size_t q, const Eigen::MatrixXcd& D, std::size_t blocks) const {
    const auto cq = static_cast<Eigen::Index>(basis.size(q));
    const auto cq1 = static_cast<Eigen::Index>(basis.size(q + 1));
    const auto nb = static_cast<Eigen::Index>(blocks * r);
    Eigen::MatrixXcd X(D.rows(), D.cols());
    for (Eigen::Index b = 0; b < nb; ++b) X.middleCols(b * cq, cq).noalias() = D.middleCols(b * cq, cq) * metric.up_inv[q];
    Eigen::MatrixXcd Y(D.rows(), D.cols());
    for (Eigen::Index b = 0; b < nb; ++b) Y.middleRows(b * cq1, cq1).noalias() = metric.up[q + 1] * X.middleRows(b * cq1, cq1);
    return Y;
  }
};

// Laplacian spectra and degree-0 kernel candidates gathered by one worker.
struct Partial {
  std::vector<SpectrumAccumulator> acc;
  std::vector<std::pair<double, std::size_t>> deg0;  // (smallest Delta_0 value, component)
};

void keep_candidate(std::vector<std::pair<double, std::size_t>>& list, double v, std::size_t id) {
  list.emplace_back(v, id);
  if (list.size() > 2 * kSupportCandidates) {
    std::sort(list.begin(), list.end());
    list.resize(kSupportCandidates);
  }
}

std::vector<Eigen::MatrixXcd> component_laplacians(const Complex& cx, const std::vector<std::size_t>& comp) {
  const std::size_t n = cx.n;
  std::vector<Eigen::MatrixXcd> d(n);
  for (std::size_t q = 0; q < n; ++q) {
    if (static_cast<std::size_t>(comp.size() * cx.block(q + 1)) > kMaxDenseBlock) {
      std::ostringstream msg;
      msg << "truncated block of " << comp.size() * cx.block(q + 1)
          << " rows exceeds the dense limit; use a smaller truncation";
      throw DomainError(msg.str());
    }
    d[q] = cx.dq(q, comp);
  }
  std::vector<Eigen::MatrixXcd> lap(n + 1);
  for (std::size_t q = 0; q <= n; ++q) {
    const auto dim = static_cast<Eigen::Index>(comp.size() * cx.block(q));
    Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(dim, dim);
    if (q > 0) L.noalias() += d[q - 1] * d[q - 1].adjoint();
    if (q < n) L.noalias() += d[q].adjoint() * d[q];
    lap[q] = L;
  }
  return lap;
}

// Odd x even matrix of nabla + nabla^* on one component.
Eigen::MatrixXcd component_dirac(const Complex& cx, const std::vector<std::size_t>& comp) {
  const std::size_t n = cx.n;
  std::vector<Eigen::Index> off(n + 2, 0);
  Eigen::Index even = 0, odd = 0;
  for (std::size_t q = 0; q <= n; ++q) {
    const auto dim = static_cast<Eigen::Index>(comp.size() * cx.block(q));
    if (q % 2 == 0) {
      off[q] = even;
      even += dim;
    } else {
      off[q] = odd;
      odd += dim;
    }
  }
  if (static_cast<std::size_t>(std::max(even, odd)) > kMaxDenseBlock)
    throw DomainError("truncated block exceeds the dense limit; use a smaller truncation");
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(odd, even);
  for (std::size_t q = 0; q < n; ++q) {
    const Eigen::MatrixXcd dq = cx.dq(q, comp);
    if (q % 2 == 0)
      D.block(off[q + 1], off[q], dq.rows(), dq.cols()) += dq;
    else
      D.block(off[q], off[q + 1], dq.cols(), dq.rows()) += dq.adjoint();
  }
  return D;
}

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& M) {
  if (M.rows() == 0) return Eigen::VectorXd();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// Connected components of the box under m ~ m + s for s in the support.
std::vector<std::vector<std::size_t>> components(const Box& box, const std::vector<Mode>& support) {
  std::vector<std::size_t> parent(box.count);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  std::vector<int> m(box.d), t(box.d);
  for (std::size_t g = 0; g < box.count; ++g) {
    box.mode(g, m.data());
    for (const auto& s : support) {
      for (std::size_t k = 0; k < box.d; ++k) t[k] = m[k] + s[k];
      const auto h = box.index(t.data());
      if (h == box.count) continue;
      const auto a = find(g), b = find(h);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::vector<std::size_t> id(box.count, box.count);
  std::vector<std::vector<std::size_t>> comps;
  for (std::size_t g = 0; g < box.count; ++g) {
    const auto root = find(g);
    if (id[root] == box.count) {
      id[root] = comps.size();
      comps.emplace_back();
    }
    comps[id[root]].push_back(g);
  }
  return comps;
}

std::size_t worker_count(std::size_t jobs) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min({hw, std::size_t{8}, jobs / 4 + 1}));
}

// Runs f(component index, partial) over all components with a fixed striding, so the merged
// result does not depend on scheduling.
template <class GetComp, class F>
std::vector<Partial> run_components(std::size_t count, std::size_t degrees, GetComp&& get, F&& f) {
  const std::size_t workers = worker_count(count);
  std::vector<Partial> parts(workers);
  for (auto& p : parts) p.acc.assign(degrees, SpectrumAccumulator());
  std::vector<std::exception_ptr> errors(workers);
  auto body = [&](std::size_t w) {
    try {
      for (std::size_t c = w; c < count; c += workers) f(c, get(c), parts[w]);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    body(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return parts;
}

Partial merge(std::vector<Partial> parts) {
  Partial out = std::move(parts.front());
  for (std::size_t w = 1; w < parts.size(); ++w) {
    for (std::size_t q = 0; q < out.acc.size(); ++q) out.acc[q].merge(parts[w].acc[q]);
    for (const auto& c : parts[w].deg0) keep_candidate(out.deg0, c.first, c.second);
  }
  std::sort(out.deg0.begin(), out.deg0.end());
  if (out.deg0.size() > kSupportCandidates) out.deg0.resize(kSupportCandidates);
  return out;
}

DegreeSpectrum to_degree(const KernelSummary& s, std::size_t multiplicity) {
  DegreeSpectrum d;
  d.kernel = s.count * multiplicity;
  d.threshold = s.threshold;
  d.largest = s.largest;
  d.sigma_kept = s.smallest_kept;
  d.sigma_cut = s.largest_cut;
  d.inconclusive = s.inconclusive;
  return d;
}

struct Single {
  std::vector<DegreeSpectrum> degrees;
  std::vector<Mode> support0;
  bool fast = false;
};

// Scalar-constant connections are diagonal in the mode basis, and on each mode the Laplacian is
// |v(m)|^2 times the identity with v_j = 2 pi i (W m)_j + c_j (Clifford relation for the wedge).
double mode_symbol_norm(const Complex& cx, const std::vector<cd>& c, const int* m) {
  Eigen::VectorXcd v = cx.frequency(m);
  for (std::size_t j = 0; j < cx.n; ++j) v(static_cast<Eigen::Index>(j)) += c[j];
  return std::max(0.0, (v.adjoint() * cx.metric.h_inv * v)(0, 0).real());
}

Single fast_cohomology(const Complex& cx, const std::vector<cd>& c, double tol_rel, bool want_support) {
  const std::size_t count = cx.box.count;
  const std::size_t workers = worker_count(count / 64);
  std::vector<Partial> parts(workers);
  for (auto& p : parts) p.acc.assign(1, SpectrumAccumulator());
  auto body = [&](std::size_t w) {
    std::vector<int> m(cx.d);
    const std::size_t lo = count * w / workers, hi = count * (w + 1) / workers;
    for (std::size_t g = lo; g < hi; ++g) {
      cx.box.mode(g, m.data());
      const double lam = mode_symbol_norm(cx, c, m.data());
      parts[w].acc[0].add(lam);
      keep_candidate(parts[w].deg0, lam, g);
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body, w);
  for (auto& t : pool) t.join();
  Partial all = merge(std::move(parts));
  const auto s = all.acc[0].summarize(tol_rel);
  Single out;
  out.fast = true;
  for (std::size_t q = 0; q <= cx.n; ++q) out.degrees.push_back(to_degree(s, cx.r * cx.basis.size(q)));
  if (want_support) {
    for (const auto& [v, g] : all.deg0)
      if (v < s.threshold || v <= 0.0) out.support0.push_back(cx.box.mode(g));
    std::sort(out.support0.begin(), out.support0.end());
  }
  return out;
}

Single general_cohomology(const Complex& cx, const FreeConnection& conn, double tol_rel, bool want_support) {
  const auto support = conn.nonconstant_support();
  std::vector<std::vector<std::size_t>> comps;
  const bool singletons = support.empty();
  if (!singletons) comps = components(cx.box, support);
  const std::size_t count = singletons ? cx.box.count : comps.size();
  auto get = [&](std::size_t c) { return singletons ? std::vector<std::size_t>{c} : comps[c]; };

  auto parts = run_components(count, cx.n + 1, get, [&](std::size_t c, const std::vector<std::size_t>& comp, Partial& p) {
    const auto lap = component_laplacians(cx, comp);
    for (std::size_t q = 0; q <= cx.n; ++q) {
      const Eigen::VectorXd ev = hermitian_eigenvalues(lap[q]);
      for (Eigen::Index i = 0; i < ev.size(); ++i) p.acc[q].add(std::max(0.0, ev(i)));
      if (q == 0 && ev.size() > 0) keep_candidate(p.deg0, std::max(0.0, ev(0)), c);
    }
  });
  Partial all = merge(std::move(parts));
  Single out;
  for (std::size_t q = 0; q <= cx.n; ++q) out.degrees.push_back(to_degree(all.acc[q].summarize(tol_rel), 1));
  if (want_support) {
    const double thr = out.degrees[0].threshold;
    for (const auto& [v, c] : all.deg0) {
      if (!(v < thr || v <= 0.0)) continue;
      const auto comp = get(c);
      const auto lap = component_laplacians(cx, comp);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(lap[0]);
      std::vector<double> weight(comp.size(), 0.0);
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        if (!(es.eigenvalues()(i) < thr)) continue;
        for (std::size_t k = 0; k < comp.size(); ++k)
          for (std::size_t f = 0; f < cx.r; ++f)
            weight[k] += std::norm(es.eigenvectors()(static_cast<Eigen::Index>(k * cx.r + f), i));
      }
      for (std::size_t k = 0; k < comp.size(); ++k)
        if (weight[k] > kSupportWeight) out.support0.push_back(cx.box.mode(comp[k]));
    }
    std::sort(out.support0.begin(), out.support0.end());
  }
  return out;
}

Single cohomology_at(const ComplexStructure& cs, const AntiholFrame& frame, const FreeConnection& conn, int N,
                     double tol_rel, bool want_support) {
  const Complex cx(cs, frame, conn, N);
  if (conn.scalar_constant()) return fast_cohomology(cx, conn.scalar_values(), tol_rel, want_support);
  return general_cohomology(cx, conn, tol_rel, want_support);
}

struct IndexAt {
  long ker_even = 0, ker_odd = 0;
  double kept = 0.0, cut = 0.0;
  bool inconclusive = false;
  bool fast = false;
};

IndexAt index_at(const ComplexStructure& cs, const AntiholFrame& frame, const FreeConnection& conn, int N,
                 double tol_rel) {
  const Complex cx(cs, frame, conn, N);
  IndexAt out;
  KernelSummary se, so;
  if (conn.scalar_constant()) {
    const auto single = fast_cohomology(cx, conn.scalar_values(), tol_rel, false);
    // D^* D and D D^* are |v|^2 on each mode, on r 2^{n-1} even and odd components alike.
    const auto& d0 = single.degrees[0];
    const std::size_t mult = cx.r << (cx.n - 1);
    out.ker_even = out.ker_odd = static_cast<long>(d0.kernel / cx.r * mult);
    out.kept = d0.sigma_kept;
    out.cut = d0.sigma_cut;
    out.inconclusive = d0.inconclusive;
    out.fast = true;
    return out;
  }
  const auto support = conn.nonconstant_support();
  std::vector<std::vector<std::size_t>> comps;
  const bool singletons = support.empty();
  if (!singletons) comps = components(cx.box, support);
  const std::size_t count = singletons ? cx.box.count : comps.size();
  auto get = [&](std::size_t c) { return singletons ? std::vector<std::size_t>{c} : comps[c]; };
  auto parts = run_components(count, 2, get, [&](std::size_t, const std::vector<std::size_t>& comp, Partial& p) {
    const Eigen::MatrixXcd D = component_dirac(cx, comp);
    // D^* D and D D^* share their nonzero spectrum; the larger one carries extra exact zeros.
    const bool wide = D.cols() > D.rows();
    const Eigen::VectorXd ev = wide ? hermitian_eigenvalues(D * D.adjoint()) : hermitian_eigenvalues(D.adjoint() * D);
    const auto pad = std::abs(D.cols() - D.rows());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      p.acc[0].add(std::max(0.0, ev(i)));
      p.acc[1].add(std::max(0.0, ev(i)));
    }
    p.acc[wide ? 0 : 1].add(0.0, static_cast<std::size_t>(pad));
  });
  Partial all = merge(std::move(parts));
  se = all.acc[0].summarize(tol_rel);
  so = all.acc[1].summarize(tol_rel);
  out.ker_even = static_cast<long>(se.count);
  out.ker_odd = static_cast<long>(so.count);
  out.kept = std::min(se.smallest_kept, so.smallest_kept);
  out.cut = std::max(se.largest_cut, so.largest_cut);
  out.inconclusive = se.inconclusive || so.inconclusive;
  return out;
}

void check_shapes(const ComplexStructure& cs, const AntiholFrame& frame, const FreeConnection& conn, TruncationBox box) {
  if (box.N < 1) throw DomainError("truncation N must be at least 1");
  if (cs.n() != conn.n() || frame.n() != conn.n() || static_cast<std::size_t>(frame.W.cols()) != cs.dim())
    throw DomainError("complex structure, frame and connection disagree on n");
  if (conn.theta_ptr()->dim() != cs.dim()) throw DomainError("Theta size does not match the complex structure");
}

}  // namespace

std::vector<std::uint32_t> subsets_of_size(std::size_t n, std::size_t q) {
  std::vector<std::vector<std::size_t>> lists;
  std::vector<std::size_t> cur;
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (cur.size() == q) {
      lists.push_back(cur);
      return;
    }
    for (std::size_t j = start; j < n; ++j) {
      cur.push_back(j);
      self(self, j + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  std::vector<std::uint32_t> out;
  for (const auto& l : lists) {
    std::uint32_t mask = 0;
    for (auto j : l) mask |= 1u << j;
    out.push_back(mask);
  }
  return out;
}

FreeConnection::FreeConnection(std::size_t rank, std::vector<MatrixElement> terms)
    : rank_(rank), terms_(std::move(terms)) {
  if (rank_ == 0) throw DomainError("connection rank must be positive");
  if (terms_.empty()) throw DomainError("connection needs one term per antiholomorphic direction");
  theta_ = terms_.front().theta_ptr();
  for (const auto& t : terms_) {
    if (t.rank() != rank_) throw DomainError("connection terms must all have the module rank");
    for (const auto& e : t.entries()) {
      if (!e.same_context(terms_.front().entries().front()))
        throw ContextError("connection terms live over different Theta matrices");
    }
  }
  if (theta_->dim() != 2 * terms_.size()) throw DomainError("number of connection terms must be n = d / 2");
}

FreeConnection FreeConnection::trivial(ThetaPtr theta, std::size_t n, std::size_t rank) {
  std::vector<MatrixElement> terms(n, MatrixElement::zero(theta, rank));
  return FreeConnection(rank, std::move(terms));
}

FreeConnection FreeConnection::scalar_shift(ThetaPtr theta, std::size_t rank, const std::vector<cd>& c) {
  std::vector<MatrixElement> terms;
  for (const auto& cj : c) terms.push_back(MatrixElement::identity(theta, rank, cj));
  return FreeConnection(rank, std::move(terms));
}

bool FreeConnection::constant_coefficients() const {
  for (const auto& t : terms_)
    for (const auto& e : t.entries())
      if (!e.is_zero() && !e.is_scalar()) return false;
  return true;
}

bool FreeConnection::scalar_constant() const {
  if (!constant_coefficients()) return false;
  const Mode zero(theta_->dim(), 0);
  for (const auto& t : terms_) {
    const cd diag = t(0, 0).coefficient(zero);
    for (std::size_t i = 0; i < rank_; ++i)
      for (std::size_t j = 0; j < rank_; ++j) {
        const cd v = t(i, j).coefficient(zero);
        if (v != (i == j ? diag : cd(0.0))) return false;
      }
  }
  return true;
}

std::vector<cd> FreeConnection::scalar_values() const {
  const Mode zero(theta_->dim(), 0);
  std::vector<cd> c;
  for (const auto& t : terms_) c.push_back(t(0, 0).coefficient(zero));
  return c;
}

std::vector<Mode> FreeConnection::nonconstant_support() const {
  std::vector<Mode> out;
  const Mode zero(theta_->dim(), 0);
  for (const auto& t : terms_)
    for (const auto& e : t.entries())
      for (const auto& [m, c] : e.coeffs())
        if (m != zero) out.push_back(m);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int default_truncation(std::size_t n) { return n <= 2 ? 8 : 4; }

FourierElement dbar(const AntiholFrame& frame, std::size_t j, const FourierElement& a) {
  if (j >= frame.n()) throw DomainError("dbar direction out of range");
  if (static_cast<std::size_t>(frame.W.cols()) != a.dim()) throw DomainError("frame does not match lattice rank");
  FourierElement::Coefficients out;
  for (const auto& [m, c] : a.coeffs()) {
    cd f = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k) f += frame.W(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) * static_cast<double>(m[k]);
    out.emplace(m, cd(0.0, kTwoPi) * f * c);
  }
  return FourierElement(a.theta_ptr(), std::move(out));
}

Curvature flatness_curvature(const FreeConnection& conn, const AntiholFrame& frame) {
  const std::size_t n = conn.n();
  if (frame.n() != n) throw DomainError("frame and connection disagree on n");
  Curvature out;
  out.n = n;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      const auto dj_ak = map_entries(conn.term(k), [&](const FourierElement& x) { return dbar(frame, j, x); });
      const auto dk_aj = map_entries(conn.term(j), [&](const FourierElement& x) { return dbar(frame, k, x); });
      auto F = dj_ak - dk_aj + commutator(conn.term(j), conn.term(k));
      out.max_abs = std::max(out.max_abs, F.max_abs());
      out.F.push_back(std::move(F));
    }
  }
  out.is_flat = out.max_abs < kFlatTolerance;
  return out;
}

SpectralReport cohomology_dims(const ComplexStructure& cs, const AntiholFrame& frame, const FreeConnection& conn,
                               TruncationBox box, double tol_rel) {
  check_shapes(cs, frame, conn, box);
  const auto curv = flatness_curvature(conn, frame);
  if (!curv.is_flat) {
    std::ostringstream msg;
    msg << "connection is not flat (max curvature coefficient " << curv.max_abs << "); cohomology is undefined";
    throw NonFlatError(msg.str());
  }
  const auto a = cohomology_at(cs, frame, conn, box.N, tol_rel, true);
  const auto b = cohomology_at(cs, frame, conn, box.N + 2, tol_rel, false);
  SpectralReport rep;
  rep.N = box.N;
  rep.tol_rel = tol_rel;
  rep.degrees = a.degrees;
  rep.kernel_support_deg0 = a.support0;
  rep.fast_path = a.fast;
  bool first = true;
  for (std::size_t q = 0; q < a.degrees.size(); ++q) {
    const auto& dq = a.degrees[q];
    rep.dims.push_back(static_cast<long>(dq.kernel));
    rep.dims_next.push_back(static_cast<long>(b.degrees[q].kernel));
    rep.index += (q % 2 == 0 ? 1 : -1) * static_cast<long>(dq.kernel);
    if (dq.sigma_kept > 0.0 && (first || dq.sigma_kept < rep.sigma_kept)) {
      rep.sigma_kept = dq.sigma_kept;
      first = false;
    }
    rep.sigma_cut = std::max(rep.sigma_cut, dq.sigma_cut);
    rep.inconclusive = rep.inconclusive || dq.inconclusive || b.degrees[q].inconclusive;
  }
  rep.stable = rep.dims == rep.dims_next;
  return rep;
}

IndexReport index(const ComplexStructure& cs, const AntiholFrame& frame, const FreeConnection& conn, TruncationBox box,
                  double tol_rel) {
  check_shapes(cs, frame, conn, box);
  const auto a = index_at(cs, frame, conn, box.N, tol_rel);
  const auto b = index_at(cs, frame, conn, box.N + 2, tol_rel);
  IndexReport rep;
  rep.N = box.N;
  rep.tol_rel = tol_rel;
  rep.ker_even = a.ker_even;
  rep.ker_odd = a.ker_odd;
  rep.index = a.ker_even - a.ker_odd;
  rep.index_next = b.ker_even - b.ker_odd;
  rep.sigma_kept = a.kept;
  rep.sigma_cut = a.cut;
  rep.stable = rep.index == rep.index_next;
  rep.inconclusive = a.inconclusive || b.inconclusive;
  rep.fast_path = a.fast;
  return rep;
}

std::vector<long> kunneth_dims(const std::vector<long>& a, const std::vector<long>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<long> out(a.size() + b.size() - 1, 0);
  for (std::size_t k = 0; k < a.size(); ++k)
    for (std::size_t l = 0; l < b.size(); ++l) out[k + l] += a[k] * b[l];
  return out;
}

AntiholFrame block_adapted_frame(const AntiholFrame& frame) {
  if (frame.W.cols() == 2) return frame;
  const auto n = static_cast<Eigen::Index>(frame.n());
  Eigen::Index lead = -1;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (frame.W.row(j).tail(frame.W.cols() - 2).cwiseAbs().maxCoeff() <= kFlatTolerance) {
      lead = j;
      break;
    }
  }
  if (lead < 0) throw DomainError("no frame row is supported on the leading 2x2 block");
  AntiholFrame out;
  out.W.resize(frame.W.rows(), frame.W.cols());
  out.W.row(0) = frame.W.row(lead);
  out.pivots.push_back(frame.pivots[static_cast<std::size_t>(lead)]);
  Eigen::Index row = 1;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j == lead) continue;
    out.W.row(row++) = frame.W.row(j);
    out.pivots.push_back(frame.pivots[static_cast<std::size_t>(j)]);
  }
  return out;
}

FourierElement embed_element(const FourierElement& a, const ThetaPtr& big) {
  if (a.dim() != 2) throw DomainError("embedding expects an element of a rank-2 torus");
  FourierElement::Coefficients out;
  for (const auto& [m, c] : a.coeffs()) {
    Mode M(big->dim(), 0);
    M[0] = m[0];
    M[1] = m[1];
    out.emplace(std::move(M), c);
  }
  return FourierElement(big, std::move(out));
}

FreeConnection pushforward_connection(const ThetaMatrix& theta_small, const FreeConnection& conn_small,
                                      const ComplexStructure& big_cs, const AntiholFrame& big_frame,
                                      const ThetaPtr& big_theta) {
  if (theta_small.dim() != 2 || conn_small.n() != 1) throw DomainError("pushforward starts from an n = 1 torus");
  if (!(*conn_small.theta_ptr() == theta_small)) throw ContextError("small connection is not over theta_small");
  if (big_theta->dim() != big_cs.dim() || big_frame.n() != big_cs.n()) throw DomainError("target data disagree on n");
  if (std::abs(theta_small(0, 1) - (*big_theta)(0, 1)) > 1e-12) throw DomainError("theta_small must equal Theta_12");
  const auto& J = big_cs.J();
  const auto d = J.rows();
  if (d > 2 && (J.topRightCorner(2, d - 2).cwiseAbs().maxCoeff() > kFlatTolerance ||
                J.bottomLeftCorner(d - 2, 2).cwiseAbs().maxCoeff() > kFlatTolerance))
    throw DomainError("J is not block-diagonal with a 2x2 leading block");
  const auto& W = big_frame.W;
  if (d > 2) {
    if (W.row(0).tail(d - 2).cwiseAbs().maxCoeff() > kFlatTolerance ||
        W.bottomLeftCorner(W.rows() - 1, 2).cwiseAbs().maxCoeff() > kFlatTolerance)
      throw DomainError("frame is not block-adapted to the leading 2x2 block");
  }
  const ComplexStructure small_cs(J.topLeftCorner(2, 2), big_cs.tol());
  const auto small_frame = antihol_frame(small_cs);
  if ((W.row(0).head(2) - small_frame.W.row(0)).cwiseAbs().maxCoeff() > kFlatTolerance)
    throw DomainError("first frame row does not restrict to the small antiholomorphic frame");

  const std::size_t r = conn_small.rank();
  const auto& a = conn_small.term(0);
  std::vector<FourierElement> lifted;
  for (const auto& e : a.entries()) lifted.push_back(embed_element(e, big_theta));
  std::vector<MatrixElement> terms;
  terms.emplace_back(r, std::move(lifted));
  for (std::size_t j = 1; j < big_cs.n(); ++j) terms.push_back(MatrixElement::zero(big_theta, r));
  return FreeConnection(r, std::move(terms));
}

CooMatrix export_dq(const ComplexStructure& cs, const AntiholFrame& frame, const FreeConnection& conn,
                    TruncationBox box, std::size_t q) {
  check_shapes(cs, frame, conn, box);
  if (q >= conn.n()) throw DomainError("d_q exists only for q < n");
  const Complex cx(cs, frame, conn, box.N);
  const std::size_t cq = cx.basis.size(q), cq1 = cx.basis.size(q + 1);
  const std::size_t bq = cx.block(q), bq1 = cx.block(q + 1);
  std::map<std::pair<std::size_t, std::size_t>, cd> acc;
  std::vector<int> m(cx.d);
  for (std::size_t g = 0; g < cx.box.count; ++g) {
    cx.box.mode(g, m.data());
    cx.emit(q, m.data(), [&](std::size_t there, std::size_t row_off, std::size_t col_off, cd v) {
      const std::size_t fr = row_off / cq1, J = row_off % cq1;
      const std::size_t fc = col_off / cq, I = col_off % cq;
      for (std::size_t Jp = 0; Jp < cq1; ++Jp) {
        const cd left = cx.metric.up[q + 1](static_cast<Eigen::Index>(Jp), static_cast<Eigen::Index>(J));
        if (left == cd(0.0)) continue;
        for (std::size_t Ip = 0; Ip < cq; ++Ip) {
          const cd right = cx.metric.up_inv[q](static_cast<Eigen::Index>(I), static_cast<Eigen::Index>(Ip));
          if (right == cd(0.0)) continue;
          acc[{there * bq1 + fr * cq1 + Jp, g * bq + fc * cq + Ip}] += left * v * right;
        }
      }
    });
  }
  CooMatrix out;
  out.rows = cx.box.count * bq1;
  out.cols = cx.box.count * bq;
  for (const auto& [rc, v] : acc)
    if (std::abs(v) >= kPruneThreshold) out.entries.push_back({rc.first, rc.second, v.real(), v.imag()});
  return out;
}

}  // namespace nctorus
