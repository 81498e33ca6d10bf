#include "nctorus/ktheory.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <map>

#include "nctorus/errors.hpp"

namespace nctorus {

namespace {

using Plucker = std::array<long, 6>;

// (a, b) index pairs in the order 12, 13, 14, 23, 24, 34.
constexpr int kPairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};

Plucker primitive_plucker(const Eigen::Vector4i& a, const Eigen::Vector4i& b, long* multiple = nullptr) {
  Plucker p{};
  long g = 0;
  for (int k = 0; k < 6; ++k) {
    const int i = kPairs[k][0], j = kPairs[k][1];
    p[k] = static_cast<long>(a(i)) * b(j) - static_cast<long>(a(j)) * b(i);
    g = std::gcd(g, std::abs(p[k]));
  }
  if (multiple) *multiple = g;
  if (g == 0) return p;
  long sign = 0;
  for (auto v : p)
    if (v != 0) {
      sign = v > 0 ? 1 : -1;
      break;
    }
  for (auto& v : p) v = sign * v / g;
  return p;
}

bool is_zero(const Plucker& p) {
  return std::all_of(p.begin(), p.end(), [](long v) { return v == 0; });
}

bool primitive_normalized(const Eigen::Vector4i& a) {
  int g = 0;
  for (int k = 0; k < 4; ++k) g = std::gcd(g, std::abs(a(k)));
  if (g != 1) return false;
  for (int k = 0; k < 4; ++k)
    if (a(k) != 0) return a(k) > 0;
  return false;
}

// Skew 4x4 K with alpha^T K beta = mu(dbar_1 ^ dbar_2).
Eigen::Matrix4cd pairing_matrix(const AntiholFrame& frame) {
  const Eigen::Vector4cd w1 = frame.W.row(0).transpose();
  const Eigen::Vector4cd w2 = frame.W.row(1).transpose();
  return w1 * w2.transpose() - w2 * w1.transpose();
}

void require_n2(const AntiholFrame& frame) {
  if (frame.W.rows() != 2 || frame.W.cols() != 4) throw DomainError("curvature functionals are defined for n = 2");
}

}  // namespace

K0Class::K0Class(std::size_t n, std::map<std::uint32_t, long> comps) : n_(n) {
  for (const auto& [s, v] : comps) {
    if (std::popcount(s) % 2 != 0) throw DomainError("K0 classes have only even-degree components");
    if (s >> (2 * n) != 0) throw DomainError("K0 component index outside {1..2n}");
    if (v != 0) comps_.emplace(s, v);
  }
}

K0Class K0Class::free(std::size_t n, long rank) { return K0Class(n, {{0u, rank}}); }

K0Class K0Class::standard_1d(long p, long q) { return K0Class(1, {{0u, p}, {3u, q}}); }

long K0Class::component(std::uint32_t subset) const {
  const auto it = comps_.find(subset);
  return it == comps_.end() ? 0 : it->second;
}

K0Class operator+(const K0Class& a, const K0Class& b) {
  if (a.n_ != b.n_) throw DomainError("K0 classes of different tori");
  auto comps = a.comps_;
  for (const auto& [s, v] : b.comps_) comps[s] += v;
  return K0Class(a.n_, std::move(comps));
}

long chern_top(const K0Class& k) {
  const std::uint32_t full = (k.n() >= 16) ? 0xffffffffu : ((1u << (2 * k.n())) - 1u);
  return k.component(full);
}

Eigen::Matrix4cd frame_bivector(const AntiholFrame& frame) {
  require_n2(frame);
  return pairing_matrix(frame);
}

cd curvature_functional(const AntiholFrame& frame, const Decomposable2Form& mu) {
  require_n2(frame);
  const Eigen::Vector4cd w1 = frame.W.row(0).transpose();
  const Eigen::Vector4cd w2 = frame.W.row(1).transpose();
  const Eigen::Vector4cd a = mu.alpha.cast<double>().cast<cd>();
  const Eigen::Vector4cd b = mu.beta.cast<double>().cast<cd>();
  return a.dot(w1) * b.dot(w2) - a.dot(w2) * b.dot(w1);
}

cd curvature_functional_top(const AntiholFrame& frame, const ThetaMatrix& theta) {
  require_n2(frame);
  if (theta.dim() != 4) throw DomainError("curvature functionals are defined for n = 2");
  const Eigen::Matrix4cd P = pairing_matrix(frame);
  auto p = [&](int a, int b) { return P(a, b); };
  auto t = [&](int a, int b) { return theta(static_cast<std::size_t>(a), static_cast<std::size_t>(b)); };
  return p(0, 1) * t(2, 3) - p(0, 2) * t(1, 3) + p(0, 3) * t(1, 2) + p(1, 2) * t(0, 3) - p(1, 3) * t(0, 2) +
         p(2, 3) * t(0, 1);
}

double nonalg_tolerance(const AntiholFrame& frame) {
  const double w = frame.W.cwiseAbs().maxCoeff();
  return 1e-9 * (1.0 + w) * (1.0 + w);
}

NonalgCertificate nonalg_certificate(const ComplexStructure& cs, const ThetaMatrix& theta, int bound, double tol) {
  if (cs.n() != 2 || theta.dim() != 4) throw DomainError("nonalg_certificate is defined for n = 2");
  if (bound < 1) throw DomainError("search bound must be at least 1");
  const auto frame = antihol_frame(cs);
  NonalgCertificate out;
  out.bound = bound;
  out.tol = tol > 0.0 ? tol : nonalg_tolerance(frame);
  const Eigen::Matrix4cd K = pairing_matrix(frame);
  const int B = bound;
  // Plucker class -> (slot in vanishing_pairs, wedge multiple of the stored pair).
  std::map<Plucker, std::pair<std::size_t, long>> seen;

  // u = K^T alpha, so alpha^T K beta = u . beta.
  auto record = [&](const Eigen::Vector4i& a, const Eigen::Vector4i& b, const Eigen::Vector4cd& u) {
    const cd v = u(0) * static_cast<double>(b(0)) + u(1) * static_cast<double>(b(1)) + u(2) * static_cast<double>(b(2)) +
                 u(3) * static_cast<double>(b(3));
    if (!(std::abs(v) < out.tol)) return;
    long mult = 0;
    const auto p = primitive_plucker(a, b, &mult);
    if (is_zero(p)) return;
    const auto [it, inserted] = seen.try_emplace(p, out.vanishing_pairs.size(), mult);
    if (inserted) {
      out.vanishing_pairs.push_back({a, b, std::abs(v)});
    } else if (mult < it->second.second) {
      // keep the representative closest to a lattice basis of the plane
      out.vanishing_pairs[it->second.first] = {a, b, std::abs(v)};
      it->second.second = mult;
    }
  };

  Eigen::Vector4i a;
  for (a(0) = -B; a(0) <= B; ++a(0))
    for (a(1) = -B; a(1) <= B; ++a(1))
      for (a(2) = -B; a(2) <= B; ++a(2))
        for (a(3) = -B; a(3) <= B; ++a(3)) {
          if (!primitive_normalized(a)) continue;
          // alpha^T K beta = u . beta; both real and imaginary parts must vanish.
          const Eigen::Vector4cd u = K.transpose() * a.cast<double>().cast<cd>();
          const double scale = u.cwiseAbs().maxCoeff();
          if (scale < out.tol) {
            for (int k = 0; k < 4; ++k) record(a, Eigen::Vector4i::Unit(k), u);
            continue;
          }
          // Pick the two coordinates whose real 2x2 system is best conditioned.
          int r1 = -1, r2 = -1;
          double best = 0.0;
          for (int x = 0; x < 4; ++x)
            for (int y = x + 1; y < 4; ++y) {
              const double det = std::abs(u(x).real() * u(y).imag() - u(y).real() * u(x).imag());
              if (det > best) {
                best = det;
                r1 = x;
                r2 = y;
              }
            }
          Eigen::Vector4i b;
          if (best > 1e-9 * scale * scale) {
            int free_idx[2], f = 0;
            for (int k = 0; k < 4; ++k)
              if (k != r1 && k != r2) free_idx[f++] = k;
            const double det = u(r1).real() * u(r2).imag() - u(r2).real() * u(r1).imag();
            for (int s = -B; s <= B; ++s)
              for (int t = -B; t <= B; ++t) {
                const cd rhs = -(static_cast<double>(s) * u(free_idx[0]) + static_cast<double>(t) * u(free_idx[1]));
                const double x = (rhs.real() * u(r2).imag() - u(r2).real() * rhs.imag()) / det;
                const double y = (u(r1).real() * rhs.imag() - rhs.real() * u(r1).imag()) / det;
                const long bx = std::lround(x), by = std::lround(y);
                if (std::abs(bx) > B || std::abs(by) > B) continue;
                b(free_idx[0]) = s;
                b(free_idx[1]) = t;
                b(r1) = static_cast<int>(bx);
                b(r2) = static_cast<int>(by);
                record(a, b, u);
              }
          } else {
            // Real and imaginary conditions are proportional: one real equation in four unknowns.
            int piv = 0;
            bool use_real = true;
            double pv = 0.0;
            for (int k = 0; k < 4; ++k) {
              if (std::abs(u(k).real()) > pv) { pv = std::abs(u(k).real()); piv = k; use_real = true; }
              if (std::abs(u(k).imag()) > pv) { pv = std::abs(u(k).imag()); piv = k; use_real = false; }
            }
            auto part = [&](int k) { return use_real ? u(k).real() : u(k).imag(); };
            int others[3], o = 0;
            for (int k = 0; k < 4; ++k)
              if (k != piv) others[o++] = k;
            for (int s = -B; s <= B; ++s)
              for (int t = -B; t <= B; ++t)
                for (int w = -B; w <= B; ++w) {
                  const double rest = s * part(others[0]) + t * part(others[1]) + w * part(others[2]);
                  const long bp = std::lround(-rest / part(piv));
                  if (std::abs(bp) > B) continue;
                  b(others[0]) = s;
                  b(others[1]) = t;
                  b(others[2]) = w;
                  b(piv) = static_cast<int>(bp);
                  record(a, b, u);
                }
          }
        }

  out.top_value = curvature_functional_top(frame, theta);
  out.top_nonzero = std::abs(out.top_value) >= out.tol;
  out.certified = out.vanishing_pairs.empty() && out.top_nonzero;
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Hand-rolled rather than std distributions so samples are identical across standard libraries.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double gaussian(std::mt19937_64& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

ComplexStructure random_complex_structure(std::size_t n, std::mt19937_64& rng) {
  const auto d = static_cast<Eigen::Index>(2 * n);
  const Eigen::MatrixXd J0 = ComplexStructure::standard(n).J();
  for (;;) {
    Eigen::MatrixXd S(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) S(i, j) = gaussian(rng);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(S);
    const auto& sv = svd.singularValues();
    if (sv(d - 1) < 1e-2 * sv(0)) continue;
    Eigen::MatrixXd J = S * J0 * S.inverse();
    return ComplexStructure(std::move(J));
  }
}

ThetaMatrix random_theta(std::size_t n, std::mt19937_64& rng) {
  const auto d = static_cast<Eigen::Index>(2 * n);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j) {
      T(i, j) = 2.0 * uniform01(rng) - 1.0;
      T(j, i) = -T(i, j);
    }
  return ThetaMatrix(std::move(T));
}

}  // namespace nctorus
