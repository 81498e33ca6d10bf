#include "nctorus/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nctorus/errors.hpp"

namespace nctorus {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_context(const FourierElement& a, const FourierElement& b) {
  if (!a.same_context(b)) throw ContextError("Fourier elements live over different Theta matrices");
}

void accumulate(FourierElement::Coefficients& out, const Mode& m, cd c) {
  auto [it, inserted] = out.try_emplace(m, c);
  if (!inserted) it->second += c;
}

FourierElement::Coefficients pruned(FourierElement::Coefficients coeffs) {
  std::erase_if(coeffs, [](const auto& kv) { return std::abs(kv.second) < kPruneThreshold; });
  return coeffs;
}

}  // namespace

ThetaMatrix::ThetaMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) throw DomainError("Theta must be square");
  if (entries_.rows() == 0 || entries_.rows() % 2 != 0) throw DomainError("Theta must have even positive size d = 2n");
  for (Eigen::Index j = 0; j < entries_.rows(); ++j) {
    for (Eigen::Index k = 0; k < entries_.cols(); ++k) {
      if (entries_(j, k) + entries_(k, j) != 0.0) {
        std::ostringstream msg;
        msg << "Theta is not skew-symmetric at entries (" << j << "," << k << ") and (" << k << "," << j << ")";
        throw DomainError(msg.str());
      }
    }
  }
}

ThetaMatrix ThetaMatrix::from_row_major(std::size_t d, std::span<const double> values) {
  if (values.size() != d * d) throw DomainError("Theta needs d*d row-major values");
  Eigen::MatrixXd m(d, d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = 0; k < d; ++k) m(j, k) = values[j * d + k];
  return ThetaMatrix(std::move(m));
}

ThetaMatrix ThetaMatrix::product_blocks(std::span<const double> thetas) {
  const auto d = 2 * thetas.size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t b = 0; b < thetas.size(); ++b) {
    m(2 * b, 2 * b + 1) = thetas[b];
    m(2 * b + 1, 2 * b) = -thetas[b];
  }
  return ThetaMatrix(std::move(m));
}

ThetaMatrix ThetaMatrix::zero(std::size_t n_half) {
  return ThetaMatrix(Eigen::MatrixXd::Zero(2 * n_half, 2 * n_half));
}

ThetaMatrix ThetaMatrix::scaled(double t) const { return ThetaMatrix(t * entries_); }

double cocycle(const ThetaMatrix& theta, const Mode& m, const Mode& n) {
  double s = 0.0;
  const auto d = theta.dim();
  for (std::size_t j = 1; j < d; ++j) {
    if (m[j] == 0) continue;
    for (std::size_t k = 0; k < j; ++k) {
      if (n[k] != 0) s += theta(j, k) * m[j] * n[k];
    }
  }
  return s;
}

cd unit_phase(double x) {
  const double frac = x - std::floor(x);
  return std::polar(1.0, kTwoPi * frac);
}

cd cocycle_phase(const ThetaMatrix& theta, const Mode& m, const Mode& n) {
  return unit_phase(cocycle(theta, m, n));
}

FourierElement::FourierElement(ThetaPtr theta) : theta_(std::move(theta)) {
  if (!theta_) throw DomainError("null Theta context");
}

FourierElement::FourierElement(ThetaPtr theta, Coefficients coeffs)
    : theta_(std::move(theta)), coeffs_(pruned(std::move(coeffs))) {
  if (!theta_) throw DomainError("null Theta context");
  for (const auto& [m, c] : coeffs_) {
    if (m.size() != theta_->dim()) throw DomainError("mode length does not match lattice rank");
  }
}

FourierElement FourierElement::scalar(ThetaPtr theta, cd value) {
  const auto d = theta->dim();
  return FourierElement(std::move(theta), {{Mode(d, 0), value}});
}

FourierElement FourierElement::monomial(ThetaPtr theta, Mode m, cd value) {
  return FourierElement(std::move(theta), {{std::move(m), value}});
}

FourierElement FourierElement::generator(ThetaPtr theta, std::size_t j) {
  if (j >= theta->dim()) throw DomainError("generator index out of range");
  Mode m(theta->dim(), 0);
  m[j] = 1;
  return monomial(std::move(theta), std::move(m));
}

cd FourierElement::coefficient(const Mode& m) const {
  auto it = coeffs_.find(m);
  return it == coeffs_.end() ? cd{} : it->second;
}

bool FourierElement::is_scalar() const {
  if (coeffs_.empty()) return true;
  if (coeffs_.size() != 1) return false;
  const auto& m = coeffs_.begin()->first;
  return std::all_of(m.begin(), m.end(), [](int v) { return v == 0; });
}

double FourierElement::max_abs() const {
  double r = 0.0;
  for (const auto& [m, c] : coeffs_) r = std::max(r, std::abs(c));
  return r;
}

bool FourierElement::same_context(const FourierElement& other) const {
  return theta_ == other.theta_ || *theta_ == *other.theta_;
}

FourierElement operator+(const FourierElement& a, const FourierElement& b) {
  require_context(a, b);
  auto out = a.coeffs_;
  for (const auto& [m, c] : b.coeffs_) accumulate(out, m, c);
  return FourierElement(a.theta_, std::move(out));
}

FourierElement operator-(const FourierElement& a, const FourierElement& b) {
  return a + (cd{-1.0} * b);
}

FourierElement operator*(cd s, const FourierElement& a) {
  auto out = a.coeffs_;
  for (auto& [m, c] : out) c *= s;
  return FourierElement(a.theta_, std::move(out));
}

FourierElement operator*(const FourierElement& a, const FourierElement& b) { return multiply(a, b); }

FourierElement multiply(const FourierElement& a, const FourierElement& b) {
  require_context(a, b);
  const auto& theta = a.theta();
  const auto d = theta.dim();
  FourierElement::Coefficients out;
  Mode sum(d);
  for (const auto& [m, cm] : a.coeffs()) {
    for (const auto& [n, cn] : b.coeffs()) {
      for (std::size_t j = 0; j < d; ++j) sum[j] = m[j] + n[j];
      accumulate(out, sum, cm * cn * cocycle_phase(theta, m, n));
    }
  }
  return FourierElement(a.theta_ptr(), std::move(out));
}

FourierElement star(const FourierElement& a) {
  const auto& theta = a.theta();
  FourierElement::Coefficients out;
  for (const auto& [m, c] : a.coeffs()) {
    Mode neg(m.size());
    for (std::size_t j = 0; j < m.size(); ++j) neg[j] = -m[j];
    out.emplace(std::move(neg), std::conj(c) * cocycle_phase(theta, m, m));
  }
  return FourierElement(a.theta_ptr(), std::move(out));
}

cd trace(const FourierElement& a) { return a.coefficient(Mode(a.dim(), 0)); }

FourierElement derivation(std::size_t j, const FourierElement& a) {
  if (j >= a.dim()) throw DomainError("derivation direction out of range");
  auto out = a.coeffs();
  for (auto& [m, c] : out) c *= cd{0.0, kTwoPi * m[j]};
  return FourierElement(a.theta_ptr(), std::move(out));
}

FourierElement gauge_act(std::span<const cd> t, const FourierElement& a) {
  if (t.size() != a.dim()) throw DomainError("gauge parameter has wrong length");
  for (const auto& tj : t) {
    if (std::abs(std::abs(tj) - 1.0) > 1e-12) throw DomainError("gauge parameter is not unimodular");
  }
  auto out = a.coeffs();
  for (auto& [m, c] : out) {
    cd f = 1.0;
    for (std::size_t j = 0; j < m.size(); ++j) {
      // std::pow on complex is inexact even for integer exponents near the unit circle;
      // repeated multiplication keeps |f| = 1 to rounding.
      const cd base = m[j] >= 0 ? t[j] : std::conj(t[j]);
      for (int k = 0; k < std::abs(m[j]); ++k) f *= base;
    }
    c *= f;
  }
  return FourierElement(a.theta_ptr(), std::move(out));
}

cd inner(const FourierElement& a, const FourierElement& b) { return trace(multiply(star(b), a)); }

double distance(const FourierElement& a, const FourierElement& b) {
  require_context(a, b);
  double r = 0.0;
  for (const auto& [m, c] : a.coeffs()) r = std::max(r, std::abs(c - b.coefficient(m)));
  for (const auto& [m, c] : b.coeffs()) {
    if (!a.coeffs().contains(m)) r = std::max(r, std::abs(c));
  }
  return r;
}

MatrixElement::MatrixElement(ThetaPtr theta, std::size_t rank) : theta_(std::move(theta)), rank_(rank) {
  if (rank_ == 0) throw DomainError("matrix rank must be positive");
  entries_.assign(rank_ * rank_, FourierElement(theta_));
}

MatrixElement::MatrixElement(std::size_t rank, std::vector<FourierElement> entries)
    : rank_(rank), entries_(std::move(entries)) {
  if (rank_ == 0 || entries_.size() != rank_ * rank_) throw DomainError("matrix element needs rank*rank entries");
  theta_ = entries_.front().theta_ptr();
  for (const auto& e : entries_) {
    if (!e.same_context(entries_.front())) throw ContextError("matrix entries over different Theta matrices");
  }
}

MatrixElement MatrixElement::identity(ThetaPtr theta, std::size_t rank, cd scale) {
  std::vector<FourierElement> e(rank * rank, FourierElement(theta));
  for (std::size_t i = 0; i < rank; ++i) e[i * rank + i] = FourierElement::scalar(theta, scale);
  return MatrixElement(rank, std::move(e));
}

bool MatrixElement::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const auto& e) { return e.is_zero(); });
}

double MatrixElement::max_abs() const {
  double r = 0.0;
  for (const auto& e : entries_) r = std::max(r, e.max_abs());
  return r;
}

MatrixElement operator+(const MatrixElement& a, const MatrixElement& b) {
  if (a.rank_ != b.rank_) throw DomainError("matrix ranks differ");
  std::vector<FourierElement> e;
  e.reserve(a.entries_.size());
  for (std::size_t i = 0; i < a.entries_.size(); ++i) e.push_back(a.entries_[i] + b.entries_[i]);
  return MatrixElement(a.rank_, std::move(e));
}

MatrixElement operator-(const MatrixElement& a, const MatrixElement& b) {
  if (a.rank_ != b.rank_) throw DomainError("matrix ranks differ");
  std::vector<FourierElement> e;
  e.reserve(a.entries_.size());
  for (std::size_t i = 0; i < a.entries_.size(); ++i) e.push_back(a.entries_[i] - b.entries_[i]);
  return MatrixElement(a.rank_, std::move(e));
}

MatrixElement operator*(const MatrixElement& a, const MatrixElement& b) {
  if (a.rank_ != b.rank_) throw DomainError("matrix ranks differ");
  const auto r = a.rank_;
  std::vector<FourierElement> e;
  e.reserve(r * r);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      FourierElement acc(a.theta_);
      for (std::size_t k = 0; k < r; ++k) acc = acc + multiply(a(i, k), b(k, j));
      e.push_back(std::move(acc));
    }
  }
  return MatrixElement(r, std::move(e));
}

MatrixElement commutator(const MatrixElement& a, const MatrixElement& b) { return a * b - b * a; }

MatrixElement map_entries(const MatrixElement& a, const std::function<FourierElement(const FourierElement&)>& f) {
  std::vector<FourierElement> e;
  e.reserve(a.entries().size());
  for (const auto& x : a.entries()) e.push_back(f(x));
  return MatrixElement(a.rank(), std::move(e));
}

}  // namespace nctorus
