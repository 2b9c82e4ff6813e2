#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <sstream>
#include <vector>

#include "pseudolem/error.hpp"

namespace pseudolem {

inline constexpr int kMaxDegree = 64;

// Complex polynomial with coefficients stored in ascending degree.
// Trailing (leading-degree) exact zeros are trimmed so that the leading
// coefficient is nonzero unless the polynomial is identically zero.
class Polynomial {
 public:
  Polynomial() : coeffs_{Complex{0.0}} {}

  explicit Polynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw PreconditionError("polynomial needs at least one coefficient");
    for (const auto& c : coeffs_) {
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw PreconditionError("polynomial coefficient is not finite");
    }
    while (coeffs_.size() > 1 && coeffs_.back() == Complex{0.0}) coeffs_.pop_back();
    if (degree() > kMaxDegree) {
      std::ostringstream os;
      os << "polynomial degree " << degree() << " exceeds supported maximum " << kMaxDegree;
      throw PreconditionError(os.str());
    }
  }

  Polynomial(std::initializer_list<Complex> coeffs) : Polynomial(std::vector<Complex>(coeffs)) {}

  static Polynomial constant(Complex c) { return Polynomial(std::vector<Complex>{c}); }
  static Polynomial monomial(int n, Complex c = 1.0) {
    std::vector<Complex> v(static_cast<std::size_t>(n) + 1, Complex{0.0});
    v.back() = c;
    return Polynomial(std::move(v));
  }

  // leading * prod (z - r)
  static Polynomial from_roots(std::span<const Complex> roots, Complex leading = 1.0) {
    std::vector<Complex> c{leading};
    for (const auto& r : roots) {
      std::vector<Complex> next(c.size() + 1, Complex{0.0});
      for (std::size_t k = 0; k < c.size(); ++k) {
        next[k + 1] += c[k];
        next[k] -= r * c[k];
      }
      c = std::move(next);
    }
    return Polynomial(std::move(c));
  }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == Complex{0.0}; }
  const std::vector<Complex>& coeffs() const { return coeffs_; }
  Complex leading() const { return coeffs_.back(); }
  Complex operator[](std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : Complex{0.0}; }

  Complex operator()(Complex z) const {
    Complex acc = coeffs_.back();
    for (auto it = coeffs_.rbegin() + 1; it != coeffs_.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  // sum |a_k| |z|^k, the rounding scale of Horner evaluation at z.
  double eval_scale(Complex z) const {
    const double r = std::abs(z);
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * r + std::abs(*it);
    return acc;
  }

  double max_coeff() const {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<Complex> c(std::max(a.coeffs_.size(), b.coeffs_.size()), Complex{0.0});
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = a[k] + b[k];
    return Polynomial(std::move(c));
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    std::vector<Complex> c(std::max(a.coeffs_.size(), b.coeffs_.size()), Complex{0.0});
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = a[k] - b[k];
    return Polynomial(std::move(c));
  }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    std::vector<Complex> c(a.coeffs_.size() + b.coeffs_.size() - 1, Complex{0.0});
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return Polynomial(std::move(c));
  }
  friend Polynomial operator*(Complex s, const Polynomial& a) {
    std::vector<Complex> c = a.coeffs_;
    for (auto& x : c) x *= s;
    return Polynomial(std::move(c));
  }

  // p(s z)
  Polynomial scaled_argument(Complex s) const {
    std::vector<Complex> c = coeffs_;
    Complex f = 1.0;
    for (auto& x : c) {
      x *= f;
      f *= s;
    }
    return Polynomial(std::move(c));
  }

 private:
  std::vector<Complex> coeffs_;
};

inline Complex poly_eval(const Polynomial& p, Complex z) { return p(z); }

inline Polynomial poly_derivative(const Polynomial& p) {
  if (p.degree() == 0) return Polynomial{};
  std::vector<Complex> d(static_cast<std::size_t>(p.degree()));
  for (int k = 1; k <= p.degree(); ++k) d[static_cast<std::size_t>(k - 1)] = static_cast<double>(k) * p[static_cast<std::size_t>(k)];
  return Polynomial(std::move(d));
}

struct Root {
  Complex value;
  int multiplicity = 1;
};

namespace detail {

// Aberth-Ehrlich simultaneous iteration. Returns `degree` approximations; roots
// are considered converged once |p(z)| drops to the Horner rounding level.
inline std::vector<Complex> aberth(const Polynomial& p, int max_iter = 1000) {
  const int n = p.degree();
  const Polynomial dp = poly_derivative(p);
  const double eps = std::numeric_limits<double>::epsilon();

  // Initial radius: geometric mean of |a0/an|^(1/n) clamped by the Cauchy bound.
  const double an = std::abs(p.leading());
  double cauchy = 0.0;
  for (int k = 0; k < n; ++k) cauchy = std::max(cauchy, std::abs(p[static_cast<std::size_t>(k)]) / an);
  cauchy += 1.0;
  double radius = std::pow(std::abs(p[0]) / an, 1.0 / n);
  if (!(radius > 0.0) || !std::isfinite(radius)) radius = 1.0;
  radius = std::min(radius, cauchy);

  std::vector<Complex> z(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double ang = 2.0 * std::numbers::pi * k / n + 0.4;
    z[static_cast<std::size_t>(k)] = std::polar(radius, ang);
  }
  std::vector<bool> done(static_cast<std::size_t>(n), false);

  for (int iter = 0; iter < max_iter; ++iter) {
    bool all = true;
    for (int i = 0; i < n; ++i) {
      auto ui = static_cast<std::size_t>(i);
      if (done[ui]) continue;
      const Complex pz = p(z[ui]);
      if (std::abs(pz) <= 4.0 * eps * p.eval_scale(z[ui])) {
        done[ui] = true;
        continue;
      }
      all = false;
      const Complex ratio = pz / dp(z[ui]);
      Complex sum = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const Complex diff = z[ui] - z[static_cast<std::size_t>(j)];
        if (diff != Complex{0.0}) sum += 1.0 / diff;
      }
      Complex step = ratio / (1.0 - ratio * sum);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) step = Complex{1e-3 * (1.0 + std::abs(z[ui])), 1e-3};
      z[ui] -= step;
      if (std::abs(step) <= 2.0 * eps * std::max(1.0, std::abs(z[ui]))) done[ui] = true;
    }
    if (all) return z;
  }
  for (int i = 0; i < n; ++i) {
    auto ui = static_cast<std::size_t>(i);
    if (!done[ui] && std::abs(p(z[ui])) > 1e-8 * p.eval_scale(z[ui]))
      throw RootFindingError("root finder did not converge within iteration cap", z);
  }
  return z;
}

// Newton on the (m-1)-th derivative, where a root of multiplicity m is simple.
inline Complex polish_cluster(const Polynomial& p, Complex z, int m) {
  Polynomial g = p;
  for (int k = 1; k < m; ++k) g = poly_derivative(g);
  const Polynomial dg = poly_derivative(g);
  for (int it = 0; it < 20; ++it) {
    const Complex d = dg(z);
    if (std::abs(d) == 0.0) break;
    const Complex step = g(z) / d;
    z -= step;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(z))) break;
  }
  return z;
}

}  // namespace detail

// All roots with multiplicity. Approximations closer than tol * max(1, |z|)
// are merged into one root whose multiplicity is the cluster size.
inline std::vector<Root> poly_roots(const Polynomial& p, double tol = 1e-5) {
  if (p.degree() < 1) throw PreconditionError("poly_roots requires degree >= 1");
  if (!(tol > 0.0)) throw PreconditionError("poly_roots tolerance must be positive");

  // Exact zeros at the origin are split off first.
  int zero_mult = 0;
  while (p[static_cast<std::size_t>(zero_mult)] == Complex{0.0}) ++zero_mult;
  std::vector<Complex> reduced(p.coeffs().begin() + zero_mult, p.coeffs().end());
  const Polynomial q(std::move(reduced));

  std::vector<Complex> approx;
  if (q.degree() >= 1) approx = detail::aberth(q);

  // Single-linkage clustering.
  const std::size_t m = approx.size();
  std::vector<std::size_t> parent(m);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      const double scale = std::max(1.0, std::max(std::abs(approx[i]), std::abs(approx[j])));
      if (std::abs(approx[i] - approx[j]) <= tol * scale) parent[find(i)] = find(j);
    }

  std::vector<Root> out;
  if (zero_mult > 0) out.push_back({Complex{0.0}, zero_mult});
  std::vector<bool> used(m, false);
  for (std::size_t i = 0; i < m; ++i) {
    if (used[i]) continue;
    const std::size_t r = find(i);
    Complex sum = 0.0;
    int count = 0;
    for (std::size_t j = i; j < m; ++j)
      if (!used[j] && find(j) == r) {
        used[j] = true;
        sum += approx[j];
        ++count;
      }
    Complex center = sum / static_cast<double>(count);
    if (count > 1) center = detail::polish_cluster(q, center, count);
    out.push_back({center, count});
  }

  for (const auto& r : out) {
    if (std::abs(p(r.value)) > tol * std::max(1.0, p.eval_scale(r.value))) {
      std::vector<Complex> best;
      for (const auto& rr : out) best.push_back(rr.value);
      throw RootFindingError("root residual above tolerance", best);
    }
  }
  std::sort(out.begin(), out.end(), [](const Root& a, const Root& b) {
    if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
  });
  return out;
}

// Roots repeated according to multiplicity.
inline std::vector<Complex> expand_roots(const std::vector<Root>& roots) {
  std::vector<Complex> v;
  for (const auto& r : roots)
    for (int k = 0; k < r.multiplicity; ++k) v.push_back(r.value);
  return v;
}

inline std::vector<Complex> critical_points(const Polynomial& p, double tol = 1e-5) {
  if (p.degree() < 2) throw PreconditionError("critical_points requires degree >= 2");
  return expand_roots(poly_roots(poly_derivative(p), tol));
}

inline std::vector<Complex> critical_values(const Polynomial& p, double tol = 1e-5) {
  std::vector<Complex> v = critical_points(p, tol);
  for (auto& z : v) z = p(z);
  return v;
}

// Rotates the argument so that the leading coefficient becomes positive real:
// returns p(e^{i beta} z) with beta = -arg(a_n)/n, and beta itself.
inline std::pair<Polynomial, double> normalize_leading(const Polynomial& p) {
  if (p.degree() < 1) throw PreconditionError("normalize_leading requires degree >= 1");
  const double beta = -std::arg(p.leading()) / p.degree();
  Polynomial q = p.scaled_argument(std::polar(1.0, beta));
  // Remove the rounding residue in the leading coefficient's phase.
  std::vector<Complex> c = q.coeffs();
  c.back() = Complex{std::abs(c.back()), 0.0};
  return {Polynomial(std::move(c)), beta};
}

// Quotient num/den of polynomials. Common roots (matched at tolerance) are
// rejected rather than cancelled.
class RationalMap {
 public:
  RationalMap(Polynomial num, Polynomial den, double match_tol = 1e-8)
      : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw PreconditionError("rational map denominator is identically zero");
    if (num_.is_zero()) throw PreconditionError("rational map numerator is identically zero");
    dnum_ = poly_derivative(num_);
    dden_ = poly_derivative(den_);
    if (den_.degree() >= 1) {
      poles_ = poly_roots(den_);
      if (num_.degree() >= 1) {
        for (const auto& z : poly_roots(num_))
          for (const auto& pl : poles_)
            if (std::abs(z.value - pl.value) <= match_tol * std::max(1.0, std::abs(pl.value))) {
              std::ostringstream os;
              os << "numerator and denominator share a root near " << pl.value;
              throw PreconditionError(os.str());
            }
      }
    }
  }

  // Implicit: every polynomial is a rational map.
  RationalMap(const Polynomial& p) : RationalMap(p, Polynomial::constant(1.0)) {}  // NOLINT

  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }
  bool is_polynomial() const { return den_.degree() == 0; }
  const std::vector<Root>& poles() const { return poles_; }

  Complex operator()(Complex z) const {
    if (is_polynomial()) return num_(z) / den_[0];
    return num_(z) / den_(z);
  }

  Complex derivative(Complex z) const {
    if (is_polynomial()) return dnum_(z) / den_[0];
    const Complex d = den_(z);
    return (dnum_(z) * d - num_(z) * dden_(z)) / (d * d);
  }

  // Zeros of f - w, i.e. roots of num - w*den.
  std::vector<Root> preimages(Complex w, double tol = 1e-5) const {
    return poly_roots(num_ - w * den_, tol);
  }

  std::vector<Root> zeros(double tol = 1e-5) const { return poly_roots(num_, tol); }

  // Scale for critical-point thresholds: largest coefficient magnitude.
  double scale() const { return num_.max_coeff() / std::max(den_.max_coeff(), 1e-300); }

 private:
  Polynomial num_, den_, dnum_, dden_;
  std::vector<Root> poles_;
};

// z^2 (z+1) (z+3)
inline Polynomial f4() { return Polynomial{0.0, 0.0, 3.0, 4.0, 1.0}; }

}  // namespace pseudolem
