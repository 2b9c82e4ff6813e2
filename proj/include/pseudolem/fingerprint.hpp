#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "pseudolem/conformal.hpp"
#include "pseudolem/curve.hpp"
#include "pseudolem/error.hpp"
#include "pseudolem/polynomial.hpp"
#include "pseudolem/trig.hpp"

namespace pseudolem {

// Lift L of a degree-d circle map, sampled at t_k = 2 pi k / M and
// interpolated trigonometrically in L(t) - d t.
class CircleMap {
 public:
  CircleMap() = default;

  explicit CircleMap(std::vector<double> values, int degree = 1) : values_(std::move(values)), degree_(degree) {
    const double two_pi = 2.0 * std::numbers::pi;
    if (degree_ < 1) throw PreconditionError("circle map degree must be positive");
    if (values_.size() < 4) throw PreconditionError("circle map needs at least four samples");
    for (std::size_t k = 0; k < values_.size(); ++k) {
      const double next = k + 1 < values_.size() ? values_[k + 1] : values_[0] + two_pi * degree_;
      if (!std::isfinite(values_[k]) || !(next > values_[k])) {
        std::ostringstream os;
        os << "circle map lift is not strictly increasing at sample " << k;
        throw PreconditionError(os.str());
      }
    }
    const std::vector<double> t = uniform_angles(values_.size());
    std::vector<double> periodic(values_.size());
    for (std::size_t k = 0; k < values_.size(); ++k) periodic[k] = values_[k] - degree_ * t[k];
    periodic_ = TrigInterpolant::from_real(periodic);
  }

  int degree() const { return degree_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  double total_increase() const { return 2.0 * std::numbers::pi * degree_; }

  double operator()(double t) const { return degree_ * t + periodic_(t).real(); }
  double derivative(double t) const { return degree_ + periodic_.derivative(t).real(); }

  // Real t with L(t) = y.
  double inverse(double y) const {
    const double two_pi = 2.0 * std::numbers::pi;
    const double period = two_pi * degree_;
    const double shift = std::floor((y - values_[0]) / period);
    const double yr = y - shift * period;
    auto it = std::upper_bound(values_.begin(), values_.end(), yr);
    const std::size_t k = static_cast<std::size_t>(it - values_.begin()) - 1;
    const double h = two_pi / static_cast<double>(values_.size());
    double lo = h * static_cast<double>(k), hi = lo + h;
    const double v_hi = k + 1 < values_.size() ? values_[k + 1] : values_[0] + period;
    double t = lo + h * (yr - values_[k]) / (v_hi - values_[k]);
    for (int iter = 0; iter < 60; ++iter) {
      const double g = (*this)(t) - yr;
      if (std::abs(g) < 1e-15) break;
      if (g > 0) hi = std::min(hi, t);
      else lo = std::max(lo, t);
      double next = t - g / derivative(t);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - t) < 1e-16) break;
      t = next;
    }
    return t + shift * two_pi;
  }

  // Smallest increment between consecutive samples of the lift.
  double min_increment() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < values_.size(); ++k) {
      const double next = k + 1 < values_.size() ? values_[k + 1] : values_[0] + total_increase();
      m = std::min(m, next - values_[k]);
    }
    return m;
  }

 private:
  std::vector<double> values_;
  int degree_ = 1;
  TrigInterpolant periodic_;
};

// Lift from M samples of a function of t that is continuous up to 2 pi jumps.
inline CircleMap circle_map_from_samples(std::vector<double> values, int degree) {
  for (std::size_t k = 1; k < values.size(); ++k)
    values[k] = values[k - 1] + std::remainder(values[k] - values[k - 1], 2.0 * std::numbers::pi);
  return CircleMap(std::move(values), degree);
}

// Degree-1 map with lift m / n + 2 pi branch / n.
inline CircleMap nth_root_lift(const CircleMap& m, int n, int branch = 0) {
  if (n < 1 || m.degree() != n) throw PreconditionError("nth_root_lift needs a lift of degree n");
  std::vector<double> v(m.values());
  for (auto& x : v) x = x / n + 2.0 * std::numbers::pi * branch / n;
  return CircleMap(std::move(v), 1);
}

struct BlaschkeProduct {
  std::vector<Complex> zeros;
  Complex rotation{1.0};

  int degree() const { return static_cast<int>(zeros.size()); }

  void validate() const {
    if (std::abs(std::abs(rotation) - 1.0) > 1e-12) throw PreconditionError("Blaschke rotation must be unimodular");
    for (const auto& a : zeros)
      if (!(std::abs(a) < 1.0)) throw PreconditionError("Blaschke zeros must lie inside the unit disk");
  }
};

inline Complex blaschke_eval(const BlaschkeProduct& b, Complex z) {
  b.validate();
  Complex acc = b.rotation;
  for (const auto& a : b.zeros) {
    const Complex den = 1.0 - std::conj(a) * z;
    if (std::abs(den) < 1e-14) throw PreconditionError("blaschke_eval at a pole");
    acc *= (z - a) / den;
  }
  return acc;
}

// Continuous lift of theta -> arg B(e^{i theta}).
inline double blaschke_lift(const BlaschkeProduct& b, double theta) {
  double acc = std::arg(b.rotation);
  const Complex e = std::polar(1.0, theta);
  for (const auto& a : b.zeros) acc += theta - 2.0 * std::arg(1.0 - std::conj(a) * e);
  return acc;
}

inline CircleMap circle_map_of_blaschke(const BlaschkeProduct& b, std::size_t samples = 512) {
  b.validate();
  if (b.degree() < 1) throw PreconditionError("Blaschke product must have degree >= 1");
  const std::vector<double> t = uniform_angles(samples);
  std::vector<double> v(samples);
  for (std::size_t k = 0; k < samples; ++k) v[k] = blaschke_lift(b, t[k]);
  return CircleMap(std::move(v), b.degree());
}

// k = phi_+^{-1} o phi_- sampled at `samples` angles.
inline CircleMap fingerprint_from_maps(const DiskMap& inner, const ExteriorMap& outer, std::size_t samples) {
  const std::vector<double> th = uniform_angles(samples);
  std::vector<double> v(samples);
  for (std::size_t k = 0; k < samples; ++k) v[k] = outer.theta_at(inner.parameter_of(th[k]));
  return circle_map_from_samples(std::move(v), 1);
}

inline CircleMap fingerprint_of_curve(const SampledCurve& gamma, std::size_t nodes = 512, Complex center = 0.0) {
  return fingerprint_from_maps(interior_map(gamma, nodes, center), exterior_map(gamma, nodes, center), nodes);
}

// Every finite critical value of p lies inside gamma.
inline bool is_proper(const Polynomial& p, const SampledCurve& gamma) {
  if (p.degree() < 1) throw PreconditionError("is_proper needs degree >= 1");
  if (!gamma.closed()) throw PreconditionError("is_proper needs a closed curve");
  if (p.degree() == 1) return true;
  for (const auto& cv : critical_values(p))
    if (winding_number(gamma, cv) != gamma.orientation()) return false;
  return true;
}

namespace detail {

// Crossing-rule winding number (no angle sums).
inline int crossing_winding(const std::vector<Complex>& poly, Complex w) {
  int wn = 0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Complex a = poly[i], b = poly[(i + 1) % n];
    const double left = (b.real() - a.real()) * (w.imag() - a.imag()) - (w.real() - a.real()) * (b.imag() - a.imag());
    if (a.imag() <= w.imag()) {
      if (b.imag() > w.imag() && left > 0) ++wn;
    } else if (b.imag() <= w.imag() && left < 0) {
      --wn;
    }
  }
  return wn;
}

}  // namespace detail

struct ProperGrid {
  int cells = 200;           // cells along the longer side of the box
  int max_refinements = 2;   // extra doublings allowed to reach a stable count
};

struct ProperOracleResult {
  bool proper = false;
  int components = 0;
  int cells = 0;  // resolution that produced a stable count
};

namespace detail {

inline int count_inside_components(const Polynomial& p, const std::vector<Complex>& poly, double rmax,
                                   const std::vector<Complex>& roots, bool zero_inside, Complex lo, Complex hi,
                                   int cells, bool& roots_ok) {
  const double span = std::max(hi.real() - lo.real(), hi.imag() - lo.imag());
  const double dx = span / cells;
  const int nx = std::max(1, static_cast<int>(std::ceil((hi.real() - lo.real()) / dx)));
  const int ny = std::max(1, static_cast<int>(std::ceil((hi.imag() - lo.imag()) / dx)));
  std::vector<char> inside(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), 0);
  auto idx = [&](int i, int j) { return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i); };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const Complex z{lo.real() + (i + 0.5) * dx, lo.imag() + (j + 0.5) * dx};
      const Complex w = p(z);
      if (std::abs(w) > rmax) continue;
      inside[idx(i, j)] = crossing_winding(poly, w) != 0;
    }
  roots_ok = true;
  if (zero_inside)
    for (const auto& r : roots) {
      const int i = std::clamp(static_cast<int>((r.real() - lo.real()) / dx), 0, nx - 1);
      const int j = std::clamp(static_cast<int>((r.imag() - lo.imag()) / dx), 0, ny - 1);
      if (!inside[idx(i, j)]) roots_ok = false;
    }
  int comps = 0;
  std::vector<char> seen(inside.size(), 0);
  std::vector<std::pair<int, int>> stack;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (!inside[idx(i, j)] || seen[idx(i, j)]) continue;
      ++comps;
      stack.push_back({i, j});
      seen[idx(i, j)] = 1;
      while (!stack.empty()) {
        const auto [a, b] = stack.back();
        stack.pop_back();
        const int nb[4][2] = {{a + 1, b}, {a - 1, b}, {a, b + 1}, {a, b - 1}};
        for (const auto& q : nb) {
          if (q[0] < 0 || q[1] < 0 || q[0] >= nx || q[1] >= ny) continue;
          const std::size_t k = idx(q[0], q[1]);
          if (inside[k] && !seen[k]) {
            seen[k] = 1;
            stack.push_back({q[0], q[1]});
          }
        }
      }
    }
  return comps;
}

}  // namespace detail

// Counts connected components of p^{-1}(inside of gamma) on a square grid
// covering every point where |p| can be as small as max |gamma|.
inline ProperOracleResult is_proper_oracle_detail(const Polynomial& p, const SampledCurve& gamma,
                                                  const ProperGrid& grid = {}) {
  if (p.degree() < 1) throw PreconditionError("is_proper_oracle needs degree >= 1");
  if (!gamma.closed()) throw PreconditionError("is_proper_oracle needs a closed curve");
  if (grid.cells < 8) throw PreconditionError("is_proper_oracle grid is too coarse");
  const std::vector<Complex> roots = expand_roots(poly_roots(p));
  const double rmax = gamma.max_modulus();
  const double reach = 1.05 * std::pow(rmax / std::abs(p.leading()), 1.0 / p.degree());
  Complex lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Complex hi = -lo;
  for (const auto& r : roots) {
    lo = {std::min(lo.real(), r.real()), std::min(lo.imag(), r.imag())};
    hi = {std::max(hi.real(), r.real()), std::max(hi.imag(), r.imag())};
  }
  lo -= Complex{reach, reach};
  hi += Complex{reach, reach};
  const bool zero_inside = detail::crossing_winding(gamma.points(), 0.0) != 0;

  int cells = grid.cells;
  bool ok = false;
  int prev = detail::count_inside_components(p, gamma.points(), rmax, roots, zero_inside, lo, hi, cells, ok);
  bool prev_ok = ok;
  for (int r = 0; r <= grid.max_refinements; ++r) {
    cells *= 2;
    const int cur = detail::count_inside_components(p, gamma.points(), rmax, roots, zero_inside, lo, hi, cells, ok);
    if (cur == prev && ok && prev_ok && cur > 0) return {cur == 1, cur, cells / 2};
    prev = cur;
    prev_ok = ok;
  }
  std::ostringstream os;
  os << "is_proper_oracle: component count not stable up to " << cells << " cells";
  throw NumericalError(os.str());
}

inline bool is_proper_oracle(const Polynomial& p, const SampledCurve& gamma, const ProperGrid& grid = {}) {
  return is_proper_oracle_detail(p, gamma, grid).proper;
}

namespace detail {

struct PreimageTrace {
  std::vector<Complex> points;  // one closed component, samples_per_lap per lap
  int laps = 0;
};

// Follows p(z(t)) = G(t) from z0 until z returns to z0 at the end of a lap.
inline PreimageTrace trace_preimage(const Polynomial& p, const TrigInterpolant& g, Complex z0, std::size_t m,
                                    int max_laps, double size) {
  const Polynomial dp = poly_derivative(p);
  const std::vector<Complex> crit = p.degree() >= 2 ? critical_points(p) : std::vector<Complex>{};
  auto newton = [&](Complex z, Complex target, bool& ok) {
    ok = false;
    for (int it = 0; it < 12; ++it) {
      const Complex r = p(z) - target;
      if (std::abs(r) <= 1e-14 * std::max(1.0, std::abs(target))) {
        ok = true;
        return z;
      }
      const Complex d = dp(z);
      if (std::abs(d) < 1e-300) return z;
      z -= r / d;
    }
    ok = std::abs(p(z) - target) <= 1e-12 * std::max(1.0, std::abs(target));
    return z;
  };
  auto feature = [&](Complex z) {
    double d = size;
    for (const auto& c : crit) d = std::min(d, std::abs(z - c));
    return d;
  };
  auto field = [&](double s, Complex x) {
    const Complex d = dp(x);
    if (std::abs(d) < 1e-14 * std::max(1.0, p.max_coeff()))
      throw CriticalPointError("preimage trace hit a critical point", x);
    return g.derivative(s) / d;
  };

  bool ok = false;
  Complex z = newton(z0, g(0.0), ok);
  const Complex start = z;
  PreimageTrace out;
  out.points.push_back(z);
  const double dt = 2.0 * std::numbers::pi / static_cast<double>(m);
  for (std::size_t k = 1; k <= m * static_cast<std::size_t>(max_laps); ++k) {
    const double t_end = dt * static_cast<double>(k);
    double t = t_end - dt;
    double h = dt;
    while (t < t_end - 1e-15) {
      h = std::min(h, t_end - t);
      const Complex k1 = field(t, z);
      const Complex k2 = field(t + 0.5 * h, z + 0.5 * h * k1);
      const Complex k3 = field(t + 0.5 * h, z + 0.5 * h * k2);
      const Complex k4 = field(t + h, z + h * k3);
      const Complex pred = z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      const Complex corr = newton(pred, g(t + h), ok);
      if (!ok || std::abs(corr - z) > 0.05 * feature(z)) {
        h *= 0.5;
        if (h < 1e-12) throw CriticalPointError("preimage trace stalled", z);
        continue;
      }
      z = corr;
      t += h;
      h *= 2.0;
    }
    if (k % m == 0 && std::abs(z - start) <= 1e-8 * size) {
      out.laps = static_cast<int>(k / m);
      return out;
    }
    out.points.push_back(z);
  }
  throw NumericalError("preimage trace did not close within deg(p) laps");
}

inline double trace_size(const SampledCurve& gamma) { return std::max(1.0, gamma.diameter()); }

}  // namespace detail

// p^{-1}(gamma) traced by continuation of p(z(t)) = G(t) over deg(p) laps of
// the trigonometric interpolant G of gamma. The output is sampled uniformly in
// t, `samples_per_lap` points per lap.
inline SampledCurve pseudo_lemniscate(const Polynomial& p, const SampledCurve& gamma, std::size_t samples_per_lap = 0) {
  if (p.degree() < 1) throw PreconditionError("pseudo_lemniscate needs degree >= 1");
  if (!is_proper(p, gamma))
    throw PreconditionError("pseudo_lemniscate needs a proper polynomial (a critical value lies outside gamma)");
  const TrigInterpolant g(gamma.points());
  const std::size_t m = samples_per_lap ? samples_per_lap : std::max<std::size_t>(gamma.size(), 512);
  const Complex z0 = poly_roots(p - Polynomial::constant(g(0.0))).front().value;
  detail::PreimageTrace tr = detail::trace_preimage(p, g, z0, m, p.degree(), detail::trace_size(gamma));
  if (tr.laps != p.degree()) {
    std::ostringstream os;
    os << "pseudo_lemniscate closed after " << tr.laps << " of " << p.degree() << " laps";
    throw NumericalError(os.str());
  }
  return SampledCurve(std::move(tr.points), true);
}

// All components of p^{-1}(gamma), one per cycle of the monodromy over gamma.
// Used to draw improper cases, where the preimage is not a single curve.
inline std::vector<SampledCurve> pseudo_lemniscate_components(const Polynomial& p, const SampledCurve& gamma,
                                                              std::size_t samples_per_lap = 0) {
  if (p.degree() < 1) throw PreconditionError("pseudo_lemniscate_components needs degree >= 1");
  const TrigInterpolant g(gamma.points());
  const std::size_t m = samples_per_lap ? samples_per_lap : std::max<std::size_t>(gamma.size(), 512);
  const double size = detail::trace_size(gamma);
  const std::vector<Complex> starts = expand_roots(poly_roots(p - Polynomial::constant(g(0.0))));
  std::vector<SampledCurve> out;
  std::vector<Complex> used;
  for (const auto& z0 : starts) {
    bool seen = false;
    for (const auto& u : used)
      if (std::abs(u - z0) <= 1e-7 * size) seen = true;
    if (seen) continue;
    detail::PreimageTrace tr = detail::trace_preimage(p, g, z0, m, p.degree(), size);
    for (int lap = 0; lap < tr.laps; ++lap) used.push_back(tr.points[static_cast<std::size_t>(lap) * m]);
    out.emplace_back(std::move(tr.points), true);
  }
  return out;
}

// Everything needed to compare k_p with (k_Gamma o B)^{1/n}.
struct FingerprintModel {
  Polynomial p;       // leading coefficient made positive
  double beta = 0.0;  // p(z) = input(e^{i beta} z)
  SampledCurve lemniscate;
  Complex lemniscate_center{0.0};
  DiskMap gamma_in, lemniscate_in;
  ExteriorMap gamma_out, lemniscate_out;
  CircleMap k_gamma, k_p;
  BlaschkeProduct blaschke;
};

inline Complex lemniscate_center(const Polynomial& p, const SampledCurve& lem) {
  if (winding_number(lem, 0.0) == 1) return 0.0;
  return poly_roots(p).front().value;
}

// B = phi_-^{-1} o p o phi_{p-}: zeros are phi_{p-}^{-1} of the zeros of p and
// the rotation matches the composition at theta = 0.
inline BlaschkeProduct blaschke_from_maps(const Polynomial& p, const DiskMap& gamma_in, const DiskMap& lem_in) {
  BlaschkeProduct b;
  for (const auto& r : poly_roots(p))
    for (int k = 0; k < r.multiplicity; ++k) b.zeros.push_back(map_interior_inverse(lem_in, r.value));
  const Complex z1 = lem_in.boundary_point(0.0);
  const double th = gamma_in.boundary_theta(p(z1));
  Complex at_one = 1.0;
  for (const auto& a : b.zeros) at_one *= (1.0 - a) / (1.0 - std::conj(a));
  b.rotation = std::polar(1.0, th - std::arg(at_one));
  return b;
}

inline FingerprintModel fingerprint_model(const Polynomial& input, const SampledCurve& gamma, std::size_t nodes = 512) {
  if (input.degree() < 1) throw PreconditionError("fingerprint model needs degree >= 1");
  if (winding_number(gamma, 0.0) != 1) throw PreconditionError("gamma must be positively oriented around 0");
  auto [p, beta] = normalize_leading(input);
  SampledCurve lem = pseudo_lemniscate(p, gamma);
  const Complex c = lemniscate_center(p, lem);
  DiskMap gin = interior_map(gamma, nodes);
  ExteriorMap gout = exterior_map(gamma, nodes);
  DiskMap lin = interior_map(lem, nodes, c);
  ExteriorMap lout = exterior_map(lem, nodes, c);
  CircleMap kg = fingerprint_from_maps(gin, gout, nodes);
  CircleMap kp = fingerprint_from_maps(lin, lout, nodes);
  BlaschkeProduct b = blaschke_from_maps(p, gin, lin);
  return {std::move(p), beta, std::move(lem), c, std::move(gin), std::move(lin), std::move(gout), std::move(lout),
          std::move(kg), std::move(kp), std::move(b)};
}

inline BlaschkeProduct blaschke_model(const Polynomial& p, const SampledCurve& gamma, std::size_t nodes = 512) {
  return fingerprint_model(p, gamma, nodes).blaschke;
}

inline CircleMap fingerprint_of_pseudolemniscate(const Polynomial& p, const SampledCurve& gamma,
                                                 std::size_t nodes = 512) {
  return fingerprint_model(p, gamma, nodes).k_p;
}

// max over sample angles of the circle distance between n k_p(theta) and
// k_Gamma(lift_B(theta)). Branch classes of the n-th root differ by 2 pi / n
// in k_p, which vanish after multiplying by n.
inline double identity_residual(int n, const std::function<double(double)>& k_p,
                                const std::function<double(double)>& k_gamma,
                                const std::function<double(double)>& lift_b, std::size_t samples) {
  const std::vector<double> th = uniform_angles(samples);
  double worst = 0.0;
  for (double t : th) {
    const double lhs = n * k_p(t);
    const double rhs = k_gamma(lift_b(t));
    worst = std::max(worst, std::abs(std::remainder(lhs - rhs, 2.0 * std::numbers::pi)));
  }
  return worst;
}

inline double verify_identity(const FingerprintModel& m, std::size_t samples = 512) {
  return identity_residual(
      m.p.degree(), [&](double t) { return m.k_p(t); }, [&](double t) { return m.k_gamma(t); },
      [&](double t) { return blaschke_lift(m.blaschke, t); }, samples);
}

inline double verify_identity(const Polynomial& p, const SampledCurve& gamma, std::size_t samples = 512,
                              std::size_t nodes = 512) {
  return verify_identity(fingerprint_model(p, gamma, nodes), samples);
}

}  // namespace pseudolem
