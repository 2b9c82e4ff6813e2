#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "pseudolem/curve.hpp"
#include "pseudolem/error.hpp"
#include "pseudolem/trig.hpp"

namespace pseudolem {

namespace detail {

// Interior Riemann map of a smooth Jordan domain from N boundary nodes at a
// uniform parameter, via the Kerzman-Stein integral equation for the Szego
// kernel discretized by the trapezoid rule.
struct SzegoSolution {
  std::vector<double> theta;  // unwrapped arg of the map at each node
  double center_derivative = 0.0;
  double residual = 0.0;
};

inline SzegoSolution solve_szego(const std::vector<Complex>& z, const std::vector<Complex>& dz, Complex a) {
  const std::size_t n = z.size();
  const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
  const Complex two_pi_i{0.0, 2.0 * std::numbers::pi};
  std::vector<double> ds(n), sq(n);
  std::vector<Complex> tangent(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double speed = std::abs(dz[j]);
    if (!(speed > 0.0)) throw PreconditionError("boundary parametrization has zero speed");
    tangent[j] = dz[j] / speed;
    ds[j] = speed * h;
    sq[j] = std::sqrt(ds[j]);
  }
  // Cauchy kernel: (Cg)(z_i) = sum_j cauchy(i, j) g(z_j) ds_j.
  auto cauchy = [&](std::size_t i, std::size_t j) { return tangent[j] / (two_pi_i * (z[j] - z[i])); };

  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Eigen::VectorXcd rhs(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Complex aij = std::conj(cauchy(j, i)) - cauchy(i, j);
      const Complex kij = sq[i] * sq[j] * aij;
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = kij;
      m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = -std::conj(kij);
    }
    rhs(static_cast<Eigen::Index>(i)) = sq[i] * std::conj(tangent[i] / (two_pi_i * (z[i] - a)));
  }
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  const Eigen::VectorXcd x = lu.solve(rhs);

  SzegoSolution sol;
  sol.residual = (m * x - rhs).cwiseAbs().maxCoeff() / std::max(rhs.cwiseAbs().maxCoeff(), 1e-300);
  double saa = 0.0;
  sol.theta.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Complex s = x(static_cast<Eigen::Index>(j)) / sq[j];
    saa += std::norm(x(static_cast<Eigen::Index>(j)));
    const Complex fz = Complex{0.0, -1.0} * tangent[j] * s / std::conj(s);
    double th = std::arg(fz);
    if (j > 0) {
      const double prev = sol.theta[j - 1];
      th = prev + std::remainder(th - prev, 2.0 * std::numbers::pi);
    }
    sol.theta[j] = th;
  }
  sol.center_derivative = 1.0 / (2.0 * std::numbers::pi * saa);
  for (std::size_t j = 1; j < n; ++j)
    if (!(sol.theta[j] > sol.theta[j - 1])) {
      std::ostringstream os;
      os << "conformal solve lost monotonicity at node " << j << " (solver residual " << sol.residual << ")";
      throw NumericalError(os.str());
    }
  if (!(sol.theta.back() - sol.theta.front() < 2.0 * std::numbers::pi)) throw NumericalError("conformal solve: boundary arg exceeds one turn");
  return sol;
}

inline std::vector<Complex> derivative_samples(const TrigInterpolant& c, std::size_t n) {
  std::vector<Complex> out(n);
  const std::vector<double> t = uniform_angles(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = c.derivative(t[j]);
  return out;
}

}  // namespace detail

// Boundary correspondence theta(t) between the unit circle and a curve Z(t),
// t in [0, 2 pi), shared by interior and exterior maps.
class BoundaryCorrespondence {
 public:
  const TrigInterpolant& curve() const { return curve_; }
  const std::vector<double>& theta_nodes() const { return theta_; }
  std::size_t nodes() const { return theta_.size(); }
  Complex center() const { return center_; }
  double solver_residual() const { return residual_; }

  // theta at curve parameter t (lift, increasing by 2 pi per turn).
  double theta_at(double t) const { return t + offset_(t).real(); }
  double theta_derivative(double t) const { return 1.0 + offset_.derivative(t).real(); }

  // Curve parameter with theta_at(t) = theta (mod 2 pi), in [0, 2 pi).
  double parameter_of(double theta) const {
    const double two_pi = 2.0 * std::numbers::pi;
    const std::size_t n = theta_.size();
    const double y = theta_[0] + wrap(theta - theta_[0]);
    auto it = std::upper_bound(theta_.begin(), theta_.end(), y);
    const std::size_t j = static_cast<std::size_t>(it - theta_.begin()) - 1;
    const double h = two_pi / static_cast<double>(n);
    double lo = h * static_cast<double>(j), hi = lo + h;
    const double th_lo = theta_[j];
    const double th_hi = j + 1 < n ? theta_[j + 1] : theta_[0] + two_pi;
    double t = lo + h * (y - th_lo) / (th_hi - th_lo);
    for (int it2 = 0; it2 < 60; ++it2) {
      const double g = theta_at(t) - y;
      if (std::abs(g) < 1e-15) break;
      if (g > 0) hi = std::min(hi, t);
      else lo = std::max(lo, t);
      double next = t - g / theta_derivative(t);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - t) < 1e-16) break;
      t = next;
    }
    return t >= two_pi ? t - two_pi : t;
  }

  // Curve parameter of the point on the curve nearest to p.
  double parameter_of_point(Complex p) const {
    const std::size_t n = sample_.size();
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      const double d = std::abs(sample_[j] - p);
      if (d < bd) {
        bd = d;
        best = j;
      }
    }
    const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
    double t = h * static_cast<double>(best);
    for (int it = 0; it < 50; ++it) {
      const Complex r = curve_(t) - p, d1 = curve_.derivative(t), d2 = curve_.second_derivative(t);
      const double g = std::real(std::conj(r) * d1);
      const double gp = std::norm(d1) + std::real(std::conj(r) * d2);
      double step = gp > 0.0 ? g / gp : 0.0;
      step = std::clamp(step, -h, h);
      t -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double dist = std::abs(curve_(t) - p);
    if (dist > 1e-6 * scale_) {
      std::ostringstream os;
      os << "point " << p << " is " << dist << " away from the boundary";
      throw PreconditionError(os.str());
    }
    return wrap(t);
  }

  // Boundary image of e^{i theta}.
  Complex boundary_point(double theta) const { return curve_(parameter_of(theta)); }

  // theta in [0, 2 pi) mapped to the given boundary point.
  double boundary_theta(Complex p) const { return wrap(theta_at(parameter_of_point(p))); }

 protected:
  BoundaryCorrespondence() = default;

  void init(TrigInterpolant curve, std::vector<double> theta, Complex center, double residual) {
    curve_ = std::move(curve);
    theta_ = std::move(theta);
    center_ = center;
    residual_ = residual;
    const std::vector<double> t = uniform_angles(theta_.size());
    std::vector<double> off(theta_.size());
    for (std::size_t j = 0; j < off.size(); ++j) off[j] = theta_[j] - t[j];
    offset_ = TrigInterpolant::from_real(off);
    sample_ = curve_.resample(std::max<std::size_t>(theta_.size(), 64));
    double d = 0.0;
    for (const auto& z : sample_) d = std::max(d, std::abs(z - sample_[0]));
    scale_ = std::max(d, 1e-300);
  }

  static double wrap(double a) {
    const double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(a, two_pi);
    if (r < 0) r += two_pi;
    if (r >= two_pi) r -= two_pi;
    return r;
  }

  TrigInterpolant curve_;
  TrigInterpolant offset_;
  std::vector<double> theta_;
  std::vector<Complex> sample_;
  Complex center_{0.0};
  double residual_ = 0.0;
  double scale_ = 1.0;
};

// phi: unit disk -> interior of the curve with phi(0) = center, phi'(0) > 0.
class DiskMap : public BoundaryCorrespondence {
 public:
  double center_derivative() const { return derivative_; }
  const std::vector<Complex>& taylor() const { return taylor_; }

  Complex eval(Complex w) const {
    Complex acc = 0.0;
    for (auto it = taylor_.rbegin(); it != taylor_.rend(); ++it) acc = acc * w + *it;
    return acc;
  }
  Complex derivative(Complex w) const {
    Complex acc = 0.0;
    for (std::size_t k = taylor_.size(); k-- > 1;) acc = acc * w + static_cast<double>(k) * taylor_[k];
    return acc;
  }

 private:
  friend DiskMap disk_map_from(TrigInterpolant, std::vector<double>, Complex, double, double);
  double derivative_ = 0.0;
  std::vector<Complex> taylor_;
};

// phi: exterior of the unit disk -> exterior of the curve with
// phi(z) = a z + a_0 + a_1/z + ..., a > 0.
class ExteriorMap : public BoundaryCorrespondence {
 public:
  double leading_coefficient() const { return a_; }

 private:
  friend ExteriorMap exterior_map_from(TrigInterpolant, std::vector<double>, Complex, double, double);
  double a_ = 0.0;
};

inline ExteriorMap exterior_map_from(TrigInterpolant curve, std::vector<double> theta, Complex center, double a,
                                     double residual) {
  ExteriorMap m;
  m.init(std::move(curve), std::move(theta), center, residual);
  m.a_ = a;
  return m;
}

inline DiskMap disk_map_from(TrigInterpolant curve, std::vector<double> theta, Complex center, double derivative,
                             double residual) {
  DiskMap m;
  m.init(std::move(curve), std::move(theta), center, residual);
  m.derivative_ = derivative;
  // Taylor coefficients from boundary values at uniform theta.
  const std::size_t n = m.nodes();
  const std::vector<double> th = uniform_angles(n);
  std::vector<Complex> vals(n), spec;
  for (std::size_t k = 0; k < n; ++k) vals[k] = m.boundary_point(th[k]);
  Eigen::FFT<double> fft;
  fft.fwd(spec, vals);
  m.taylor_.resize(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) m.taylor_[k] = spec[k] / static_cast<double>(n);
  m.taylor_[0] = center;
  return m;
}

namespace detail {

inline TrigInterpolant curve_interpolant(const SampledCurve& gamma) {
  if (!gamma.closed()) throw PreconditionError("conformal maps need a closed curve");
  if (!is_jordan(gamma)) throw PreconditionError("conformal maps need a Jordan curve");
  return TrigInterpolant(gamma.points());
}

inline void check_nodes(std::size_t nodes) {
  if (nodes < 16 || nodes > 8192 || (nodes & (nodes - 1)) != 0)
    throw PreconditionError("node count must be a power of two in [16, 8192]");
}

}  // namespace detail

// The curve is interpolated trigonometrically in its own sample index, so
// samples should be uniform in an analytic parameter.
inline DiskMap interior_map(const SampledCurve& gamma, std::size_t nodes = 512, Complex center = 0.0) {
  detail::check_nodes(nodes);
  if (gamma.orientation() < 0) throw PreconditionError("interior_map needs a positively oriented curve");
  if (winding_number(gamma, center) != 1) throw PreconditionError("interior_map center is not inside the curve");
  TrigInterpolant c = detail::curve_interpolant(gamma);
  const std::vector<Complex> z = c.resample(nodes);
  const std::vector<Complex> dz = detail::derivative_samples(c, nodes);
  detail::SzegoSolution sol = detail::solve_szego(z, dz, center);
  return disk_map_from(std::move(c), std::move(sol.theta), center, sol.center_derivative, sol.residual);
}

// Solved through u = 1/(z - center), which sends the exterior to a bounded
// domain around 0.
inline ExteriorMap exterior_map(const SampledCurve& gamma, std::size_t nodes = 512, Complex center = 0.0) {
  detail::check_nodes(nodes);
  if (gamma.orientation() < 0) throw PreconditionError("exterior_map needs a positively oriented curve");
  if (winding_number(gamma, center) != 1) throw PreconditionError("exterior_map center is not inside the curve");
  TrigInterpolant c = detail::curve_interpolant(gamma);
  const std::vector<Complex> z = c.resample(nodes);
  const std::vector<Complex> dz = detail::derivative_samples(c, nodes);
  // Reversed parameter s = -t keeps the inverted curve positively oriented.
  std::vector<Complex> u(nodes), du(nodes);
  for (std::size_t j = 0; j < nodes; ++j) {
    const std::size_t i = (nodes - j) % nodes;
    const Complex d = z[i] - center;
    u[j] = 1.0 / d;
    du[j] = dz[i] / (d * d);
  }
  const detail::SzegoSolution sol = detail::solve_szego(u, du, 0.0);
  std::vector<double> theta(nodes);
  theta[0] = -sol.theta[0];
  for (std::size_t i = 1; i < nodes; ++i) theta[i] = 2.0 * std::numbers::pi - sol.theta[nodes - i];
  return exterior_map_from(std::move(c), std::move(theta), center, 1.0 / sol.center_derivative, sol.residual);
}

// Doubles the node count from `nodes` until boundary images at 64 angles move
// by at most tol (relative to the curve size), up to max_nodes.
template <typename Map, typename Solve>
Map solve_converged(Solve&& solve, std::size_t nodes, double tol, std::size_t max_nodes) {
  Map prev = solve(nodes);
  const std::vector<double> th = uniform_angles(64);
  double size = 0.0;
  for (double t : th) size = std::max(size, std::abs(prev.boundary_point(t) - prev.center()));
  while (nodes < max_nodes) {
    nodes *= 2;
    Map next = solve(nodes);
    double change = 0.0;
    for (double t : th) change = std::max(change, std::abs(next.boundary_point(t) - prev.boundary_point(t)));
    prev = std::move(next);
    if (change <= tol * std::max(size, 1.0)) return prev;
  }
  return prev;
}

inline DiskMap interior_map_converged(const SampledCurve& gamma, std::size_t nodes = 512, Complex center = 0.0,
                                      double tol = 1e-6, std::size_t max_nodes = 4096) {
  return solve_converged<DiskMap>([&](std::size_t n) { return interior_map(gamma, n, center); }, nodes, tol,
                                  max_nodes);
}

inline ExteriorMap exterior_map_converged(const SampledCurve& gamma, std::size_t nodes = 512, Complex center = 0.0,
                                          double tol = 1e-6, std::size_t max_nodes = 4096) {
  return solve_converged<ExteriorMap>([&](std::size_t n) { return exterior_map(gamma, n, center); }, nodes, tol,
                                      max_nodes);
}

inline Complex map_boundary_forward(const BoundaryCorrespondence& m, double theta) { return m.boundary_point(theta); }

inline double map_boundary_inverse(const BoundaryCorrespondence& m, Complex point) { return m.boundary_theta(point); }

inline constexpr double kInteriorMargin = 1e-3;

inline Complex map_interior_eval(const DiskMap& m, Complex w) {
  if (!(std::abs(w) < 1.0 - kInteriorMargin)) {
    std::ostringstream os;
    os << "map_interior_eval: |w| = " << std::abs(w) << " is too close to the unit circle";
    throw PreconditionError(os.str());
  }
  return m.eval(w);
}

inline Complex map_interior_inverse(const DiskMap& m, Complex z) {
  const std::size_t n = m.nodes();
  const std::vector<double> t = uniform_angles(n);
  const std::vector<Complex> zs = m.curve().resample(n);
  const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
  Complex w = 0.0;
  double nearest = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    const Complex d = zs[j] - z;
    nearest = std::min(nearest, std::abs(d));
    w += std::polar(1.0, m.theta_at(t[j])) * m.curve().derivative(t[j]) / d;
  }
  w *= h / Complex{0.0, 2.0 * std::numbers::pi};
  if (std::abs(w) >= 1.0 - kInteriorMargin) w *= (1.0 - 2.0 * kInteriorMargin) / std::abs(w);
  for (int it = 0; it < 60; ++it) {
    const Complex r = m.eval(w) - z;
    if (std::abs(r) <= 1e-13 * std::max(1.0, std::abs(z))) {
      if (!(std::abs(w) < 1.0 - kInteriorMargin)) break;
      return w;
    }
    Complex step = r / m.derivative(w);
    const double lim = 0.5 * (1.0 - std::abs(w));
    if (std::abs(step) > lim) step *= lim / std::abs(step);
    w -= step;
  }
  std::ostringstream os;
  os << "map_interior_inverse did not converge for " << z << " (nearest boundary node at " << nearest << ")";
  throw NumericalError(os.str());
}

}  // namespace pseudolem
