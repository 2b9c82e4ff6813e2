#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <variant>
#include <vector>

#include "pseudolem/curve.hpp"
#include "pseudolem/error.hpp"
#include "pseudolem/polynomial.hpp"

namespace pseudolem {

enum class ArcKind { level, gradient };

// A traced piece of Lev(f, eps) or Grad(f, alpha). `arg_lift` is the
// continuous lift of arg f(sample), unwrapped from the f values themselves.
struct TracedArc {
  std::vector<Complex> samples;
  std::vector<Complex> f_values;
  std::vector<double> arg_lift;
  ArcKind kind = ArcKind::level;
  double value = 0.0;  // eps for level arcs, alpha for gradient arcs
};

struct ArgChangeReaches {
  double delta;  // signed; sign must agree with the trace direction
};
struct ClosedLoop {};
struct HitsGradient {
  double alpha;
  int crossing = 1;  // 1 = first time arg f == alpha (mod 2pi) after the start
};
using StopRule = std::variant<ArgChangeReaches, ClosedLoop, HitsGradient>;

struct TraceOptions {
  double arg_step = 0.02;         // max change of arg f (level) or log|f| (gradient) per step
  double corrector_tol = 1e-14;   // relative |f - target| / |target|
  double critical_threshold = 1e-10;
  int max_steps = 400000;
};

inline double wrap_2pi(double a) {
  const double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(a, two_pi);
  if (r < 0) r += two_pi;
  if (r >= two_pi) r -= two_pi;
  return r;
}

// Distance on the circle R / 2pi Z.
inline double circle_distance(double a, double b) {
  const double d = wrap_2pi(a - b);
  return std::min(d, 2.0 * std::numbers::pi - d);
}

inline double arg_change_along(const TracedArc& arc) {
  if (arc.arg_lift.empty()) throw PreconditionError("arg_change_along: empty arc");
  return arc.arg_lift.back() - arc.arg_lift.front();
}

namespace detail {

inline void check_not_critical(const RationalMap& f, Complex z, Complex df, const TraceOptions& opt) {
  if (std::abs(df) < opt.critical_threshold * std::max(1.0, f.scale())) {
    std::ostringstream os;
    os << "critical point encountered near " << z;
    throw CriticalPointError(os.str(), z);
  }
}

// Newton on f(z) = target starting from z; returns the corrected point.
inline Complex correct_to(const RationalMap& f, Complex z, Complex target, const TraceOptions& opt) {
  const double tol = opt.corrector_tol * std::max(std::abs(target), 1e-300);
  for (int it = 0; it < 12; ++it) {
    const Complex r = f(z) - target;
    if (std::abs(r) <= tol) return z;
    const Complex df = f.derivative(z);
    check_not_critical(f, z, df, opt);
    z -= r / df;
  }
  const Complex r = f(z) - target;
  if (std::abs(r) > 1e3 * tol + 1e-13 * std::abs(target)) {
    std::ostringstream os;
    os << "corrector failed to converge near " << z << " (residual " << std::abs(r) << ")";
    throw NumericalError(os.str());
  }
  return z;
}

// Continuation of the branch f(z(s)) = target(s) where target(s) moves along
// log f by d(log f)/ds = rate (|rate| = 1). RK4 predictor on
// dz/ds = rate * f / f', Newton corrector onto the exact target.
template <typename TargetFn>
Complex continuation_step_once(const RationalMap& f, Complex z, double h, Complex rate, TargetFn&& target,
                          double s_next, const TraceOptions& opt) {
  auto field = [&](Complex x) {
    const Complex df = f.derivative(x);
    check_not_critical(f, x, df, opt);
    return rate * f(x) / df;
  };
  const Complex k1 = field(z);
  const Complex k2 = field(z + 0.5 * h * k1);
  const Complex k3 = field(z + 0.5 * h * k2);
  const Complex k4 = field(z + h * k3);
  const Complex pred = z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  return correct_to(f, pred, target(s_next), opt);
}

// One continuation step of length h, halving the step while the corrector
// fails. Returns the step length actually taken.
template <typename TargetFn>
double continuation_step(const RationalMap& f, Complex& z, double h, Complex rate, TargetFn&& target, double s,
                         const TraceOptions& opt) {
  for (;;) {
    try {
      z = continuation_step_once(f, z, h, rate, target, s + h, opt);
      return h;
    } catch (const CriticalPointError&) {
      throw;
    } catch (const NumericalError&) {
      h *= 0.5;
      if (h < 1e-12) {
        std::ostringstream os;
        os << "continuation stalled near " << z << "; tangent field is singular";
        throw CriticalPointError(os.str(), z);
      }
    }
  }
}

inline void append_sample(TracedArc& arc, Complex z, Complex fz) {
  if (arc.samples.empty()) {
    arc.arg_lift.push_back(std::arg(fz));
  } else {
    const double jump = std::arg(fz / arc.f_values.back());
    if (std::abs(jump) >= std::numbers::pi / 4) {
      std::ostringstream os;
      os << "arg lift jump of " << jump << " rad near " << z;
      throw NumericalError(os.str());
    }
    arc.arg_lift.push_back(arc.arg_lift.back() + jump);
  }
  arc.samples.push_back(z);
  arc.f_values.push_back(fz);
}

// Step length in the continuation parameter keeping |dz| <= max_spatial.
inline double bounded_step(const RationalMap& f, Complex z, double base, double max_spatial, const TraceOptions& opt) {
  const Complex df = f.derivative(z);
  check_not_critical(f, z, df, opt);
  const double speed = std::abs(f(z) / df);  // |dz/ds|
  double h = base;
  if (max_spatial > 0.0 && speed * h > max_spatial) h = max_spatial / speed;
  return h;
}

// Finite critical points of f: roots of num' den - num den' off the poles.
inline std::vector<Complex> finite_critical_points(const RationalMap& f) {
  const Polynomial g = poly_derivative(f.num()) * f.den() - f.num() * poly_derivative(f.den());
  std::vector<Complex> out;
  if (g.is_zero() || g.degree() < 1) return out;
  for (const auto& r : poly_roots(g)) {
    if (std::abs(f.den()(r.value)) < 1e-12 * f.den().eval_scale(r.value)) continue;
    out.push_back(r.value);
  }
  return out;
}

inline std::vector<Complex> finite_critical_values(const RationalMap& f) {
  std::vector<Complex> out;
  for (const auto& c : finite_critical_points(f)) out.push_back(f(c));
  return out;
}

// After landing on a critical value, the branch either sits on a regular
// preimage or has been pulled into the critical point itself.
inline void check_landing(const RationalMap& f, Complex z) {
  for (const auto& c : finite_critical_points(f))
    if (std::abs(z - c) <= 1e-3 * std::max(1.0, std::abs(c)))
      throw CriticalPointError("trace passes through a critical point", c);
}

// Parameters s in (0, s_max] at which the target path passes exactly through a
// critical value. Steps are forced to land there so that a branch running into
// a critical point stalls instead of silently hopping sheets.
template <typename HitFn>
std::vector<double> critical_breakpoints(const RationalMap& f, double s_max, HitFn&& hits) {
  std::vector<double> out;
  for (const auto& cv : finite_critical_values(f)) hits(cv, s_max, out);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

// Newton with backtracking for f(z) = w.
inline Complex solve_target(const RationalMap& f, Complex w, Complex seed, double tol = 1e-13,
                            const TraceOptions& opt = {}) {
  const double scale = std::abs(w) > 0.0 ? std::abs(w) : 1.0;
  Complex z = seed;
  Complex r = f(z) - w;
  std::ostringstream trace;
  for (int it = 0; it < 200; ++it) {
    if (std::abs(r) <= tol * scale) {
      const Complex df = f.derivative(z);
      detail::check_not_critical(f, z, df, opt);
      return z;
    }
    const Complex df = f.derivative(z);
    if (std::abs(df) < opt.critical_threshold * std::max(1.0, f.scale())) {
      std::ostringstream os;
      os << "solve_target landed on a critical point near " << z;
      throw CriticalPointError(os.str(), z);
    }
    Complex step = r / df;
    double lambda = 1.0;
    Complex znew = z - step;
    Complex rnew = f(znew) - w;
    while (std::abs(rnew) > std::abs(r) && lambda > 1e-6) {
      lambda *= 0.5;
      znew = z - lambda * step;
      rnew = f(znew) - w;
    }
    if (it < 8) trace << " " << z;
    z = znew;
    r = rnew;
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) break;
  }
  std::ostringstream os;
  os << "solve_target diverged (target " << w << ", seed " << seed << "; iterates" << trace.str() << ")";
  throw NumericalError(os.str());
}

// Traces Lev(f, eps) from `start`. direction +1 makes arg f increase.
// `step` bounds the spatial length of each continuation step.
inline TracedArc trace_level(const RationalMap& f, double eps, Complex start, int direction, const StopRule& stop,
                             double step = 0.05, const TraceOptions& opt = {}) {
  if (direction != 1 && direction != -1) throw PreconditionError("trace_level direction must be +1 or -1");
  if (!(eps > 0.0)) throw PreconditionError("trace_level needs eps > 0");
  const Complex f0 = f(start);
  if (std::abs(std::abs(f0) - eps) > 1e-6 * eps) {
    std::ostringstream os;
    os << "trace_level start has |f| = " << std::abs(f0) << ", expected " << eps;
    throw PreconditionError(os.str());
  }
  const double alpha0 = std::arg(f0);
  const double two_pi = 2.0 * std::numbers::pi;
  auto target = [&](double s) { return std::polar(eps, alpha0 + direction * s); };
  const Complex rate{0.0, static_cast<double>(direction)};

  // Total parameter length (arg change magnitude), or none for closed loops.
  std::optional<double> total;
  bool closing = false;
  if (const auto* a = std::get_if<ArgChangeReaches>(&stop)) {
    if (a->delta == 0.0 || (a->delta > 0) != (direction > 0))
      throw PreconditionError("arg change target must be nonzero with the sign of the direction");
    total = std::abs(a->delta);
  } else if (const auto* g = std::get_if<HitsGradient>(&stop)) {
    if (g->crossing < 1) throw PreconditionError("crossing index must be >= 1");
    double first = wrap_2pi(direction * (g->alpha - alpha0));
    if (first < 1e-12) first = two_pi;
    total = first + two_pi * (g->crossing - 1);
  } else {
    closing = true;
  }

  TracedArc arc;
  arc.kind = ArcKind::level;
  arc.value = eps;
  Complex z = detail::correct_to(f, start, target(0.0), opt);
  detail::append_sample(arc, z, f(z));

  const int max_laps = std::max(1, f.num().degree() + f.den().degree());
  const std::vector<double> breaks = detail::critical_breakpoints(
      f, closing ? two_pi * max_laps : *total, [&](Complex cv, double s_max, std::vector<double>& out) {
        if (std::abs(std::abs(cv) - eps) > 1e-9 * eps) return;
        for (double b = wrap_2pi(direction * (std::arg(cv) - alpha0)); b <= s_max; b += two_pi)
          if (b > 1e-12) out.push_back(b);
      });
  std::size_t next_break = 0;
  double s = 0.0;
  int lap = 0;
  for (int k = 0; k < opt.max_steps; ++k) {
    const double limit = closing ? two_pi * (lap + 1) : *total;
    while (next_break < breaks.size() && breaks[next_break] <= s + 1e-12) ++next_break;
    const bool at_break = next_break < breaks.size() && breaks[next_break] < limit - 1e-12;
    const double stop_at = at_break ? breaks[next_break] : limit;
    double h = detail::bounded_step(f, z, opt.arg_step, step, opt);
    bool landing = false;
    if (s + h >= stop_at - 1e-12) {
      h = stop_at - s;
      landing = true;
    }
    const double taken = detail::continuation_step(f, z, h, rate, target, s, opt);
    landing = landing && taken == h;
    s = landing ? stop_at : s + taken;
    detail::append_sample(arc, z, f(z));
    if (landing && at_break) detail::check_landing(f, z);
    if (!landing || at_break) continue;
    if (!closing) return arc;
    ++lap;
    const double close_tol = 1e-7 * std::max(1.0, std::abs(start));
    if (std::abs(z - arc.samples.front()) <= close_tol) {
      arc.samples.back() = arc.samples.front();
      arc.f_values.back() = arc.f_values.front();
      return arc;
    }
    if (lap >= max_laps) throw NumericalError("level curve did not close within degree-many laps");
  }
  throw NumericalError("trace_level exceeded its step budget");
}

// Traces Grad(f, alpha) from `start` until |f| = target_modulus.
inline TracedArc trace_gradient(const RationalMap& f, double alpha, Complex start, double target_modulus,
                                double step = 0.05, const TraceOptions& opt = {}) {
  if (!(target_modulus > 0.0)) throw PreconditionError("trace_gradient needs a positive target modulus");
  const Complex f0 = f(start);
  if (std::abs(f0) == 0.0 || circle_distance(std::arg(f0), alpha) > 1e-6) {
    std::ostringstream os;
    os << "trace_gradient start has arg f = " << std::arg(f0) << ", expected " << alpha;
    throw PreconditionError(os.str());
  }
  const double u0 = std::log(std::abs(f0));
  const double u1 = std::log(target_modulus);
  if (std::abs(u1 - u0) < 1e-14) throw PreconditionError("trace_gradient target modulus equals the start modulus");
  const double sign = u1 > u0 ? 1.0 : -1.0;
  const double total = std::abs(u1 - u0);
  auto target = [&](double s) { return std::polar(std::exp(u0 + sign * s), alpha); };
  const Complex rate{sign, 0.0};

  TracedArc arc;
  arc.kind = ArcKind::gradient;
  arc.value = alpha;
  Complex z = detail::correct_to(f, start, target(0.0), opt);
  detail::append_sample(arc, z, f(z));
  const std::vector<double> breaks =
      detail::critical_breakpoints(f, total, [&](Complex cv, double s_max, std::vector<double>& out) {
        if (std::abs(cv) == 0.0 || circle_distance(std::arg(cv), alpha) > 1e-9) return;
        const double b = sign * (std::log(std::abs(cv)) - u0);
        if (b > 1e-12 && b < s_max) out.push_back(b);
      });
  std::size_t next_break = 0;
  double s = 0.0;
  for (int k = 0; k < opt.max_steps; ++k) {
    while (next_break < breaks.size() && breaks[next_break] <= s + 1e-14) ++next_break;
    const bool at_break = next_break < breaks.size() && breaks[next_break] < total - 1e-14;
    const double stop_at = at_break ? breaks[next_break] : total;
    double h = detail::bounded_step(f, z, opt.arg_step, step, opt);
    bool landing = false;
    if (s + h >= stop_at - 1e-14) {
      h = stop_at - s;
      landing = true;
    }
    const double taken = detail::continuation_step(f, z, h, rate, target, s, opt);
    landing = landing && taken == h;
    s = landing ? stop_at : s + taken;
    detail::append_sample(arc, z, f(z));
    if (landing && at_break) detail::check_landing(f, z);
    if (landing && !at_break) return arc;
  }
  throw NumericalError("trace_gradient exceeded its step budget");
}

inline SampledCurve arc_to_closed_curve(const TracedArc& arc) {
  std::vector<Complex> pts(arc.samples.begin(), arc.samples.end());
  if (pts.size() > 1 && pts.front() == pts.back()) pts.pop_back();
  return SampledCurve(std::move(pts), true);
}

namespace detail {

// Climbs from a zero of f along a gradient line to |f| = eps and traces the
// level loop through the landing point.
inline std::optional<TracedArc> loop_from_zero(const RationalMap& f, Complex zero, double eps, double seed_radius,
                                               double ray_angle, double step) {
  const Complex seed = zero + std::polar(seed_radius, ray_angle);
  const Complex fs = f(seed);
  if (std::abs(fs) == 0.0 || std::abs(fs) >= eps) return std::nullopt;
  try {
    const TracedArc up = trace_gradient(f, std::arg(fs), seed, eps, step);
    return trace_level(f, eps, up.samples.back(), 1, ClosedLoop{}, step);
  } catch (const NumericalError&) {
    return std::nullopt;
  }
}

}  // namespace detail

struct LevelComponent {
  SampledCurve curve;
  TracedArc arc;
  std::vector<int> enclosed;  // indices into the distinct-zero list of f
};

// Closed components of Lev(f, eps) found by climbing gradient rays from each
// zero of f. Components are keyed by the set of zeros they enclose.
inline std::vector<LevelComponent> level_set_components(const RationalMap& f, double eps, double step = 0.05) {
  const std::vector<Root> zs = f.zeros();
  std::vector<LevelComponent> out;
  std::set<std::vector<int>> seen;
  for (std::size_t zi = 0; zi < zs.size(); ++zi) {
    bool covered = false;
    for (const auto& c : out)
      if (std::find(c.enclosed.begin(), c.enclosed.end(), static_cast<int>(zi)) != c.enclosed.end()) covered = true;
    if (covered) continue;
    double sep = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < zs.size(); ++j)
      if (j != zi) sep = std::min(sep, std::abs(zs[j].value - zs[zi].value));
    if (!std::isfinite(sep)) sep = 1.0;
    for (int ray = 0; ray < 12; ++ray) {
      auto loop = detail::loop_from_zero(f, zs[zi].value, eps, 1e-3 * sep, 2.0 * std::numbers::pi * (ray + 0.25) / 12.0,
                                         step);
      if (!loop) continue;
      SampledCurve curve = arc_to_closed_curve(*loop);
      std::vector<int> enclosed;
      bool ok = true;
      for (std::size_t j = 0; j < zs.size(); ++j) {
        int wnd = 0;
        try {
          wnd = winding_number(curve, zs[j].value);
        } catch (const NearHitError&) {
          ok = false;
          break;
        }
        if (wnd != 0) enclosed.push_back(static_cast<int>(j));
      }
      if (!ok || std::find(enclosed.begin(), enclosed.end(), static_cast<int>(zi)) == enclosed.end()) continue;
      if (seen.insert(enclosed).second) out.push_back({std::move(curve), std::move(*loop), enclosed});
      break;
    }
  }
  return out;
}

// The component of Lev(f, eps) that winds around every listed zero and around
// no other zero of f.
inline SampledCurve level_component_enclosing(const RationalMap& f, double eps, const std::vector<Complex>& zeros_subset,
                                              double step = 0.05) {
  if (zeros_subset.empty()) throw PreconditionError("level_component_enclosing needs at least one zero");
  const std::vector<Root> zs = f.zeros();
  auto index_of = [&](Complex z) {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < zs.size(); ++j) {
      const double d = std::abs(zs[j].value - z);
      if (d < bd) {
        bd = d;
        best = static_cast<int>(j);
      }
    }
    if (bd > 1e-6 * std::max(1.0, std::abs(z))) {
      std::ostringstream os;
      os << "requested point " << z << " is not a zero of f";
      throw PreconditionError(os.str());
    }
    return best;
  };
  std::vector<int> wanted;
  for (const auto& z : zeros_subset) wanted.push_back(index_of(z));
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());

  if (f.is_polynomial() && f.num().degree() >= 2) {
    for (const auto& cv : critical_values(f.num()))
      if (std::abs(std::abs(cv / f.den()[0]) - eps) <= 1e-9 * eps) {
        std::ostringstream os;
        os << "eps = " << eps << " coincides with the critical modulus of " << cv;
        throw PreconditionError(os.str());
      }
  }

  for (auto& comp : level_set_components(f, eps, step))
    if (comp.enclosed == wanted) return comp.curve;

  std::ostringstream os;
  os << "no component of Lev(f, " << eps << ") separates the requested zeros";
  if (f.is_polynomial() && f.num().degree() >= 2) {
    // Name the critical value whose modulus is nearest above eps: the level at
    // which the requested zeros would first share a component.
    double best = std::numeric_limits<double>::infinity();
    Complex blocking{0.0};
    for (const auto& cv : critical_values(f.num())) {
      const double m = std::abs(cv / f.den()[0]);
      if (m > 0.0 && std::abs(std::log(m / eps)) < best) {
        best = std::abs(std::log(m / eps));
        blocking = cv;
      }
    }
    os << "; blocking critical value " << blocking << " (modulus " << std::abs(blocking) << ")";
  }
  throw NumericalError(os.str());
}

}  // namespace pseudolem
