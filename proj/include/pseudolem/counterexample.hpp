#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pseudolem/curve.hpp"
#include "pseudolem/error.hpp"
#include "pseudolem/levelcurves.hpp"
#include "pseudolem/polynomial.hpp"

namespace pseudolem {

// One level-curve portion of the boundary of D4: modulus of f on the arc, the
// signed total change of arg f along it, and arg f at its two endpoints.
struct Table1Row {
  std::string label;
  double modulus = 0.0;
  double total_change = 0.0;
  double initial_arg = 0.0;
  double final_arg = 0.0;
};

// Level arc: value = eps, stop = signed arg change.
// Gradient arc: value = alpha, stop = target modulus.
struct ArcSpec {
  ArcKind kind = ArcKind::level;
  double value = 0.0;
  double stop = 0.0;
  std::string label;
};

struct BoundaryChain {
  std::vector<ArcSpec> specs;
  std::vector<Complex> vertices;  // start of each arc
  std::vector<TracedArc> arcs;
  SampledCurve curve;
  double closure_residual = 0.0;
};

inline std::vector<Table1Row> d4_table() {
  constexpr double pi = std::numbers::pi;
  return {
      {"v1v2", 0.15, -5 * pi / 2, 0.0, 3 * pi / 2},
      {"v3v4", 0.6, pi, 3 * pi / 2, pi / 2},
      {"v5v6", 8.0, 7 * pi / 6, pi / 2, 5 * pi / 3},
      {"v7v8", 2.0, -pi / 6, 5 * pi / 3, 3 * pi / 2},
      {"v9v10", 6.0, -5 * pi / 6, 3 * pi / 2, 2 * pi / 3},
      {"v11v12", 3.0, 7 * pi / 3, 2 * pi / 3, pi},
      {"v13v14", 2.0, -7 * pi / 3, pi, 2 * pi / 3},
      {"v15v16", 0.15, -pi / 6, 2 * pi / 3, pi / 2},
      {"v17v18", 0.47, -5 * pi / 6, pi / 2, 5 * pi / 3},
      {"v19v20", 0.25, 7 * pi / 3, 5 * pi / 3, 0.0},
  };
}

// Level arcs from the rows, joined by gradient arcs at each row's final arg
// running to the next row's modulus. The chain is cyclic.
inline std::vector<ArcSpec> chain_from_table(const std::vector<Table1Row>& rows, double tol = 1e-12) {
  if (rows.empty()) throw PreconditionError("chain_from_table needs at least one row");
  std::vector<ArcSpec> out;
  const std::size_t n = rows.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Table1Row& r = rows[i];
    const Table1Row& next = rows[(i + 1) % n];
    if (!(r.modulus > 0.0) || r.total_change == 0.0) {
      std::ostringstream os;
      os << "row " << r.label << " needs a positive modulus and a nonzero change";
      throw PreconditionError(os.str());
    }
    if (circle_distance(r.final_arg, r.initial_arg + r.total_change) > tol) {
      std::ostringstream os;
      os << "row " << r.label << ": final arg is not initial arg plus total change";
      throw PreconditionError(os.str());
    }
    if (circle_distance(r.final_arg, next.initial_arg) > tol) {
      std::ostringstream os;
      os << "rows " << r.label << " and " << next.label << " are incompatible: final arg " << r.final_arg
         << " differs from initial arg " << next.initial_arg;
      throw PreconditionError(os.str());
    }
    out.push_back({ArcKind::level, r.modulus, r.total_change, r.label});
    if (next.modulus == r.modulus) {
      if (n == 1) break;
      std::ostringstream os;
      os << "rows " << r.label << " and " << next.label << " share a modulus; no gradient arc can join them";
      throw PreconditionError(os.str());
    }
    out.push_back({ArcKind::gradient, wrap_2pi(r.final_arg), next.modulus, r.label + "->" + next.label});
  }
  return out;
}

namespace detail {

inline void check_alternation(const std::vector<ArcSpec>& specs) {
  if (specs.empty()) throw PreconditionError("boundary chain needs at least one arc");
  if (specs.front().kind != ArcKind::level) throw PreconditionError("boundary chain must start with a level arc");
  if (specs.size() > 1 && specs.size() % 2 != 0) throw PreconditionError("boundary chain must alternate and close");
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const ArcSpec& s = specs[i];
    const ArcKind want = i % 2 == 0 ? ArcKind::level : ArcKind::gradient;
    if (s.kind != want) throw PreconditionError("boundary chain arcs must alternate level and gradient");
    if (s.kind == ArcKind::level && (!(s.value > 0.0) || s.stop == 0.0))
      throw PreconditionError("level arc needs positive modulus and nonzero arg change");
    if (s.kind == ArcKind::gradient) {
      const double incoming = specs[i - 1].value;
      const double outgoing = specs[(i + 1) % specs.size()].value;
      if (!(s.stop > 0.0) || s.stop == incoming || std::abs(s.stop - outgoing) > 1e-12 * outgoing)
        throw PreconditionError("gradient arc must run from the incoming level to the next level");
    }
  }
}

struct ChainAttempt {
  std::vector<Complex> vertices;
  std::vector<TracedArc> arcs;
  double residual = std::numeric_limits<double>::infinity();
  std::string failure;
};

inline ChainAttempt trace_chain(const RationalMap& f, const std::vector<ArcSpec>& specs, Complex start, double step) {
  ChainAttempt at;
  Complex z = start;
  try {
    for (const auto& s : specs) {
      at.vertices.push_back(z);
      TracedArc arc = s.kind == ArcKind::level
                          ? trace_level(f, s.value, z, s.stop > 0 ? 1 : -1, ArgChangeReaches{s.stop}, step)
                          : trace_gradient(f, s.value, z, s.stop, step);
      z = arc.samples.back();
      at.arcs.push_back(std::move(arc));
    }
    at.residual = std::abs(z - start);
  } catch (const Error& e) {
    at.failure = e.what();
  }
  return at;
}

inline std::vector<Complex> concatenate_arcs(const std::vector<TracedArc>& arcs) {
  std::vector<Complex> pts;
  for (const auto& a : arcs)
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
      if (i == 0 && !pts.empty()) continue;
      pts.push_back(a.samples[i]);
    }
  if (pts.size() > 1) pts.pop_back();
  return pts;
}

}  // namespace detail

// Resolves the start vertex among the preimages of eps_1 * e^{i alpha_start},
// traces the whole chain from each, and keeps the one that closes as a
// Jordan curve. `step` bounds the spatial sample spacing.
inline BoundaryChain build_boundary(const RationalMap& f, const std::vector<ArcSpec>& specs,
                                    std::optional<Complex> seed_hint = std::nullopt, double step = 0.02) {
  detail::check_alternation(specs);
  const double start_arg = specs.size() > 1 ? specs.back().value : 0.0;
  const Complex w0 = std::polar(specs.front().value, start_arg);
  std::vector<Complex> candidates = expand_roots(f.preimages(w0));
  std::sort(candidates.begin(), candidates.end(),
            [](Complex a, Complex b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  if (seed_hint) {
    std::sort(candidates.begin(), candidates.end(),
              [&](Complex a, Complex b) { return std::abs(a - *seed_hint) < std::abs(b - *seed_hint); });
    candidates.resize(std::min<std::size_t>(candidates.size(), 1));
  }

  std::vector<BoundaryChain> found;
  std::ostringstream report;
  for (const auto& c : candidates) {
    const Complex z0 = solve_target(f, w0, c);
    detail::ChainAttempt at = detail::trace_chain(f, specs, z0, step);
    report << "\n  start " << z0 << ": ";
    if (!at.failure.empty()) {
      report << "trace failed (" << at.failure << ")";
      continue;
    }
    std::vector<Complex> pts = detail::concatenate_arcs(at.arcs);
    if (pts.size() < 3) {
      report << "degenerate chain";
      continue;
    }
    SampledCurve curve(pts, true);
    const double close_tol = 1e-6 * curve.diameter();
    report << "closure residual " << at.residual;
    if (at.residual > close_tol) continue;
    if (!is_jordan(curve)) {
      report << ", not a Jordan curve";
      continue;
    }
    bool duplicate = false;
    for (const auto& g : found)
      if (distance_to_curve(g.curve, z0).distance <= std::max(close_tol, 0.1 * step)) duplicate = true;
    if (duplicate) continue;
    found.push_back({specs, std::move(at.vertices), std::move(at.arcs), std::move(curve), at.residual});
  }
  if (found.size() != 1) {
    std::ostringstream os;
    os << (found.empty() ? "no" : "several") << " closing Jordan chains among " << candidates.size()
       << " start candidates:" << report.str();
    throw NumericalError(os.str());
  }
  return std::move(found.front());
}

inline bool region_contains(const BoundaryChain& chain, Complex z) { return winding_number(chain.curve, z) != 0; }

// Polar grid of target values: moduli at log-spaced cell centres in
// (r_min, r_max), args at 2 pi j / n_arg shifted by arg_offset.
struct GridSpec {
  double r_min = 0.16;
  double r_max = 7.9;
  int n_arg = 360;
  int n_mod = 100;
  double arg_offset = 0.001;
  unsigned threads = 0;  // 0: hardware concurrency
};

inline std::vector<Complex> grid_points(const GridSpec& g) {
  if (!(g.r_min > 0.0) || !(g.r_max > g.r_min) || g.n_arg < 1 || g.n_mod < 1)
    throw PreconditionError("grid needs 0 < r_min < r_max and positive counts");
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(g.n_arg) * static_cast<std::size_t>(g.n_mod));
  const double lo = std::log(g.r_min), hi = std::log(g.r_max);
  for (int i = 0; i < g.n_mod; ++i) {
    const double r = std::exp(lo + (hi - lo) * (i + 0.5) / g.n_mod);
    for (int j = 0; j < g.n_arg; ++j)
      out.push_back(std::polar(r, 2.0 * std::numbers::pi * j / g.n_arg + g.arg_offset));
  }
  return out;
}

struct NoninjectivityResult {
  int degree = 0;
  std::vector<Complex> witnesses;  // grid values attaining the degree
  std::size_t evaluated = 0;
  std::size_t skipped = 0;  // too close to f(boundary)
  double max_residual = 0.0;
};

// Largest number of preimages (with multiplicity) inside the chain over the
// sampled targets.
inline NoninjectivityResult noninjectivity_degree(const RationalMap& f, const SampledCurve& boundary,
                                                  const GridSpec& grid) {
  const std::vector<Complex> ws = grid_points(grid);
  const ImageCounter counter(f, boundary);
  std::vector<int> counts(ws.size(), 0);
  std::vector<double> residuals(ws.size(), 0.0);
  std::vector<char> skipped(ws.size(), 0);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        const WindingResult r = counter.count(ws[i]);
        counts[i] = r.value;
        residuals[i] = r.residual;
      } catch (const NearHitError&) {
        skipped[i] = 1;
      }
    }
  };
  unsigned nt = grid.threads ? grid.threads : std::max(1u, std::thread::hardware_concurrency());
  nt = static_cast<unsigned>(std::min<std::size_t>(nt, ws.size()));
  if (nt <= 1) {
    work(0, ws.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (ws.size() + nt - 1) / nt;
    for (unsigned t = 0; t < nt; ++t) {
      const std::size_t b = t * chunk, e = std::min(ws.size(), b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }

  NoninjectivityResult res;
  res.degree = std::numeric_limits<int>::min();
  for (std::size_t i = 0; i < ws.size(); ++i) {
    if (skipped[i]) {
      ++res.skipped;
      continue;
    }
    ++res.evaluated;
    res.max_residual = std::max(res.max_residual, residuals[i]);
    if (counts[i] > res.degree) {
      res.degree = counts[i];
      res.witnesses.clear();
    }
    if (counts[i] == res.degree) res.witnesses.push_back(ws[i]);
  }
  if (res.evaluated == 0) throw PreconditionError("every grid point lies on the image of the boundary");
  return res;
}

inline NoninjectivityResult noninjectivity_degree(const RationalMap& f, const BoundaryChain& chain,
                                                  const GridSpec& grid) {
  return noninjectivity_degree(f, chain.curve, grid);
}

struct RowComparison {
  Table1Row expected;
  double modulus = 0.0;  // |f| at the arc's worst sample
  double modulus_rel_dev = 0.0;
  double total_change = 0.0;
  double initial_arg = 0.0;
  double final_arg = 0.0;
  double change_dev = 0.0;
  double initial_dev = 0.0;
  double final_dev = 0.0;
  bool ok = false;
};

struct TableReport {
  std::vector<RowComparison> rows;
  double change_sum_expected = 0.0;
  double change_sum_measured = 0.0;
  double table_tol = 1e-3;
  double modulus_tol = 1e-6;
  bool all_ok() const {
    return std::all_of(rows.begin(), rows.end(), [](const RowComparison& r) { return r.ok; });
  }
};

// Measures each level arc of the chain against the row it was built from.
inline TableReport reproduce_table(const RationalMap& f, const BoundaryChain& chain,
                                   const std::vector<Table1Row>& rows = d4_table(), double table_tol = 1e-3,
                                   double modulus_tol = 1e-6) {
  TableReport rep;
  rep.table_tol = table_tol;
  rep.modulus_tol = modulus_tol;
  std::size_t row = 0;
  for (std::size_t i = 0; i < chain.arcs.size(); ++i) {
    const TracedArc& arc = chain.arcs[i];
    if (arc.kind != ArcKind::level) continue;
    if (row >= rows.size()) throw PreconditionError("chain has more level arcs than table rows");
    RowComparison c;
    c.expected = rows[row++];
    for (const auto& z : arc.samples) {
      const double m = std::abs(f(z));
      const double dev = std::abs(m - c.expected.modulus) / c.expected.modulus;
      if (dev >= c.modulus_rel_dev) {
        c.modulus_rel_dev = dev;
        c.modulus = m;
      }
    }
    c.total_change = arc.arg_lift.back() - arc.arg_lift.front();
    c.initial_arg = wrap_2pi(std::arg(f(arc.samples.front())));
    c.final_arg = wrap_2pi(std::arg(f(arc.samples.back())));
    c.change_dev = std::abs(c.total_change - c.expected.total_change);
    c.initial_dev = circle_distance(c.initial_arg, c.expected.initial_arg);
    c.final_dev = circle_distance(c.final_arg, c.expected.final_arg);
    c.ok = c.change_dev <= table_tol && c.initial_dev <= table_tol && c.final_dev <= table_tol &&
           c.modulus_rel_dev <= modulus_tol;
    rep.change_sum_expected += c.expected.total_change;
    rep.change_sum_measured += c.total_change;
    rep.rows.push_back(c);
  }
  if (row != rows.size()) throw PreconditionError("chain has fewer level arcs than table rows");
  return rep;
}

struct CounterexamplePoly {
  Polynomial p;
  std::vector<Complex> zeros;            // with multiplicity
  std::vector<Complex> critical_values;  // ordered by modulus
  double ratio = 3.0;
  int attempts = 1;
  std::vector<double> validation_levels;  // eps at which nesting was checked
};

namespace detail {

inline Polynomial spaced_poly(int n, double ratio, std::vector<Complex>& zeros) {
  zeros = {0.0, 0.0};
  double r = 1.0;
  for (int k = 0; k < n - 2; ++k) {
    zeros.push_back(-r);
    r *= ratio;
  }
  return Polynomial::from_roots(zeros);
}

// Throws NumericalError naming the offending pair of critical values.
inline std::vector<double> validate_nesting(const Polynomial& p, const std::vector<Complex>& cvs) {
  const std::vector<Root> zs = poly_roots(p);
  std::vector<Complex> distinct;
  for (const auto& z : zs) distinct.push_back(z.value);
  std::sort(distinct.begin(), distinct.end(), [](Complex a, Complex b) { return a.real() > b.real(); });
  std::vector<double> levels;
  for (std::size_t k = 0; k < cvs.size(); ++k) {
    const double lo = std::abs(cvs[k]);
    const double hi = k + 1 < cvs.size() ? std::abs(cvs[k + 1]) : 4.0 * std::max(lo, 1.0);
    auto fail = [&](const std::string& why) {
      std::ostringstream os;
      os << "counterexample nesting fails between critical values " << cvs[k] << " and "
         << (k + 1 < cvs.size() ? cvs[k + 1] : Complex{hi}) << ": " << why;
      throw NumericalError(os.str());
    };
    if (!(hi > lo * (1.0 + 1e-9))) fail("moduli are not strictly increasing");
    const double eps = lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * hi;
    const std::vector<Complex> inside(distinct.begin(), distinct.begin() + static_cast<std::ptrdiff_t>(k + 1));
    try {
      level_component_enclosing(p, eps, inside);
    } catch (const Error& e) {
      fail(e.what());
    }
    levels.push_back(eps);
  }
  return levels;
}

}  // namespace detail

// z^2 (z+1)(z+r)(z+r^2)... with geometric spacing r = 3, doubled on failure.
// The n-1 critical levels are checked to bound nested level components.
inline CounterexamplePoly construct_counterexample_poly(int n) {
  if (n < 4) throw PreconditionError("construct_counterexample_poly needs n >= 4");
  if (n > kMaxDegree) throw PreconditionError("construct_counterexample_poly: degree too large");
  double ratio = 3.0;
  std::string last_failure;
  for (int attempt = 1; attempt <= 5; ++attempt, ratio *= 2.0) {
    CounterexamplePoly out;
    out.ratio = ratio;
    out.attempts = attempt;
    out.p = detail::spaced_poly(n, ratio, out.zeros);
    out.critical_values = critical_values(out.p);
    std::stable_sort(out.critical_values.begin(), out.critical_values.end(),
                     [](Complex a, Complex b) { return std::abs(a) < std::abs(b); });
    try {
      out.validation_levels = detail::validate_nesting(out.p, out.critical_values);
      return out;
    } catch (const NumericalError& e) {
      last_failure = e.what();
    }
  }
  throw NumericalError("construct_counterexample_poly: no spacing validated; last failure: " + last_failure);
}

}  // namespace pseudolem
