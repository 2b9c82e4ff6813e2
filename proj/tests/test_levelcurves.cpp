#include <gtest/gtest.h>

#include "pseudolem/levelcurves.hpp"

using namespace pseudolem;

namespace {

constexpr double kPi = std::numbers::pi;

double max_level_deviation(const TracedArc& arc, double eps) {
  double m = 0.0;
  for (const auto& w : arc.f_values) m = std::max(m, std::abs(std::abs(w) - eps) / eps);
  return m;
}

Complex some_preimage(const RationalMap& f, Complex w) { return f.preimages(w).front().value; }

}  // namespace

TEST(SolveTarget, NewtonCases) {
  const RationalMap sq = Polynomial::monomial(2);
  EXPECT_NEAR(std::abs(solve_target(sq, 4.0, 1.9) - Complex{2.0}), 0.0, 1e-13);
  const RationalMap id = Polynomial::monomial(1);
  const Complex w0{0.3, -1.7};
  EXPECT_NEAR(std::abs(solve_target(id, w0, 0.0) - w0), 0.0, 1e-14);
  // Starting exactly on the critical point of z^2.
  EXPECT_THROW(solve_target(sq, 1.0, 0.0), CriticalPointError);
}

TEST(SolveTarget, F4VertexFromCoarseGrid) {
  const RationalMap f = f4();
  const Complex w{0.0, 8.0};
  Complex best{0.0};
  double bd = 1e300;
  for (int i = -20; i <= 20; ++i)
    for (int j = -20; j <= 20; ++j) {
      const Complex z{0.25 * i, 0.25 * j};
      if (std::abs(f(z) - w) < bd) {
        bd = std::abs(f(z) - w);
        best = z;
      }
    }
  const Complex v = solve_target(f, w, best);
  EXPECT_LE(std::abs(f(v) - w), 1e-12 * 8.0);
  EXPECT_NEAR(std::abs(f(v)), 8.0, 1e-12);
  EXPECT_NEAR(std::arg(f(v)), kPi / 2, 1e-12);
}

TEST(TraceLevel, IdentityUnitCircle) {
  const RationalMap id = Polynomial::monomial(1);
  const TracedArc arc = trace_level(id, 1.0, 1.0, 1, ClosedLoop{}, 0.05);
  EXPECT_NEAR(arg_change_along(arc), 2 * kPi, 1e-12);
  for (const auto& z : arc.samples) EXPECT_NEAR(std::abs(z), 1.0, 1e-13);
}

TEST(TraceLevel, F4V5V6ArcChange) {
  const RationalMap f = f4();
  const Complex v5 = some_preimage(f, Complex{0.0, 8.0});
  const TracedArc arc = trace_level(f, 8.0, v5, 1, HitsGradient{5 * kPi / 3, 1}, 0.05);
  EXPECT_NEAR(arg_change_along(arc), 7 * kPi / 6, 1e-12);
  EXPECT_NEAR(wrap_2pi(arc.arg_lift.back()), 5 * kPi / 3, 1e-12);
  EXPECT_LE(max_level_deviation(arc, 8.0), 1e-8);
  // Second crossing adds one full turn.
  const TracedArc arc2 = trace_level(f, 8.0, v5, 1, HitsGradient{5 * kPi / 3, 2}, 0.05);
  EXPECT_NEAR(arg_change_along(arc2), 7 * kPi / 6 + 2 * kPi, 1e-12);
}

TEST(TraceLevel, F4Level8LoopTurnsFourTimes) {
  const RationalMap f = f4();
  const TracedArc arc = trace_level(f, 8.0, some_preimage(f, 8.0), 1, ClosedLoop{}, 0.05);
  EXPECT_NEAR(arg_change_along(arc), 8 * kPi, 1e-9);
  EXPECT_LE(max_level_deviation(arc, 8.0), 1e-8);
  const SampledCurve loop = arc_to_closed_curve(arc);
  EXPECT_TRUE(is_jordan(loop));
  // Argument principle cross-check against the winding module.
  EXPECT_NEAR(arg_change_along(arc), 2 * kPi * count_preimages(f, loop, 0.0), 1e-6);
}

TEST(TraceLevel, ReverseReturnsToStart) {
  const RationalMap f = f4();
  const Complex start = some_preimage(f, std::polar(2.0, 0.4));
  const TracedArc fwd = trace_level(f, 2.0, start, 1, ArgChangeReaches{2.5}, 0.05);
  const TracedArc back = trace_level(f, 2.0, fwd.samples.back(), -1, ArgChangeReaches{-2.5}, 0.05);
  EXPECT_LE(std::abs(back.samples.back() - start), 10 * 0.05 * 1e-12 * 1e3);
  EXPECT_NEAR(arg_change_along(back), -2.5, 1e-12);
}

TEST(TraceLevel, Preconditions) {
  const RationalMap f = f4();
  EXPECT_THROW(trace_level(f, 8.0, 0.1, 1, ClosedLoop{}), PreconditionError);
  const Complex v = some_preimage(f, 8.0);
  EXPECT_THROW(trace_level(f, 8.0, v, 1, ArgChangeReaches{-1.0}), PreconditionError);
  EXPECT_THROW(trace_level(f, 8.0, v, 0, ClosedLoop{}), PreconditionError);
}

TEST(TraceLevel, CriticalLevelAborts) {
  // Lev(z^2 - 1, 1) passes through the critical point 0.
  const RationalMap f = Polynomial{-1.0, 0.0, 1.0};
  const Complex start = std::sqrt(Complex{2.0});
  EXPECT_THROW(trace_level(f, 1.0, start, 1, ClosedLoop{}, 0.05), CriticalPointError);
}

TEST(TraceGradient, IdentitySegment) {
  const RationalMap id = Polynomial::monomial(1);
  const TracedArc arc = trace_gradient(id, 0.0, 1.0, 2.0, 0.05);
  EXPECT_NEAR(std::abs(arc.samples.back() - Complex{2.0}), 0.0, 1e-13);
  for (const auto& z : arc.samples) EXPECT_NEAR(z.imag(), 0.0, 1e-14);
}

TEST(TraceGradient, F4ArgHeldAndModulusMonotone) {
  const RationalMap f = f4();
  const Complex start = some_preimage(f, std::polar(0.15, 3 * kPi / 2));
  const TracedArc arc = trace_gradient(f, 3 * kPi / 2, start, 0.6, 0.05);
  EXPECT_NEAR(std::abs(arc.f_values.back()), 0.6, 1e-12);
  for (std::size_t i = 0; i < arc.f_values.size(); ++i) {
    EXPECT_LE(circle_distance(std::arg(arc.f_values[i]), 3 * kPi / 2), 1e-8);
    if (i > 0) {
      EXPECT_GT(std::abs(arc.f_values[i]), std::abs(arc.f_values[i - 1]));
    }
  }
  // Descending direction.
  const TracedArc down = trace_gradient(f, 3 * kPi / 2, arc.samples.back(), 0.15, 0.05);
  EXPECT_NEAR(std::abs(down.samples.back() - start), 0.0, 1e-10);
  EXPECT_THROW(trace_gradient(f, 0.0, start, 0.6), PreconditionError);
}

TEST(LevelComponent, F4Components) {
  const RationalMap f = f4();
  const SampledCurve big = level_component_enclosing(f, 8.0, {0.0, -1.0, -3.0});
  EXPECT_TRUE(is_jordan(big));
  for (Complex z : {0.0, -1.0, -3.0}) EXPECT_EQ(winding_number(big, z), 1);

  const SampledCurve small = level_component_enclosing(f, 0.15, {0.0});
  EXPECT_EQ(winding_number(small, 0.0), 1);
  EXPECT_EQ(winding_number(small, -1.0), 0);
  EXPECT_EQ(winding_number(small, -3.0), 0);

  const SampledCurve mid = level_component_enclosing(f, 0.6, {0.0, -1.0}, 0.05);
  EXPECT_EQ(winding_number(mid, -3.0), 0);
  // 0 (double) and -1 enclosed: arg f turns 3 times.
  const TracedArc loop = trace_level(f, 0.6, mid[0], 1, ClosedLoop{}, 0.05);
  EXPECT_NEAR(arg_change_along(loop), 6 * kPi, 1e-9);
}

TEST(LevelComponent, IdentityAndFailure) {
  const RationalMap id = Polynomial::monomial(1);
  const SampledCurve c = level_component_enclosing(id, 1.0, {0.0});
  for (const auto& z : c.points()) EXPECT_NEAR(std::abs(z), 1.0, 1e-12);
  const RationalMap f = f4();
  // Below the smallest nonzero critical modulus 0 and -1 are separated.
  try {
    level_component_enclosing(f, 0.15, {0.0, -1.0});
    FAIL() << "expected failure";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("blocking critical value"), std::string::npos);
  }
  EXPECT_THROW(level_component_enclosing(f, 0.15, {0.5}), PreconditionError);
}
