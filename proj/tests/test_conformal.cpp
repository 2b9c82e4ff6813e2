#include <gtest/gtest.h>

#include <random>

#include "pseudolem/conformal.hpp"

using namespace pseudolem;

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};

double circle_distance(double a, double b) { return std::abs(std::remainder(a - b, 2 * kPi)); }

Complex mobius(Complex w) { return (w + 0.3) / (1.0 + 0.3 * w); }

std::vector<Complex> interior_points(int n, double rmax, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> r(0.0, rmax), a(0.0, 2 * kPi);
  std::vector<Complex> out;
  for (int i = 0; i < n; ++i) out.push_back(std::polar(r(rng), a(rng)));
  return out;
}

}  // namespace

TEST(InteriorMap, UnitCircleIsIdentity) {
  const DiskMap m = interior_map(unit_circle(128), 64);
  EXPECT_NEAR(m.center_derivative(), 1.0, 1e-12);
  for (double t : uniform_angles(64)) {
    EXPECT_LT(std::abs(map_boundary_forward(m, t) - std::polar(1.0, t)), 1e-12);
    EXPECT_NEAR(m.theta_at(t), t, 1e-12);
  }
}

TEST(InteriorMap, ShiftedCircleIsAffine) {
  const Complex c{1.0, 1.0};
  const DiskMap m = interior_map(circle_curve(c, 2.0, 128), 128, c);
  EXPECT_NEAR(m.center_derivative(), 2.0, 1e-12);
  for (const auto& w : interior_points(50, 0.95, 1)) EXPECT_LT(std::abs(map_interior_eval(m, w) - (c + 2.0 * w)), 1e-12);
}

TEST(InteriorMap, MobiusCenter) {
  const DiskMap m = interior_map(unit_circle(256), 256, 0.3);
  EXPECT_NEAR(m.center_derivative(), 0.91, 1e-10);
  for (double t : uniform_angles(64)) EXPECT_LT(std::abs(map_boundary_forward(m, t) - mobius(std::polar(1.0, t))), 1e-10);
  for (const auto& w : interior_points(100, 0.99, 2)) EXPECT_LT(std::abs(map_interior_eval(m, w) - mobius(w)), 1e-10);
  EXPECT_LT(std::abs(m.derivative(0.2) - 0.91 / std::pow(1.0 + 0.06, 2)), 1e-10);
}

TEST(InteriorMap, OffCenterDisk) {
  auto phi = [](Complex w) { return 0.3 + (w - 0.3) / (1.0 - 0.3 * w); };
  const DiskMap m = interior_map(circle_curve(0.3, 1.0, 256), 512);
  EXPECT_NEAR(m.center_derivative(), 0.91, 1e-10);
  for (double t : uniform_angles(64)) EXPECT_LT(std::abs(map_boundary_forward(m, t) - phi(std::polar(1.0, t))), 1e-10);
  for (const auto& w : interior_points(100, 0.99, 4)) EXPECT_LT(std::abs(map_interior_eval(m, w) - phi(w)), 1e-10);
  EXPECT_LT(std::abs(map_interior_eval(interior_map(circle_curve(0.0, 2.0, 64), 64), 0.5) - 1.0), 1e-12);
}

TEST(InteriorMap, BoundaryRoundTrip) {
  const DiskMap m = interior_map(ellipse_curve(1.0, 0.6, 256), 512);
  for (double t : uniform_angles(64)) {
    const Complex z = map_boundary_forward(m, t);
    EXPECT_LT(circle_distance(map_boundary_inverse(m, z), t), 1e-10);
  }
}

TEST(InteriorMap, InteriorRoundTrip) {
  const DiskMap m = interior_map(ellipse_curve(1.0, 0.6, 256), 512);
  for (const auto& w : interior_points(50, 0.95, 3)) {
    const Complex z = map_interior_eval(m, w);
    EXPECT_LT(std::abs(map_interior_inverse(m, z) - w), 1e-9);
  }
}

TEST(InteriorMap, EllipseSymmetry) {
  const DiskMap m = interior_map(ellipse_curve(1.0, 0.6, 256), 1024);
  EXPECT_LT(std::abs(map_boundary_forward(m, 0.0) - 1.0), 1e-10);
  EXPECT_LT(std::abs(map_boundary_forward(m, kPi / 2) - 0.6 * kI), 1e-10);
  EXPECT_LT(std::abs(map_boundary_forward(m, kPi) + 1.0), 1e-10);
  for (double t : uniform_angles(32)) {
    const Complex z = map_boundary_forward(m, t);
    EXPECT_LT(std::abs(map_boundary_forward(m, -t) - std::conj(z)), 1e-10);
    EXPECT_NEAR(std::norm(z.real()) + std::norm(z.imag() / 0.6), 1.0, 1e-10);
  }
  for (const auto& c : m.taylor()) EXPECT_LT(std::abs(c.imag()), 1e-10);
}

TEST(InteriorMap, NodeDoublingConverges) {
  const SampledCurve e = ellipse_curve(1.0, 0.6, 256);
  const DiskMap a = interior_map(e, 512), b = interior_map(e, 1024);
  double change = 0.0;
  for (double t : uniform_angles(64)) change = std::max(change, std::abs(a.boundary_point(t) - b.boundary_point(t)));
  EXPECT_LE(change, 1e-6);
  EXPECT_NEAR(a.center_derivative(), b.center_derivative(), 1e-6);
  const DiskMap c = interior_map_converged(e, 256);
  EXPECT_GE(c.nodes(), 512u);
}

TEST(InteriorMap, ThetaIsMonotone) {
  const DiskMap m = interior_map(ellipse_curve(1.0, 0.3, 256), 512);
  const auto& th = m.theta_nodes();
  for (std::size_t i = 1; i < th.size(); ++i) EXPECT_GT(th[i], th[i - 1]);
  EXPECT_LT(th.back() - th.front(), 2 * kPi);
  for (double t : uniform_angles(97)) EXPECT_GT(m.theta_derivative(t), 0.0);
}

TEST(InteriorMap, Rejections) {
  const SampledCurve e = ellipse_curve(1.0, 0.6, 256);
  EXPECT_THROW(interior_map(e, 512, 2.0), PreconditionError);
  EXPECT_THROW(interior_map(e, 500), PreconditionError);
  std::vector<Complex> rev(e.points().rbegin(), e.points().rend());
  EXPECT_THROW(interior_map(SampledCurve(rev, true), 512), PreconditionError);
  const DiskMap m = interior_map(e, 128);
  EXPECT_THROW(map_interior_eval(m, 0.9995), PreconditionError);
  EXPECT_THROW(map_boundary_inverse(m, 0.5), PreconditionError);
}

TEST(ExteriorMap, CircleRadiusThree) {
  const ExteriorMap m = exterior_map(circle_curve(0.0, 3.0, 128), 128);
  EXPECT_NEAR(m.leading_coefficient(), 3.0, 1e-12);
  for (double t : uniform_angles(64)) EXPECT_LT(std::abs(map_boundary_forward(m, t) - std::polar(3.0, t)), 1e-11);
}

TEST(ExteriorMap, EllipseJoukowski) {
  const ExteriorMap m = exterior_map(ellipse_curve(1.0, 0.6, 256), 512);
  EXPECT_NEAR(m.leading_coefficient(), 0.8, 1e-12);
  for (double t : uniform_angles(64)) {
    const Complex w = std::polar(1.0, t);
    EXPECT_LT(std::abs(map_boundary_forward(m, t) - (0.8 * w + 0.2 / w)), 1e-12);
    EXPECT_LT(circle_distance(map_boundary_inverse(m, 0.8 * w + 0.2 / w), t), 1e-12);
  }
}

TEST(ExteriorMap, OffCenterSolveMatches) {
  const SampledCurve e = ellipse_curve(1.0, 0.6, 256);
  const ExteriorMap a = exterior_map(e, 512), b = exterior_map(e, 512, Complex{0.2, -0.1});
  EXPECT_NEAR(a.leading_coefficient(), b.leading_coefficient(), 1e-10);
  for (double t : uniform_angles(32)) EXPECT_LT(std::abs(a.boundary_point(t) - b.boundary_point(t)), 1e-10);
}

TEST(ExteriorMap, ConvergedAndRejections) {
  const SampledCurve e = ellipse_curve(1.0, 0.6, 256);
  const ExteriorMap m = exterior_map_converged(e, 64);
  EXPECT_NEAR(m.leading_coefficient(), 0.8, 1e-8);
  EXPECT_THROW(exterior_map(e, 512, 3.0), PreconditionError);
  EXPECT_THROW(exterior_map(e, 8), PreconditionError);
}
