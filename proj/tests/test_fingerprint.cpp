#include <gtest/gtest.h>

#include "pseudolem/fingerprint.hpp"

using namespace pseudolem;

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};

double lift_distance(double a, double b) { return std::abs(std::remainder(a - b, 2 * kPi)); }

std::vector<double> linear_lift(std::size_t m, int d, double shift = 0.0) {
  std::vector<double> v;
  for (double t : uniform_angles(m)) v.push_back(d * t + shift);
  return v;
}

}  // namespace

TEST(CircleMapTest, ReproducesSamplesAndInverts) {
  std::vector<double> v;
  for (double t : uniform_angles(64)) v.push_back(t + 0.3 * std::sin(t));
  const CircleMap m(v);
  const auto t = uniform_angles(64);
  for (std::size_t k = 0; k < 64; ++k) EXPECT_NEAR(m(t[k]), v[k], 1e-13);
  for (double s : {0.1, 1.7, 4.0, 8.5, -2.0}) {
    EXPECT_NEAR(m(s), s + 0.3 * std::sin(s), 1e-13);
    EXPECT_NEAR(m.inverse(m(s)), s, 1e-12);
    EXPECT_NEAR(m.derivative(s), 1.0 + 0.3 * std::cos(s), 1e-12);
  }
  EXPECT_DOUBLE_EQ(m.total_increase(), 2 * kPi);
  EXPECT_GT(m.min_increment(), 0.0);
}

TEST(CircleMapTest, Rejections) {
  EXPECT_THROW(CircleMap({0.0, 1.0, 2.0}), PreconditionError);
  EXPECT_THROW(CircleMap({0.0, 1.0, 0.5, 2.0}), PreconditionError);
  EXPECT_THROW(CircleMap({0.0, 1.0, 2.0, 7.0}), PreconditionError);
  EXPECT_THROW(CircleMap(linear_lift(8, 1), 0), PreconditionError);
}

TEST(CircleMapTest, UnwrapsSamples) {
  std::vector<double> v;
  for (double t : uniform_angles(32)) v.push_back(std::remainder(2 * t, 2 * kPi));
  const CircleMap m = circle_map_from_samples(v, 2);
  EXPECT_NEAR(m(kPi), 2 * kPi, 1e-12);
}

TEST(CircleMapTest, NthRootLift) {
  const CircleMap m(linear_lift(16, 3, 0.6), 3);
  const CircleMap r0 = nth_root_lift(m, 3), r1 = nth_root_lift(m, 3, 1);
  EXPECT_EQ(r0.degree(), 1);
  EXPECT_NEAR(r0(1.0), 1.0 + 0.2, 1e-13);
  EXPECT_NEAR(r1(1.0), 1.0 + 0.2 + 2 * kPi / 3, 1e-13);
  EXPECT_THROW(nth_root_lift(m, 2), PreconditionError);
}

TEST(Blaschke, PowerAndSingleZero) {
  const BlaschkeProduct sq{{0.0, 0.0}, 1.0};
  for (double t : uniform_angles(16)) {
    const Complex z = std::polar(1.0, t);
    EXPECT_LT(std::abs(blaschke_eval(sq, z) - z * z), 1e-15);
    EXPECT_NEAR(blaschke_lift(sq, t), 2 * t, 1e-14);
  }
  const Complex a{0.5, 0.2};
  const BlaschkeProduct b{{a}, kI};
  EXPECT_LT(std::abs(blaschke_eval(b, a)), 1e-15);
  for (double t : uniform_angles(16)) {
    const Complex z = std::polar(1.0, t);
    const Complex want = kI * (z - a) / (1.0 - std::conj(a) * z);
    EXPECT_NEAR(std::abs(blaschke_eval(b, z)), 1.0, 1e-14);
    EXPECT_LT(lift_distance(blaschke_lift(b, t), std::arg(want)), 1e-13);
  }
  EXPECT_NEAR(blaschke_lift(b, 2 * kPi) - blaschke_lift(b, 0.0), 2 * kPi, 1e-13);
}

TEST(Blaschke, CircleMapAndValidation) {
  const BlaschkeProduct b{{Complex{0.3, -0.4}, -0.6, 0.1}, std::polar(1.0, 0.7)};
  const CircleMap m = circle_map_of_blaschke(b, 256);
  EXPECT_EQ(m.degree(), 3);
  EXPECT_DOUBLE_EQ(m.total_increase(), 6 * kPi);
  EXPECT_THROW(blaschke_eval(BlaschkeProduct{{1.2}, 1.0}, 0.0), PreconditionError);
  EXPECT_THROW(blaschke_eval(BlaschkeProduct{{0.0}, 2.0}, 0.0), PreconditionError);
  EXPECT_THROW(circle_map_of_blaschke(BlaschkeProduct{{}, 1.0}), PreconditionError);
}

TEST(Fingerprint, CircleIsIdentity) {
  const CircleMap k = fingerprint_of_curve(circle_curve(0.0, 2.5, 128), 128);
  for (double t : uniform_angles(40)) EXPECT_NEAR(k(t), t, 1e-11);
}

TEST(Fingerprint, EllipseSymmetricAndScaleInvariant) {
  const CircleMap k = fingerprint_of_curve(ellipse_curve(1.0, 0.6, 256), 512);
  const CircleMap k2 = fingerprint_of_curve(ellipse_curve(2.0, 1.2, 256), 512);
  EXPECT_NEAR(k(0.0), 0.0, 1e-10);
  EXPECT_NEAR(k(kPi / 2), kPi / 2, 1e-10);
  EXPECT_NEAR(k(kPi), kPi, 1e-10);
  for (double t : uniform_angles(32)) {
    EXPECT_NEAR(k(-t), -k(t), 1e-10);
    EXPECT_NEAR(k2(t), k(t), 1e-10);
  }
  double dev = 0.0;
  for (double t : uniform_angles(32)) dev = std::max(dev, std::abs(k(t) - t));
  EXPECT_GT(dev, 1e-3);
}

TEST(Fingerprint, EllipseNodeDoubling) {
  const SampledCurve e = ellipse_curve(1.0, 0.6, 256);
  const CircleMap a = fingerprint_of_curve(e, 512), b = fingerprint_of_curve(e, 1024);
  for (double t : uniform_angles(64)) EXPECT_LT(std::abs(a(t) - b(t)), 1e-5);
}

TEST(PseudoLemniscate, IdentityReturnsGamma) {
  const SampledCurve e = ellipse_curve(1.0, 0.6, 128);
  const SampledCurve lem = pseudo_lemniscate(Polynomial::monomial(1), e, 128);
  ASSERT_EQ(lem.size(), 128u);
  for (std::size_t k = 0; k < 128; ++k) EXPECT_LT(std::abs(lem[k] - e[k]), 1e-12);
}

TEST(PseudoLemniscate, SquareOnCircleRadiusFour) {
  const SampledCurve lem = pseudo_lemniscate(Polynomial::monomial(2), circle_curve(0.0, 4.0, 64), 64);
  ASSERT_EQ(lem.size(), 128u);
  for (const auto& z : lem.points()) EXPECT_NEAR(std::abs(z), 2.0, 1e-12);
  EXPECT_EQ(winding_number(lem, 0.0), 1);
  EXPECT_TRUE(is_jordan(lem));
}

TEST(PseudoLemniscate, CoversGammaDegreeTimes) {
  const Polynomial p{-0.1, 0.0, 1.0};
  const std::size_t m = 256;
  const SampledCurve lem = pseudo_lemniscate(p, unit_circle(m), m);
  ASSERT_EQ(lem.size(), 2 * m);
  for (std::size_t k = 0; k < lem.size(); ++k)
    EXPECT_LT(std::abs(p(lem[k]) - std::polar(1.0, 2 * kPi * static_cast<double>(k) / m)), 1e-12);
  EXPECT_TRUE(is_jordan(lem));
  EXPECT_EQ(winding_number(lem, 0.0), 1);
  EXPECT_EQ(winding_number(lem, std::sqrt(0.1)), 1);
}

TEST(PseudoLemniscate, ImproperRejectedAndSplit) {
  const Polynomial p{-4.0, 0.0, 1.0};
  EXPECT_THROW(pseudo_lemniscate(p, unit_circle(128)), PreconditionError);
  const auto comps = pseudo_lemniscate_components(p, unit_circle(128), 128);
  ASSERT_EQ(comps.size(), 2u);
  for (const auto& c : comps) {
    EXPECT_EQ(c.size(), 128u);
    for (const auto& z : c.points()) EXPECT_NEAR(std::abs(p(z)), 1.0, 1e-12);
  }
}

TEST(Properness, Examples) {
  const SampledCurve t = unit_circle(256);
  const SampledCurve e = ellipse_curve(1.0, 0.6, 256);
  EXPECT_TRUE(is_proper(Polynomial{-0.1, 0.0, 1.0}, t));
  EXPECT_FALSE(is_proper(Polynomial{-4.0, 0.0, 1.0}, t));
  EXPECT_TRUE(is_proper(Polynomial{0.0, -0.3, 0.0, 1.0}, e));
  EXPECT_FALSE(is_proper(Polynomial{0.0, -3.0, 0.0, 1.0}, e));
  EXPECT_TRUE(is_proper(Polynomial{2.0, 1.0}, t));
  EXPECT_THROW(is_proper(Polynomial::constant(1.0), t), PreconditionError);
}

TEST(Properness, OracleAgrees) {
  const SampledCurve t = unit_circle(256);
  const SampledCurve e = ellipse_curve(1.0, 0.6, 256);
  const ProperOracleResult bad = is_proper_oracle_detail(Polynomial{-4.0, 0.0, 1.0}, t, ProperGrid{});
  EXPECT_FALSE(bad.proper);
  EXPECT_EQ(bad.components, 2);
  EXPECT_TRUE(is_proper_oracle(Polynomial{-0.1, 0.0, 1.0}, t));
  EXPECT_TRUE(is_proper_oracle(Polynomial{0.0, -0.3, 0.0, 1.0}, e));
  EXPECT_FALSE(is_proper_oracle(Polynomial{0.0, -3.0, 0.0, 1.0}, e));
  EXPECT_TRUE(is_proper_oracle(Polynomial{0.5 * kI, 0.0, 1.0}, t));
}

TEST(BlaschkeModel, PowersGivePowers) {
  for (int n = 1; n <= 3; ++n) {
    const BlaschkeProduct b = blaschke_model(Polynomial::monomial(n), unit_circle(256), 256);
    ASSERT_EQ(b.degree(), n);
    for (const auto& a : b.zeros) EXPECT_LT(std::abs(a), 1e-10);
    EXPECT_LT(std::abs(b.rotation - 1.0), 1e-10);
  }
}

TEST(BlaschkeModel, SymmetricZeros) {
  const BlaschkeProduct b = blaschke_model(Polynomial{-0.1, 0.0, 1.0}, unit_circle(256), 512);
  ASSERT_EQ(b.degree(), 2);
  EXPECT_LT(std::abs(b.zeros[0] + b.zeros[1]), 1e-10);
  EXPECT_LT(std::abs(b.zeros[0].imag()), 1e-10);
  EXPECT_GT(std::abs(b.zeros[0]), 0.1);
  EXPECT_LT(std::abs(b.rotation - 1.0), 1e-10);
}

TEST(Identity, PowersOnCircle) {
  for (int n = 1; n <= 4; ++n) EXPECT_LE(verify_identity(Polynomial::monomial(n), unit_circle(256), 256, 256), 1e-10) << n;
}

TEST(Identity, ConvergesOnCircle) {
  const Polynomial p{-0.1, 0.0, 1.0};
  const SampledCurve t = unit_circle(512);
  double prev = verify_identity(p, t, 512, 16);
  for (std::size_t n = 32; n <= 1024; n *= 2) {
    const double r = verify_identity(p, t, 512, n);
    if (prev > 1e-12) {
      EXPECT_LT(r, prev) << n;
    } else {
      EXPECT_LE(r, prev) << n;
    }
    prev = r;
  }
  EXPECT_LE(prev, 1e-4);
}

TEST(Identity, EllipseCubic) {
  EXPECT_LE(verify_identity(Polynomial{0.0, -0.3, 0.0, 1.0}, ellipse_curve(1.0, 0.6, 256), 512, 1024), 1e-4);
}

TEST(Identity, RotatedInputAndNormalization) {
  const Polynomial p{-0.1, 0.0, Complex{0.0, 1.0}};
  const FingerprintModel m = fingerprint_model(p, unit_circle(256), 512);
  EXPECT_GT(m.p[2].real(), 0.0);
  EXPECT_NEAR(m.p[2].imag(), 0.0, 1e-14);
  EXPECT_LE(verify_identity(m), 1e-6);
}

TEST(Identity, ResidualDetectsMismatch) {
  auto id = [](double t) { return t; };
  EXPECT_NEAR(identity_residual(2, id, id, [](double t) { return 2 * t; }, 64), 0.0, 1e-14);
  EXPECT_NEAR(identity_residual(2, id, id, [](double t) { return 2 * t + 0.5; }, 64), 0.5, 1e-14);
  EXPECT_NEAR(identity_residual(2, [](double t) { return t + kPi; }, id, [](double t) { return 2 * t; }, 64), 0.0,
              1e-13);
}

TEST(Identity, ModelMapsAreMonotone) {
  const FingerprintModel m = fingerprint_model(Polynomial{0.0, -0.3, 0.0, 1.0}, ellipse_curve(1.0, 0.6, 256), 512);
  for (const CircleMap* k : {&m.k_gamma, &m.k_p}) {
    EXPECT_GT(k->min_increment(), 0.0);
    EXPECT_NEAR(k->values().front() + k->total_increase() - k->values().front(), 2 * kPi, 1e-15);
  }
}
