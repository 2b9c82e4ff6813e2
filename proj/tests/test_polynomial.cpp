#include <gtest/gtest.h>

#include <random>

#include "pseudolem/polynomial.hpp"

using namespace pseudolem;

namespace {

bool contains_root(const std::vector<Root>& roots, Complex z, int mult, double tol) {
  for (const auto& r : roots)
    if (std::abs(r.value - z) <= tol && r.multiplicity == mult) return true;
  return false;
}

}  // namespace

TEST(Polynomial, EvalMatchesHandArithmetic) {
  EXPECT_NEAR(std::abs(f4()(1.0) - Complex{8.0}), 0.0, 1e-14);
  const Polynomial p{Complex{2.5, -1.0}, 3.0, 7.0};
  EXPECT_EQ(poly_eval(p, 0.0), Complex(2.5, -1.0));
  EXPECT_NEAR(std::abs(Polynomial::monomial(2)(Complex{0, 1}) - Complex{-1.0}), 0.0, 1e-15);
}

TEST(Polynomial, TrimsLeadingZerosAndRejectsHugeDegree) {
  const Polynomial p{1.0, 2.0, 0.0, 0.0};
  EXPECT_EQ(p.degree(), 1);
  EXPECT_TRUE(Polynomial{0.0}.is_zero());
  EXPECT_THROW(Polynomial(std::vector<Complex>{}), PreconditionError);
  EXPECT_THROW(Polynomial::monomial(65), PreconditionError);
  EXPECT_NO_THROW(Polynomial::monomial(64));
}

TEST(Polynomial, Derivative) {
  const Polynomial d = poly_derivative(Polynomial::monomial(2));
  ASSERT_EQ(d.degree(), 1);
  EXPECT_EQ(d[1], Complex{2.0});
  EXPECT_EQ(d[0], Complex{0.0});
  EXPECT_TRUE(poly_derivative(Polynomial::constant(5.0)).is_zero());
  const Polynomial df4 = poly_derivative(f4());
  ASSERT_EQ(df4.degree(), 3);
  EXPECT_EQ(df4[0], Complex{0.0});
  EXPECT_EQ(df4[1], Complex{6.0});
  EXPECT_EQ(df4[2], Complex{12.0});
  EXPECT_EQ(df4[3], Complex{4.0});
}

TEST(Polynomial, F4IsExpandedProduct) {
  const std::vector<Complex> r{0.0, 0.0, -1.0, -3.0};
  const Polynomial p = Polynomial::from_roots(r);
  ASSERT_EQ(p.degree(), 4);
  for (int k = 0; k <= 4; ++k) EXPECT_EQ(p[static_cast<std::size_t>(k)], f4()[static_cast<std::size_t>(k)]);
}

TEST(PolyRoots, F4) {
  const auto roots = poly_roots(f4());
  ASSERT_EQ(roots.size(), 3u);
  EXPECT_TRUE(contains_root(roots, 0.0, 2, 1e-12));
  EXPECT_TRUE(contains_root(roots, -1.0, 1, 1e-12));
  EXPECT_TRUE(contains_root(roots, -3.0, 1, 1e-12));
}

TEST(PolyRoots, ConjugatePairAndTripleRoot) {
  const auto r1 = poly_roots(Polynomial{1.0, 0.0, 1.0});
  EXPECT_TRUE(contains_root(r1, Complex{0, 1}, 1, 1e-13));
  EXPECT_TRUE(contains_root(r1, Complex{0, -1}, 1, 1e-13));

  const std::vector<Complex> triple{2.0, 2.0, 2.0};
  const auto r2 = poly_roots(Polynomial::from_roots(triple), 1e-4);
  ASSERT_EQ(r2.size(), 1u);
  EXPECT_EQ(r2[0].multiplicity, 3);
  EXPECT_NEAR(std::abs(r2[0].value - Complex{2.0}), 0.0, 1e-10);
}

TEST(PolyRoots, RejectsConstant) { EXPECT_THROW(poly_roots(Polynomial::constant(3.0)), PreconditionError); }

TEST(PolyRoots, ProductReproducesCoefficients) {
  std::mt19937_64 rng(20150224);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_int_distribution<int> deg(1, 6);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = deg(rng);
    std::vector<Complex> c(static_cast<std::size_t>(n) + 1);
    for (auto& x : c) x = Complex{u(rng), u(rng)};
    if (std::abs(c.back()) < 0.1) c.back() = 1.0;
    const Polynomial p(c);
    const auto roots = poly_roots(p, 1e-9);
    const auto expanded = expand_roots(roots);
    ASSERT_EQ(static_cast<int>(expanded.size()), n);
    const Polynomial q = Polynomial::from_roots(expanded, p.leading());
    for (int k = 0; k <= n; ++k)
      EXPECT_LE(std::abs(q[static_cast<std::size_t>(k)] - p[static_cast<std::size_t>(k)]), 1e-8 * p.max_coeff())
          << "trial " << trial << " k " << k;
  }
}

TEST(CriticalPoints, F4ClosedForm) {
  const auto cps = critical_points(f4());
  ASSERT_EQ(cps.size(), 3u);
  const double s3 = std::sqrt(3.0);
  for (Complex expect : {Complex{0.0}, Complex{(-3.0 + s3) / 2}, Complex{(-3.0 - s3) / 2}}) {
    bool found = false;
    for (const auto& c : cps) found = found || std::abs(c - expect) < 1e-12;
    EXPECT_TRUE(found) << expect;
  }
  const auto cvs = critical_values(f4());
  std::vector<double> re;
  for (const auto& v : cvs) re.push_back(v.real());
  std::sort(re.begin(), re.end());
  EXPECT_NEAR(re[0], -4.84807621135332, 1e-12);
  EXPECT_NEAR(re[1], 0.0, 1e-14);
  EXPECT_NEAR(re[2], 0.348076211353316, 1e-12);
}

TEST(CriticalPoints, SimpleCases) {
  const auto c2 = critical_points(Polynomial::monomial(2));
  ASSERT_EQ(c2.size(), 1u);
  EXPECT_EQ(c2[0], Complex{0.0});
  EXPECT_THROW(critical_points(Polynomial{1.0, 1.0}), PreconditionError);

  const Polynomial cubic{0.0, -0.3, 0.0, 1.0};
  auto cps = critical_points(cubic);
  ASSERT_EQ(cps.size(), 2u);
  std::sort(cps.begin(), cps.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
  EXPECT_NEAR(std::abs(cps[0] + std::sqrt(0.1)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(cps[1] - std::sqrt(0.1)), 0.0, 1e-14);
  EXPECT_NEAR(cubic(cps[0]).real(), 0.0632455532033676, 1e-14);
  EXPECT_NEAR(cubic(cps[1]).real(), -0.0632455532033676, 1e-14);
}

TEST(CriticalPoints, CountIsDegreeMinusOne) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int n = 2; n <= 9; ++n) {
    std::vector<Complex> c(static_cast<std::size_t>(n) + 1);
    for (auto& x : c) x = Complex{u(rng), u(rng)};
    c.back() = 1.0;
    EXPECT_EQ(static_cast<int>(critical_points(Polynomial(c)).size()), n - 1);
  }
  // repeated critical point of z^5
  EXPECT_EQ(critical_points(Polynomial::monomial(5)).size(), 4u);
}

TEST(Polynomial, DerivativeMatchesFiniteDifference) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Complex> c(6);
  for (auto& x : c) x = Complex{u(rng), u(rng)};
  const Polynomial p(c);
  const Polynomial dp = poly_derivative(p);
  const double h = 1e-6;
  int checked = 0;
  while (checked < 100) {
    const Complex z{u(rng), u(rng)};
    if (std::abs(z) >= 1.0) continue;
    const Complex fd = (p(z + h) - p(z - h)) / (2 * h);
    EXPECT_LE(std::abs(fd - dp(z)), 1e-6);
    ++checked;
  }
}

TEST(Polynomial, NormalizeLeadingRotatesArgument) {
  const Polynomial p{0.5, 0.0, Complex{0.0, 2.0}};
  const auto [q, beta] = normalize_leading(p);
  EXPECT_EQ(q.leading().imag(), 0.0);
  EXPECT_GT(q.leading().real(), 0.0);
  const Complex z{0.3, -0.7};
  EXPECT_NEAR(std::abs(q(z) - p(std::polar(1.0, beta) * z)), 0.0, 1e-14);
}

TEST(RationalMap, EvalDerivativeAndCommonRoots) {
  const RationalMap inv(Polynomial::constant(1.0), Polynomial{0.0, 1.0});
  EXPECT_NEAR(std::abs(inv(Complex{2.0}) - 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(inv.derivative(Complex{2.0}) + 0.25), 0.0, 1e-15);
  ASSERT_EQ(inv.poles().size(), 1u);
  const std::vector<Complex> shared{0.5};
  const std::vector<Complex> num_roots{0.5, -2.0};
  EXPECT_THROW(RationalMap(Polynomial::from_roots(num_roots), Polynomial::from_roots(shared)), PreconditionError);
  EXPECT_THROW(RationalMap(Polynomial::constant(1.0), Polynomial{0.0}), PreconditionError);
}
