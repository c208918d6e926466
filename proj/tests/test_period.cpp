#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace qflag;

namespace {

std::vector<Rational> ints(std::initializer_list<long> v) {
  std::vector<Rational> out;
  for (auto x : v) out.emplace_back(x);
  return out;
}

Quiver projective(int n) { return Quiver({{0, n + 1}, {0, 0}}, {1, 1}); }

}  // namespace

TEST(Period, ProjectiveLine) {
  EXPECT_EQ(period_sequence(projective(1), {}, 8).alpha, ints({1, 0, 2, 0, 6, 0, 20, 0, 70}));
}

TEST(Period, ProjectiveFourSpace) {
  EXPECT_EQ(period_sequence(projective(4), {}, 7).alpha, ints({1, 0, 0, 0, 0, 120, 0, 0}));
}

TEST(Period, QuadricAndGrassmannianAgree) {
  const auto quadric = period_sequence(projective(5), {{BundleSummand{{{2}}}}}, 8).alpha;
  EXPECT_EQ(quadric, ints({1, 0, 0, 0, 48, 0, 0, 0, 15120}));
  EXPECT_EQ(period_sequence(grassmannian(4, 2), {}, 8).alpha, quadric);
}

TEST(Period, GrassmannianFiveTwo) {
  const auto a = period_sequence(grassmannian(5, 2), {}, 5).alpha;
  EXPECT_EQ(a[5], 360);
}

TEST(Period, ProductOfLineAndThreeSpace) {
  const Quiver q({{0, 2, 4}, {0, 0, 0}, {0, 0, 0}}, {1, 1, 1});
  EXPECT_EQ(period_sequence(q, {}, 7).alpha, ints({1, 0, 2, 0, 30, 0, 740, 0}));
}

TEST(Period, ToricVarietiesMatchClosedForm) {
  int checked = 0;
  for (const auto& rec : classify_fano(3)) {
    const auto lq = load_quiver(rec.quiver);
    if (!lq.quiver.is_toric()) continue;
    EXPECT_EQ(raw_period(lq.quiver, {}, 6), oracle::toric_period(lq.quiver, 6)) << "id " << rec.id;
    ++checked;
  }
  EXPECT_GT(checked, 10);
}

TEST(Period, SpecializationIndependence) {
  EXPECT_TRUE(cross_check_specialization(grassmannian(5, 2), {}, 6));
  const Quiver flag({{0, 4, 0}, {0, 0, 2}, {0, 0, 0}}, {1, 2, 1});
  ASSERT_TRUE(is_fano(flag));
  EXPECT_TRUE(cross_check_specialization(flag, {}, 6));
  const PeriodContext ctx(grassmannian(4, 2), {});
  EXPECT_THROW(ctx.raw_period(4, {1, 1}), Error);
  EXPECT_THROW(ctx.raw_period(4, {1}), Error);
}

TEST(Period, RationalFunctionLaurentSeries) {
  // (1 + 2 eps) / eps = 1/eps + 2
  UnivariateRationalFunction f(Rational(1));
  f.multiply_linear(Rational(1), Rational(2), 1);
  f.multiply_linear(Rational(0), Rational(1), -1);
  EXPECT_EQ(f.valuation(), -1);
  EXPECT_EQ(f.laurent(-1, 1), ints({1, 2, 0}));
  EXPECT_THROW(f.value_at_zero(), Error);
  UnivariateRationalFunction g(Rational(3));
  g.multiply_linear(Rational(1), Rational(1), -1);
  EXPECT_EQ(g.value_at_zero(), 3);
  EXPECT_EQ(g.laurent(0, 3), ints({3, -3, 3, -3}));
}

TEST(Period, RegularizationRemovesFirstOrderTerm) {
  // P(t) = e^{2t}: G = 1
  std::vector<Rational> c;
  for (int k = 0; k <= 5; ++k) c.push_back(Rational(1 << k) / factorial(k));
  EXPECT_EQ(regularize(c).alpha, ints({1, 0, 0, 0, 0, 0}));
}

TEST(Period, FiberSign) {
  const Quiver g = grassmannian(4, 2);
  EXPECT_EQ(fiber_sign(g, {1}), -1);
  EXPECT_EQ(fiber_sign(g, {2}), 1);
  EXPECT_EQ(fiber_sign(projective(3), {5}), 1);
}
