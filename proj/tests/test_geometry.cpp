#include "oracles.hpp"

#include "tmiter/geometry.hpp"

#include <gtest/gtest.h>

using namespace tmiter;

namespace {

Vec v1(double a) { return Vec::Constant(1, a); }
Vec v2(double a, double b) { return Vec{{a, b}}; }

const TreePoint& tp(const Point& p) { return std::get<TreePoint>(p); }

}  // namespace

TEST(Euclidean, CombineOnTheLine) {
  EuclideanSpace R1(1);
  const Point m = combine(R1, v1(0), v1(2), 0.25);
  EXPECT_DOUBLE_EQ(std::get<Vec>(m)[0], 0.5);
  EXPECT_DOUBLE_EQ(dist(R1, v1(0), m), 0.25 * dist(R1, v1(0), v1(2)));
}

TEST(Euclidean, Distance345) {
  EuclideanSpace R2(2);
  EXPECT_DOUBLE_EQ(dist(R2, v2(0, 0), v2(3, 4)), 5.0);
}

TEST(Euclidean, RejectsBadInput) {
  EuclideanSpace R2(2);
  EXPECT_THROW(combine(R2, v2(0, 0), v2(1, 1), 1.5), std::domain_error);
  EXPECT_THROW(combine(R2, v2(0, 0), v2(1, 1), -0.1), std::domain_error);
  EXPECT_THROW(dist(R2, v2(0, 0), v1(1)), GeometryError);
  EXPECT_THROW(R2.validate(v1(1)), GeometryError);
  EXPECT_THROW(R2.validate(v2(0, std::nan(""))), GeometryError);
  EXPECT_THROW(R2.validate(TreePoint::origin()), GeometryError);
  EXPECT_THROW(EuclideanSpace(0), GeometryError);
}

TEST(StarTree, MidpointAcrossRaysIsOrigin) {
  StarTreeSpace T(3);
  const Point m = combine(T, TreePoint{1, 1.0}, TreePoint{2, 1.0}, 0.5);
  EXPECT_EQ(tp(m), TreePoint::origin());
}

TEST(StarTree, WalkAcrossRays) {
  StarTreeSpace T(3);
  const Point m = combine(T, TreePoint{1, 2.0}, TreePoint{2, 1.0}, 0.5);
  EXPECT_EQ(tp(m).ray, 1u);
  EXPECT_DOUBLE_EQ(tp(m).t, 0.5);
  const TreePoint o = oracle::tree_point_at({1, 2.0}, {2, 1.0}, 1.5);
  EXPECT_EQ(o.ray, 1u);
  EXPECT_DOUBLE_EQ(o.t, 0.5);
}

TEST(StarTree, Distances) {
  StarTreeSpace T(3);
  EXPECT_DOUBLE_EQ(dist(T, TreePoint{1, 2.0}, TreePoint{2, 1.0}), 3.0);
  EXPECT_DOUBLE_EQ(dist(T, TreePoint{1, 2.0}, TreePoint{1, 0.5}), 1.5);
  EXPECT_DOUBLE_EQ(dist(T, TreePoint{1, 2.0}, TreePoint::origin()), 2.0);
}

TEST(StarTree, OriginIsCanonical) {
  EXPECT_EQ(TreePoint::make(3, 0.0), TreePoint::origin());
  EXPECT_THROW(TreePoint::make(0, 1.0), GeometryError);
  EXPECT_THROW(TreePoint::make(1, -1.0), GeometryError);
  StarTreeSpace T(2);
  EXPECT_THROW(T.validate(TreePoint{2, 0.0}), GeometryError);
  EXPECT_THROW(T.validate(TreePoint{3, 1.0}), GeometryError);
  EXPECT_NO_THROW(T.validate(TreePoint{2, 1.0}));
  // Walking all the way to the origin lands on the canonical form.
  EXPECT_EQ(tp(combine(T, TreePoint{1, 1.0}, TreePoint{2, 1.0}, 0.5)).ray, 0u);
  EXPECT_EQ(tp(combine(T, TreePoint{1, 1.0}, TreePoint::origin(), 1.0)),
            TreePoint::origin());
}

TEST(StarTree, CombineMatchesMetricCharacterization) {
  StarTreeSpace T(4);
  oracle::Gen g(11);
  for (int i = 0; i < 5000; ++i) {
    const TreePoint x = g.tree(4, 5.0);
    const TreePoint y = g.tree(4, 5.0);
    const double l = g.unit();
    const TreePoint got = tp(combine(T, x, y, l));
    const TreePoint want = oracle::tree_point_at(x, y, l * oracle::tree_dist(x, y));
    ASSERT_LE(oracle::tree_dist(got, want), 1e-12)
        << "x=(" << x.ray << "," << x.t << ") y=(" << y.ray << "," << y.t
        << ") l=" << l;
  }
}

TEST(Axioms, EuclideanR3Passes) {
  const auto r = check_w_axioms(EuclideanSpace(3), 10'000, 1e-9, 5);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.samples, 10'000u);
}

TEST(Axioms, StarTreePasses) {
  const auto r = check_w_axioms(StarTreeSpace(5), 10'000, 1e-9, 6);
  for (std::size_t a = 0; a < kAxiomCount; ++a) {
    EXPECT_LE(r.max_violation[a], 1e-9) << axiom_name(static_cast<Axiom>(a));
  }
}

TEST(Axioms, BrokenLineViolationMatchesAnalyticValue) {
  BrokenLineSpace B;
  const double x = -1.0, y = 3.0, l = 0.3, t = 0.8;
  const auto v = axiom_violations(B, v1(x), v1(y), v1(0.0), v1(1.0), l, t);
  const double d = std::abs(y - x);
  EXPECT_NEAR(v[static_cast<std::size_t>(Axiom::EndpointLeft)],
              std::abs(l * l - l) * d, 1e-12);
  EXPECT_NEAR(v[static_cast<std::size_t>(Axiom::W2)],
              std::abs(std::abs(l * l - t * t) - std::abs(l - t)) * d, 1e-12);

  const auto r = check_w_axioms(B, 10'000, 1e-9, 7);
  EXPECT_FALSE(r.passed());
  EXPECT_FALSE(r.passed(Axiom::W2));
  // Worst |l^2 - l| * d over the box [-10, 10] is 1/4 * 20.
  EXPECT_LE(r.max_violation[static_cast<std::size_t>(Axiom::EndpointLeft)], 5.0 + 1e-9);
  EXPECT_GT(r.max_violation[static_cast<std::size_t>(Axiom::EndpointLeft)], 1.0);
}

TEST(Axioms, IdenticalSeedsGiveIdenticalReports) {
  const auto a = check_w_axioms(StarTreeSpace(3), 500, 1e-9, 42);
  const auto b = check_w_axioms(StarTreeSpace(3), 500, 1e-9, 42);
  EXPECT_EQ(a.max_violation, b.max_violation);
}

TEST(Properties, MetricAxiomsOnSamples) {
  oracle::Gen g(3);
  EuclideanSpace R(4);
  StarTreeSpace T(3);
  for (int i = 0; i < 3000; ++i) {
    const Point ex = g.vec(4, 5), ey = g.vec(4, 5), ez = g.vec(4, 5);
    const Point tx = g.tree(3, 5), ty = g.tree(3, 5), tz = g.tree(3, 5);
    for (auto [S, x, y, z] : {std::tuple<const Space*, Point, Point, Point>{&R, ex, ey, ez},
                              {&T, tx, ty, tz}}) {
      ASSERT_NEAR(S->dist(x, y), S->dist(y, x), 1e-15);
      ASSERT_EQ(S->dist(x, x), 0.0);
      ASSERT_LE(S->dist(x, z), S->dist(x, y) + S->dist(y, z) + 1e-12);
    }
  }
}

TEST(Properties, CombineIsExactAlongSegments) {
  oracle::Gen g(4);
  StarTreeSpace T(3);
  EuclideanSpace R(2);
  for (int i = 0; i < 3000; ++i) {
    const double l = g.unit(), t = g.unit();
    for (auto [S, x, y] : {std::tuple<const Space*, Point, Point>{&T, g.tree(3, 5), g.tree(3, 5)},
                           {&R, g.vec(2, 5), g.vec(2, 5)}}) {
      const double d = S->dist(x, y);
      const Point a = S->combine(x, y, l);
      const Point b = S->combine(x, y, t);
      ASSERT_NEAR(S->dist(x, a), l * d, 1e-9);
      ASSERT_NEAR(S->dist(y, a), (1 - l) * d, 1e-9);
      ASSERT_NEAR(S->dist(a, b), std::abs(l - t) * d, 1e-9);
      ASSERT_LE(S->dist(a, S->combine(y, x, 1 - l)), 1e-9);
    }
  }
}
