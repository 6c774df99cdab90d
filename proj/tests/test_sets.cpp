#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "almlab/sets.hpp"
#include "test_support.hpp"

using namespace almlab;
using almlab::testing::u01;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ConvexSet quarter_disk(double r) {
  // Example-style lens: ball((r,0), r) cut to the upper half plane.
  return ConvexSet::intersection(
      {ConvexSet::ball({r, 0.0}, r), ConvexSet::halfspace({0.0, -1.0}, 0.0)});
}

std::vector<ConvexSet> variant_zoo() {
  std::vector<ConvexSet> zoo;
  zoo.push_back(ConvexSet::box({-1.0, -1.0}, {1.0, 1.0}));
  zoo.push_back(ConvexSet::singleton({0.3, -0.7}));
  zoo.push_back(ConvexSet::halfspace({1.0, 2.0}, 1.0));
  zoo.push_back(ConvexSet::ball({0.5, 0.5}, 0.8));
  zoo.push_back(ConvexSet::shift(ConvexSet::ball({0.0, 0.0}, 1.0), {2.0, -1.0}));
  zoo.push_back(ConvexSet::product(
      {ConvexSet::box({0.0}, {1.0}), ConvexSet::ball({0.0}, 2.0)}));
  zoo.push_back(quarter_disk(0.25));
  return zoo;
}

}  // namespace

TEST_CASE("closed-form projections") {
  const ConvexSet k1 = ConvexSet::ball({0.0, 1.0}, 1.0);
  CHECK(norm(sub(k1.project({0.0, 0.0}), {0.0, 0.0})) <= 1e-15);

  const ConvexSet box = ConvexSet::box({-1.0, -1.0}, {1.0, 1.0});
  CHECK(box.project({2.0, 0.5}) == Vector{1.0, 0.5});
}

TEST_CASE("Dykstra projection onto an intersection matches brute force") {
  const double r = 0.25;
  const ConvexSet k4 = quarter_disk(r);
  const Vector x{0.5, -0.3};
  const Vector p = k4.project(x, 1e-12);
  CHECK(norm(sub(p, {0.5, 0.0})) <= 1e-6);

  // Grid-search oracle over the same region.
  const Vector brute = almlab::testing::grid_projection_2d(
      x, 0.0, 2.0 * r, 0.0, r, 2000, [&](double a, double b) {
        return (a - r) * (a - r) + b * b <= r * r + 1e-12 && b >= 0.0;
      });
  CHECK(norm(sub(p, brute)) <= 2e-3);
}

TEST_CASE("Dykstra reports likely-empty intersections") {
  const ConvexSet empty = ConvexSet::intersection(
      {ConvexSet::ball({0.0, 0.0}, 1.0), ConvexSet::ball({5.0, 0.0}, 1.0)});
  CHECK_THROWS_AS(empty.project({0.0, 0.0}, 1e-12), DykstraError);
}

TEST_CASE("contains") {
  CHECK(ConvexSet::singleton({1.0, 2.0}).contains({1.0, 2.0}, 1e-12));
  CHECK_FALSE(ConvexSet::ball({0.0, 1.0}, 1.0).contains({0.0, 2.5}, 1e-9));

  const ConvexSet k2 = ConvexSet::intersection(
      {ConvexSet::ball({0.0, 1.0}, 1.0), ConvexSet::halfspace({1.0, -1.0}, 0.0)});
  CHECK(k2.contains({0.0, 0.0}, 1e-9));
}

TEST_CASE("normal cone residual") {
  SamplePlan plan;
  plan.count = 64;
  plan.seed = 9;

  const double r = 0.25;
  const ConvexSet k3 = ConvexSet::ball({r, 0.0}, r);
  CHECK(normal_cone_residual(k3, {0.5, 0.0}, {0.5, 0.0}, plan) <= 1e-12);

  CHECK(normal_cone_residual(k3, {0.5, 0.0}, {0.0, 0.0}, plan) == 0.0);

  // On the tangent ball, (1, 0) pairs positively with boundary points
  // (sin t, 1 - cos t) near the origin.
  const ConvexSet k1 = ConvexSet::ball({0.0, 1.0}, 1.0);
  CHECK(normal_cone_residual(k1, {0.0, 0.0}, {1.0, 0.0}, plan) > 1e-3);
}

TEST_CASE("sample_points membership and determinism") {
  SamplePlan plan;
  plan.count = 100;
  plan.seed = 7;

  const ConvexSet point = ConvexSet::singleton({1.0, -1.0});
  for (const auto& p : sample_points(point, plan))
    CHECK(norm(sub(p, {1.0, -1.0})) == 0.0);

  plan.count = 3;
  const ConvexSet seg = ConvexSet::box({0.0}, {1.0});
  for (const auto& p : sample_points(seg, plan)) {
    CHECK(p[0] >= 0.0);
    CHECK(p[0] <= 1.0);
  }

  plan.count = 100;
  const ConvexSet ball = ConvexSet::ball({0.0, 1.0}, 1.0);
  const auto pts = sample_points(ball, plan);
  for (const auto& p : pts) CHECK(ball.contains(p, 1e-9));
  CHECK(sample_points(ball, plan) == pts);
}

TEST_CASE("projection is idempotent and nonexpansive") {
  std::mt19937_64 rng(41);
  for (const auto& set : variant_zoo()) {
    for (int trial = 0; trial < 25; ++trial) {
      Vector x(set.dim()), y(set.dim());
      for (auto& v : x) v = 6.0 * u01(rng) - 3.0;
      for (auto& v : y) v = 6.0 * u01(rng) - 3.0;
      const Vector px = set.project(x, 1e-12);
      CHECK(norm(sub(set.project(px, 1e-12), px)) <= 1e-10);
      const Vector py = set.project(y, 1e-12);
      CHECK(norm(sub(px, py)) <= norm(sub(x, y)) + 1e-10);
    }
  }
}

TEST_CASE("projection satisfies the variational inequality on samples") {
  std::mt19937_64 rng(43);
  SamplePlan plan;
  plan.count = 40;
  plan.seed = 11;
  for (const auto& set : variant_zoo()) {
    const auto zs = sample_points(set, plan);
    for (int trial = 0; trial < 10; ++trial) {
      Vector x(set.dim());
      for (auto& v : x) v = 6.0 * u01(rng) - 3.0;
      const Vector p = set.project(x, 1e-12);
      for (const auto& z : zs)
        CHECK(dot(sub(x, p), sub(z, p)) <= 1e-8 * (1.0 + norm(x)));
    }
  }
}

TEST_CASE("product projection concatenates factor projections") {
  const ConvexSet left = ConvexSet::box({-1.0}, {1.0});
  const ConvexSet right = ConvexSet::ball({0.0, 0.0}, 0.5);
  const ConvexSet prod = ConvexSet::product({left, right});
  const Vector x{3.0, 1.0, 1.0};
  const Vector p = prod.project(x, 1e-12);
  const Vector pl = left.project({3.0}, 1e-12);
  const Vector pr = right.project({1.0, 1.0}, 1e-12);
  CHECK(p[0] == pl[0]);
  CHECK(p[1] == pr[0]);
  CHECK(p[2] == pr[1]);
}

TEST_CASE("boxes accept infinite bounds") {
  const ConvexSet free = ConvexSet::box({-kInf, -kInf}, {kInf, kInf});
  const Vector x{4.0, -7.0};
  CHECK(free.project(x, 1e-12) == x);
  CHECK(free.contains(x, 1e-12));

  CHECK_THROWS_AS(ConvexSet::box({1.0}, {0.0}), InvalidInputError);
  CHECK_THROWS_AS(ConvexSet::ball({0.0}, -1.0), InvalidInputError);
  CHECK_THROWS_AS(ConvexSet::halfspace({0.0, 0.0}, 1.0), InvalidInputError);
}

TEST_CASE("shifted sampling tracks the inner set") {
  SamplePlan plan;
  plan.count = 30;
  plan.seed = 13;
  const ConvexSet inner = ConvexSet::ball({0.0, 0.0}, 1.0);
  const Vector offset{5.0, -2.0};
  const ConvexSet moved = ConvexSet::shift(inner, offset);
  const auto inner_pts = anchored_samples(inner, {0.5, 0.0}, plan);
  const auto moved_pts = anchored_samples(moved, add({0.5, 0.0}, offset), plan);
  REQUIRE(inner_pts.size() == moved_pts.size());
  for (std::size_t i = 0; i < inner_pts.size(); ++i)
    CHECK(norm(sub(moved_pts[i], add(inner_pts[i], offset))) <= 1e-12);
}

TEST_CASE("boundary-biased sampling also stays inside the set") {
  SamplePlan plan;
  plan.count = 40;
  plan.seed = 5;
  plan.strategy = SamplePlan::Strategy::BoundaryBiased;
  const ConvexSet k4 = quarter_disk(0.25);
  for (const auto& p : sample_points(k4, plan)) CHECK(k4.contains(p, 1e-9));
  CHECK_THROWS_AS(sample_points(k4, SamplePlan{0, 1}), InvalidInputError);
}
