#include <gtest/gtest.h>

#include <cmath>

#include "simtrack/geometry.hpp"
#include "support.hpp"

using namespace simtrack;
using simtrack::testing::oracle_iou;
using simtrack::testing::random_box;

TEST(BoundingBox, RejectsNonPositiveExtent) {
  EXPECT_THROW(BoundingBox(0, 0, 0, 10), ValidationError);
  EXPECT_THROW(BoundingBox(0, 0, 10, -1), ValidationError);
  EXPECT_THROW(BoundingBox(0, 0, NAN, 1), ValidationError);
  EXPECT_THROW(BoundingBox(INFINITY, 0, 1, 1), ValidationError);
  EXPECT_FALSE(BoundingBox::make(0, 0, 0, 1).has_value());
  EXPECT_TRUE(BoundingBox::make(-5, -5, 0.1, 0.1).has_value());
}

TEST(BoundingBox, CornerForm) {
  const auto b = BoundingBox::from_corners(100, 50, 150, 120);
  EXPECT_EQ(b, BoundingBox(100, 50, 50, 70));
  EXPECT_DOUBLE_EQ(b.right(), 150);
  EXPECT_DOUBLE_EQ(b.bottom(), 120);
}

TEST(Iou, Examples) {
  EXPECT_DOUBLE_EQ(iou({0, 0, 10, 10}, {0, 0, 10, 10}), 1.0);
  EXPECT_DOUBLE_EQ(iou({0, 0, 10, 10}, {20, 20, 5, 5}), 0.0);
  EXPECT_NEAR(iou({0, 0, 10, 10}, {5, 0, 10, 10}), 50.0 / 150.0, 1e-12);
}

TEST(Iou, TouchingEdgesGiveZero) {
  EXPECT_EQ(iou({0, 0, 10, 10}, {10, 0, 10, 10}), 0.0);
  EXPECT_EQ(iou({0, 0, 10, 10}, {0, 10, 10, 10}), 0.0);
  EXPECT_EQ(iou({0, 0, 10, 10}, {10, 10, 3, 3}), 0.0);
}

TEST(AreaRatio, Examples) {
  EXPECT_DOUBLE_EQ(area_ratio({0, 0, 10, 10}, {3, 7, 10, 10}), 1.0);
  EXPECT_DOUBLE_EQ(area_ratio({0, 0, 10, 10}, {0, 0, 5, 10}), 0.5);
  EXPECT_NEAR(area_ratio({0, 0, 1, 1}, {0, 0, 100, 100}), 1e-4, 1e-15);
}

TEST(GeometryProperty, SymmetryBoundsAndSelf) {
  Rng rng = make_rng(1, "geometry-props");
  for (int i = 0; i < 5000; ++i) {
    const auto a = random_box(rng);
    const auto b = random_box(rng);
    const double ab = iou(a, b);
    EXPECT_EQ(ab, iou(b, a));
    EXPECT_EQ(area_ratio(a, b), area_ratio(b, a));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
    EXPECT_GT(area_ratio(a, b), 0.0);
    EXPECT_LE(area_ratio(a, b), 1.0);
    EXPECT_NEAR(ab, oracle_iou(a, b), 1e-12);
    EXPECT_DOUBLE_EQ(iou(a, a), 1.0);
    EXPECT_DOUBLE_EQ(area_ratio(a, a), 1.0);
  }
}

TEST(GeometryProperty, AreaRatioTranslationInvariant) {
  Rng rng = make_rng(2, "geometry-props");
  for (int i = 0; i < 2000; ++i) {
    const auto a = random_box(rng);
    const auto b = random_box(rng);
    const double dx = uniform(rng, -500, 500);
    const double dy = uniform(rng, -500, 500);
    EXPECT_DOUBLE_EQ(area_ratio(a, b), area_ratio(a.translated(dx, dy), b));
    EXPECT_DOUBLE_EQ(area_ratio(a, b), area_ratio(a, b.translated(dy, dx)));
  }
}

TEST(GeometryProperty, Containment) {
  Rng rng = make_rng(3, "geometry-props");
  for (int i = 0; i < 2000; ++i) {
    const auto outer = random_box(rng);
    const auto inner = simtrack::testing::random_inner_box(rng, outer);
    const double expected = inner.area() / outer.area();
    EXPECT_NEAR(iou(inner, outer), expected, 1e-9);
    EXPECT_NEAR(area_ratio(inner, outer), expected, 1e-9);
  }
}

TEST(GeometryFeatures, PacksIouAndAreaRatio) {
  const auto g = geometry_features({0, 0, 10, 10}, {5, 0, 10, 10});
  EXPECT_NEAR(g.iou, 1.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(g.area_ratio, 1.0);
}
