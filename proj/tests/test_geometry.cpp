#include "mdimlab/geometry.hpp"

#include <gtest/gtest.h>

#include "mdimlab/common.hpp"
#include "oracles.hpp"

using namespace mdimlab;

TEST(MaxNorm, Examples) {
  EXPECT_EQ(max_norm({0.0, 0.0}), 0.0);
  EXPECT_EQ(max_norm({0.3, -0.5}), 0.5);
  EXPECT_EQ(max_norm({0.25, 0.25, 0.25}), 0.25);
}

TEST(MaxNorm, NormAxiomsOnRandomVectors) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_below(4));
    Point u(n), v(n);
    for (int i = 0; i < n; ++i) {
      u[i] = 2.0 * rng.next_unit() - 1.0;
      v[i] = 2.0 * rng.next_unit() - 1.0;
    }
    EXPECT_GE(max_norm(u), 0.0);
    Point sum(n);
    for (int i = 0; i < n; ++i) sum[i] = u[i] + v[i];
    EXPECT_LE(max_norm(sum), max_norm(u) + max_norm(v) + 1e-15);
    EXPECT_EQ(max_norm_dist(u, v), max_norm_dist(v, u));
  }
}

TEST(MaxNorm, DimensionMismatchThrows) {
  EXPECT_THROW(max_norm_dist({0.0}, {0.0, 1.0}), DimensionError);
}

TEST(RectDistance, Examples) {
  const Rectangle a = make_box<double>({0, 0}, {1, 1});
  EXPECT_EQ(rect_distance(a, make_box<double>({0.5, 0}, {2, 1})), 0.0);
  EXPECT_EQ(rect_distance(a, make_box<double>({2, 0}, {3, 1})), 1.0);
  const Rectangle far = make_box<double>({2, 5}, {3, 6});
  EXPECT_EQ(rect_distance(a, far), 4.0);
  EXPECT_NEAR(oracles::brute_force_box_distance(a, far, 21), 4.0, 1e-12);
}

TEST(RectDistance, DimensionMismatchThrows) {
  EXPECT_THROW(rect_distance(make_box<double>({0}, {1}), make_box<double>({0, 0}, {1, 1})),
               DimensionError);
}

TEST(RectDistance, ZeroIffIntersect) {
  Rng rng(23);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_below(3));
    const auto random_box = [&] {
      Rectangle b;
      b.lo.resize(n);
      b.hi.resize(n);
      for (int i = 0; i < n; ++i) {
        const double c = 4.0 * rng.next_unit() - 2.0;
        const double w = 0.05 + rng.next_unit();
        b.lo[i] = c;
        b.hi[i] = c + w;
      }
      return b;
    };
    const Rectangle a = random_box();
    const Rectangle b = random_box();
    EXPECT_EQ(rect_distance(a, b) == 0.0, boxes_intersect(a, b));
  }
  // Touching boxes intersect as closed sets.
  const Rectangle a = make_box<double>({0, 0}, {1, 1});
  const Rectangle t = make_box<double>({1, 0}, {2, 1});
  EXPECT_EQ(rect_distance(a, t), 0.0);
  EXPECT_TRUE(boxes_intersect(a, t));
}

TEST(RectDistance, ExactInRationalArithmetic) {
  const RatBox a = make_box<Rational>({Rational(0), Rational(0)}, {Rational(1), Rational(1)});
  const RatBox b = make_box<Rational>({Rational(5, 2), Rational(0)}, {Rational(3), Rational(1)});
  EXPECT_EQ(rect_distance(a, b), Rational(3, 2));
}

TEST(Faces, SquareHasFourFaces) {
  const Rectangle r = make_box<double>({0, 0}, {1, 1});
  const auto faces = faces_of(r);
  ASSERT_EQ(faces.size(), 4u);
  int horizontal = 0;
  for (const auto& f : faces) horizontal += f.horizontal(r.dim()) ? 1 : 0;
  EXPECT_EQ(horizontal, 2);
  // Bottom/top slices are degenerate on the last axis.
  const auto bottom = face_box(r, Face{1, FaceSide::minus});
  EXPECT_EQ(bottom.lo[1], 0.0);
  EXPECT_EQ(bottom.hi[1], 0.0);
  const auto right = face_box(r, Face{0, FaceSide::plus});
  EXPECT_EQ(right.lo[0], 1.0);
  EXPECT_EQ(right.hi[0], 1.0);
}

TEST(Faces, CubeHasSixFacesTwoHorizontal) {
  const Rectangle r = make_box<double>({0, 0, 0}, {1, 1, 1});
  const auto faces = faces_of(r);
  ASSERT_EQ(faces.size(), 6u);
  int horizontal = 0;
  for (const auto& f : faces) horizontal += f.horizontal(3) ? 1 : 0;
  EXPECT_EQ(horizontal, 2);
}

TEST(Faces, IntervalHasTwoHorizontalFaces) {
  const Rectangle r = make_box<double>({0.0}, {1.0});
  const auto faces = faces_of(r);
  ASSERT_EQ(faces.size(), 2u);
  for (const auto& f : faces) EXPECT_TRUE(f.horizontal(1));
}

TEST(Faces, UnionCoversBoundary) {
  const Rectangle r = make_box<double>({0, 0}, {1, 2});
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    // A random boundary point: pin one axis to a face, vary the rest.
    Point p{rng.next_unit(), 2.0 * rng.next_unit()};
    const int axis = static_cast<int>(rng.next_below(2));
    p[axis] = rng.next_below(2) ? r.hi[axis] : r.lo[axis];
    bool on_some_face = false;
    for (const auto& f : faces_of(r)) {
      if (face_box(r, f).contains(p)) on_some_face = true;
    }
    EXPECT_TRUE(on_some_face);
  }
}

TEST(Faces, DegenerateRectangleThrows) {
  EXPECT_THROW(faces_of(make_box<double>({0, 1}, {1, 1})), InvalidParams);
}

TEST(Boxes, StrictHorizontalSubrect) {
  const Rectangle r = make_box<double>({0, 0}, {1, 1});
  EXPECT_TRUE(is_strict_horizontal_subrect(r, make_box<double>({0, 0.2}, {1, 0.4})));
  EXPECT_FALSE(is_strict_horizontal_subrect(r, make_box<double>({0, 0.0}, {1, 0.4})));
  EXPECT_FALSE(is_strict_horizontal_subrect(r, make_box<double>({0.1, 0.2}, {1, 0.4})));
}

TEST(Boxes, IntersectBoxes) {
  const Rectangle a = make_box<double>({0, 0}, {1, 1});
  Rectangle out;
  EXPECT_TRUE(intersect_boxes(a, make_box<double>({0.5, 0.5}, {2, 2}), out));
  EXPECT_EQ(out.lo[0], 0.5);
  EXPECT_EQ(out.hi[0], 1.0);
  EXPECT_FALSE(intersect_boxes(a, make_box<double>({2, 2}, {3, 3}), out));
}
