#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "mdimlab/common.hpp"
#include "mdimlab/rational.hpp"

namespace mdimlab {

// Ambient coordinates of a point in R^n.
using Point = std::vector<double>;

inline void check_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw DimensionError(std::string(what) + ": dimension mismatch");
}

// Maximum norm: ||u|| = max_i |u_i|.
inline double max_norm(const Point& u) {
  double m = 0.0;
  for (double v : u) m = std::max(m, std::fabs(v));
  return m;
}

inline double max_norm_dist(const Point& a, const Point& b) {
  check_same_dim(a.size(), b.size(), "max_norm_dist");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

// Axis-aligned box [lo_1, hi_1] x ... x [lo_n, hi_n]. Rectangles require
// lo_i < hi_i on every axis; degenerate boxes appear only as face slices.
template <typename T>
struct Box {
  std::vector<T> lo;
  std::vector<T> hi;

  int dim() const { return static_cast<int>(lo.size()); }

  bool valid_rectangle() const {
    if (lo.size() != hi.size() || lo.empty()) return false;
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (!(lo[i] < hi[i])) return false;
    return true;
  }

  T side(std::size_t axis) const { return hi[axis] - lo[axis]; }

  bool contains(const std::vector<T>& p) const {
    if (p.size() != lo.size()) return false;
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (p[i] < lo[i] || p[i] > hi[i]) return false;
    return true;
  }

  bool contains_box(const Box<T>& inner) const {
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (inner.lo[i] < lo[i] || inner.hi[i] > hi[i]) return false;
    return true;
  }

  friend bool operator==(const Box<T>& a, const Box<T>& b) = default;
};

using Rectangle = Box<double>;
using RatBox = Box<Rational>;

inline Rectangle to_double_box(const RatBox& b) {
  Rectangle out;
  out.lo.reserve(b.lo.size());
  out.hi.reserve(b.hi.size());
  for (const auto& v : b.lo) out.lo.push_back(to_double(v));
  for (const auto& v : b.hi) out.hi.push_back(to_double(v));
  return out;
}

template <typename T>
Box<T> make_box(std::vector<T> lo, std::vector<T> hi) {
  Box<T> b{std::move(lo), std::move(hi)};
  if (b.lo.size() != b.hi.size()) throw DimensionError("make_box: lo/hi dimension mismatch");
  return b;
}

// Set distance between closed boxes in the max norm:
// dist(A, B) = inf ||a - b|| = max over axes of the per-axis interval gap.
// Returns zero exactly when the boxes intersect.
template <typename T>
T rect_distance(const Box<T>& a, const Box<T>& b) {
  if (a.lo.size() != b.lo.size()) throw DimensionError("rect_distance: dimension mismatch");
  T best{0};
  for (std::size_t i = 0; i < a.lo.size(); ++i) {
    T gap{0};
    if (b.lo[i] > a.hi[i]) gap = b.lo[i] - a.hi[i];
    else if (a.lo[i] > b.hi[i]) gap = a.lo[i] - b.hi[i];
    if (gap > best) best = gap;
  }
  return best;
}

template <typename T>
bool boxes_intersect(const Box<T>& a, const Box<T>& b) {
  if (a.lo.size() != b.lo.size()) throw DimensionError("boxes_intersect: dimension mismatch");
  for (std::size_t i = 0; i < a.lo.size(); ++i)
    if (b.lo[i] > a.hi[i] || a.lo[i] > b.hi[i]) return false;
  return true;
}

// Intersection of two boxes; empty result reported through the bool.
template <typename T>
bool intersect_boxes(const Box<T>& a, const Box<T>& b, Box<T>& out) {
  if (a.lo.size() != b.lo.size()) throw DimensionError("intersect_boxes: dimension mismatch");
  out.lo.resize(a.lo.size());
  out.hi.resize(a.lo.size());
  for (std::size_t i = 0; i < a.lo.size(); ++i) {
    out.lo[i] = std::max(a.lo[i], b.lo[i]);
    out.hi[i] = std::min(a.hi[i], b.hi[i]);
    if (!(out.lo[i] < out.hi[i])) return false;
  }
  return true;
}

enum class FaceSide { minus, plus };

// One of the 2n boundary faces of a rectangle. The two faces on the last
// axis are the horizontal ones; all others are vertical.
struct Face {
  int axis = 0;  // 0-based
  FaceSide side = FaceSide::minus;

  bool horizontal(int dim) const { return axis == dim - 1; }
};

inline std::vector<Face> faces_of(const Rectangle& r) {
  if (!r.valid_rectangle()) throw InvalidParams("faces_of: degenerate rectangle");
  std::vector<Face> out;
  out.reserve(2 * r.lo.size());
  for (int a = 0; a < r.dim(); ++a) {
    out.push_back(Face{a, FaceSide::minus});
    out.push_back(Face{a, FaceSide::plus});
  }
  return out;
}

// The face as a (degenerate on `axis`) box slice of the rectangle.
template <typename T>
Box<T> face_box(const Box<T>& r, const Face& f) {
  Box<T> b = r;
  const T v = (f.side == FaceSide::minus) ? r.lo[f.axis] : r.hi[f.axis];
  b.lo[f.axis] = v;
  b.hi[f.axis] = v;
  return b;
}

// Strict horizontal subrectangle test: the horizontal faces of `s` are
// strictly between those of `r`, the vertical faces coincide.
template <typename T>
bool is_strict_horizontal_subrect(const Box<T>& r, const Box<T>& s) {
  if (r.lo.size() != s.lo.size()) throw DimensionError("is_strict_horizontal_subrect");
  const std::size_t n = r.lo.size();
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (s.lo[i] != r.lo[i] || s.hi[i] != r.hi[i]) return false;
  return s.lo[n - 1] > r.lo[n - 1] && s.hi[n - 1] < r.hi[n - 1] && s.lo[n - 1] < s.hi[n - 1];
}

inline Point box_center(const Rectangle& r) {
  Point c(r.lo.size());
  for (std::size_t i = 0; i < r.lo.size(); ++i) c[i] = 0.5 * (r.lo[i] + r.hi[i]);
  return c;
}

inline RatBox rat_box_of_ball(int n, const Rational& radius) {
  RatBox b;
  b.lo.assign(n, -radius);
  b.hi.assign(n, radius);
  return b;
}

}  // namespace mdimlab
