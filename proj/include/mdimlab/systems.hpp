#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "mdimlab/common.hpp"
#include "mdimlab/geometry.hpp"
#include "mdimlab/horseshoe.hpp"

namespace mdimlab {

// Ambient spaces: boxes with the max norm, or tori with the coordinatewise
// circle distance maximized over axes.
struct CubeDomain {
  Rectangle box;
};

struct TorusDomain {
  int dim = 1;  // [0, 1)^dim
};

using Domain = std::variant<CubeDomain, TorusDomain>;

inline int domain_dim(const Domain& d) {
  if (const auto* c = std::get_if<CubeDomain>(&d)) return c->box.dim();
  return std::get<TorusDomain>(d).dim;
}

inline double circle_dist(double a, double b) {
  double t = std::fabs(a - b);
  t -= std::floor(t);
  return std::min(t, 1.0 - t);
}

inline double ambient_dist(const Domain& d, const Point& a, const Point& b) {
  check_same_dim(a.size(), b.size(), "ambient_dist");
  if (std::holds_alternative<CubeDomain>(d)) return max_norm_dist(a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, circle_dist(a[i], b[i]));
  return m;
}

inline double domain_diameter(const Domain& d) {
  if (const auto* c = std::get_if<CubeDomain>(&d)) {
    double m = 0.0;
    for (int a = 0; a < c->box.dim(); ++a) m = std::max(m, c->box.side(a));
    return m;
  }
  return 0.5;
}

inline bool in_domain(const Domain& d, const Point& x) {
  if (const auto* c = std::get_if<CubeDomain>(&d)) return c->box.contains(x);
  const auto& t = std::get<TorusDomain>(d);
  if (static_cast<int>(x.size()) != t.dim) return false;
  for (double v : x)
    if (v < 0.0 || v >= 1.0) return false;
  return true;
}

inline double wrap_unit(double v) {
  v -= std::floor(v);
  if (v >= 1.0) v = 0.0;  // guards against -1e-18 folding to 1.0
  return v;
}

// ---------------------------------------------------------------------------
// System kinds

struct System;

struct IdentityMap {};

struct RotationMap {
  std::vector<double> angles;
};

struct DoublingMap {};  // t -> 2t mod 1 on the circle

struct CatMap {};  // (x, y) -> (2x + y, x + y) mod 1 on the 2-torus

struct HorseshoeMap {
  std::shared_ptr<const PseudoHorseshoe> h;
};

struct ChainedMap {
  std::shared_ptr<const ChainedHorseshoe> c;
};

struct ComposedMap {
  std::vector<std::shared_ptr<const System>> parts;  // applied right to left
};

using SystemKind =
    std::variant<IdentityMap, RotationMap, DoublingMap, CatMap, HorseshoeMap, ChainedMap, ComposedMap>;

// An evaluatable self-map of a compact domain. Immutable after construction;
// evaluation is pure, so handles can be shared across threads freely.
struct System {
  Domain domain;
  SystemKind kind;
};

inline System make_identity(Domain d) { return System{std::move(d), IdentityMap{}}; }

inline System make_identity_cube(int n) {
  Rectangle box;
  box.lo.assign(n, 0.0);
  box.hi.assign(n, 1.0);
  return System{CubeDomain{std::move(box)}, IdentityMap{}};
}

inline System make_rotation(std::vector<double> angles) {
  const int n = static_cast<int>(angles.size());
  if (n < 1) throw InvalidParams("rotation needs at least one angle");
  return System{TorusDomain{n}, RotationMap{std::move(angles)}};
}

inline System make_doubling() { return System{TorusDomain{1}, DoublingMap{}}; }

inline System make_cat_map() { return System{TorusDomain{2}, CatMap{}}; }

inline System make_horseshoe_system(std::shared_ptr<const PseudoHorseshoe> h) {
  Rectangle box;
  box.lo.assign(h->params.n, -0.5);
  box.hi.assign(h->params.n, 0.5);
  return System{CubeDomain{std::move(box)}, HorseshoeMap{std::move(h)}};
}

inline System make_chained_system(std::shared_ptr<const ChainedHorseshoe> c) {
  Rectangle box = c->ambient_box();
  return System{CubeDomain{std::move(box)}, ChainedMap{std::move(c)}};
}

inline System make_composed(std::vector<std::shared_ptr<const System>> parts) {
  if (parts.empty()) throw InvalidParams("composition needs at least one system");
  const int n = domain_dim(parts.front()->domain);
  for (const auto& p : parts)
    if (domain_dim(p->domain) != n) throw DimensionError("composition dimension mismatch");
  Domain d = parts.front()->domain;
  return System{std::move(d), ComposedMap{std::move(parts)}};
}

// Single application of the map. Returns nullopt when the point escapes
// (horseshoe points outside every Markov slab). Throws DomainError when x
// is not in the domain at all.
inline std::optional<Point> evaluate(const System& sys, const Point& x) {
  if (static_cast<int>(x.size()) != domain_dim(sys.domain))
    throw DimensionError("evaluate: point dimension mismatch");
  if (!in_domain(sys.domain, x)) throw DomainError("evaluate: point outside the domain");

  struct Visitor {
    const System& sys;
    const Point& x;

    std::optional<Point> operator()(const IdentityMap&) const { return x; }
    std::optional<Point> operator()(const RotationMap& r) const {
      Point y(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) y[i] = wrap_unit(x[i] + r.angles[i]);
      return y;
    }
    std::optional<Point> operator()(const DoublingMap&) const {
      return Point{wrap_unit(2.0 * x[0])};
    }
    std::optional<Point> operator()(const CatMap&) const {
      return Point{wrap_unit(2.0 * x[0] + x[1]), wrap_unit(x[0] + x[1])};
    }
    std::optional<Point> operator()(const HorseshoeMap& h) const {
      return apply_horseshoe(*h.h, x);
    }
    std::optional<Point> operator()(const ChainedMap& c) const { return apply_chained(*c.c, x); }
    std::optional<Point> operator()(const ComposedMap& comp) const {
      // Right-to-left composition; escape short-circuits.
      Point cur = x;
      for (auto it = comp.parts.rbegin(); it != comp.parts.rend(); ++it) {
        auto next = evaluate(**it, cur);
        if (!next) return std::nullopt;
        cur = std::move(*next);
      }
      return cur;
    }
  };
  return std::visit(Visitor{sys, x}, sys.kind);
}

// T^0(x), ..., T^(m-1)(x); an escape is recorded, not fatal.
struct OrbitSegment {
  Point start;
  std::vector<Point> points;
  std::optional<int> escaped_at;

  int length() const { return static_cast<int>(points.size()); }
};

inline OrbitSegment orbit(const System& sys, const Point& x, int m) {
  if (m < 1) throw InvalidParams("orbit length must be at least 1");
  OrbitSegment seg;
  seg.start = x;
  seg.points.reserve(m);
  seg.points.push_back(x);
  for (int i = 1; i < m; ++i) {
    auto next = evaluate(sys, seg.points.back());
    if (!next) {
      seg.escaped_at = i;
      break;
    }
    seg.points.push_back(std::move(*next));
  }
  return seg;
}

// Dynamical metric d_k(x, y) = max of ambient distances along the first k
// iterates. Both orbits are computed once; an escape before step k-1 is an
// error for this query.
inline double dyn_distance(const System& sys, int k, const Point& x, const Point& y) {
  if (k < 1) throw InvalidParams("dyn_distance: k must be at least 1");
  const OrbitSegment ox = orbit(sys, x, k);
  if (ox.escaped_at) throw OrbitEscaped(*ox.escaped_at);
  const OrbitSegment oy = orbit(sys, y, k);
  if (oy.escaped_at) throw OrbitEscaped(*oy.escaped_at);
  double m = 0.0;
  for (int i = 0; i < k; ++i)
    m = std::max(m, ambient_dist(sys.domain, ox.points[i], oy.points[i]));
  return m;
}

// Parameters of a dynamical-ball query B_(k,eps)(x) = {y : d_k(x,y) < eps}.
struct DynMetricQuery {
  const System* system = nullptr;
  int steps = 1;
  double radius = 0.0;

  void validate() const {
    if (!system) throw InvalidParams("DynMetricQuery: missing system");
    if (steps < 1) throw InvalidParams("DynMetricQuery: steps must be at least 1");
    if (!(radius > 0)) throw InvalidParams("DynMetricQuery: radius must be positive");
  }
};

inline bool in_dynamical_ball(const DynMetricQuery& q, const Point& center, const Point& y) {
  q.validate();
  return dyn_distance(*q.system, q.steps, center, y) < q.radius;
}

// Chart-side dynamical distance for chained systems: at each step the two
// iterates lie in the same slot and are compared through that slot's chart.
// For every other system this is the ordinary d_k.
inline double chart_side_dyn_distance(const System& sys, int k, const Point& x, const Point& y) {
  const auto* chained = std::get_if<ChainedMap>(&sys.kind);
  if (!chained) return dyn_distance(sys, k, x, y);
  const OrbitSegment ox = orbit(sys, x, k);
  if (ox.escaped_at) throw OrbitEscaped(*ox.escaped_at);
  const OrbitSegment oy = orbit(sys, y, k);
  if (oy.escaped_at) throw OrbitEscaped(*oy.escaped_at);
  double m = 0.0;
  for (int i = 0; i < k; ++i)
    m = std::max(m, chart_distance(*chained->c, ox.points[i], oy.points[i]));
  return m;
}

}  // namespace mdimlab
