#pragma once

#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <vector>

#include "mdimlab/common.hpp"
#include "mdimlab/geometry.hpp"
#include "mdimlab/horseshoe.hpp"

namespace mdimlab {

// A Markovian intersection of phi(R1) with R2 demands a strict horizontal
// subrectangle S of R1 whose image crosses R2 vertically: the images of the
// two horizontal faces of S land strictly beyond the two horizontal faces
// of R2 (in one of the two orientations), and wherever the image height is
// within the vertical extent of R2, the remaining coordinates are strictly
// interior to R2.

enum class MarkovCase { S_plus_above, S_plus_below };

enum class VerifyMode { exact, sampled };

struct MarkovVerdict {
  bool passed = false;
  MarkovCase case_used = MarkovCase::S_plus_above;
  double margin = 0.0;  // min clearance over all checked conditions
  long samples_checked = 0;
  VerifyMode mode = VerifyMode::sampled;
  int resolution = 0;
};

using EvalMap = std::function<std::optional<Point>(const Point&)>;

namespace detail {

inline void check_markov_inputs(const Rectangle& r1, const Rectangle& r2, const Rectangle& s) {
  if (!r1.valid_rectangle() || !r2.valid_rectangle() || !s.valid_rectangle())
    throw InvalidParams("verify_markovian: degenerate rectangle");
  if (r1.dim() != r2.dim() || r1.dim() != s.dim())
    throw DimensionError("verify_markovian: dimension mismatch");
  if (!is_strict_horizontal_subrect(r1, s))
    throw InvalidParams("verify_markovian: S is not a strict horizontal subrectangle of R1");
}

// Lattice over a box with `res` samples per axis, endpoints included.
inline Point lattice_point(const Rectangle& box, int res, long flat, const std::vector<int>& axes) {
  Point p(box.lo.size());
  for (std::size_t i = 0; i < box.lo.size(); ++i) p[i] = box.lo[i];
  for (int a : axes) {
    const long t = flat % res;
    flat /= res;
    const double u = (res == 1) ? 0.5 : static_cast<double>(t) / (res - 1);
    p[a] = box.lo[a] + u * (box.hi[a] - box.lo[a]);
  }
  return p;
}

inline long ipow(long base, int exp) {
  long v = 1;
  for (int i = 0; i < exp; ++i) v *= base;
  return v;
}

}  // namespace detail

// Sampled verifier. A pass certifies the conditions only at the given grid
// resolution; use the exact overloads for affine pieces.
inline MarkovVerdict verify_markovian(const EvalMap& phi, const Rectangle& r1,
                                      const Rectangle& r2, const Rectangle& s, int grid_res,
                                      unsigned threads = 1) {
  detail::check_markov_inputs(r1, r2, s);
  if (grid_res < 2) throw InvalidParams("verify_markovian: grid_res must be at least 2");
  const int n = r1.dim();
  const double a_n = r2.lo[n - 1];
  const double b_n = r2.hi[n - 1];

  MarkovVerdict v;
  v.mode = VerifyMode::sampled;
  v.resolution = grid_res;

  const auto eval = [&](const Point& p) {
    auto img = phi(p);
    if (!img) throw EvaluationEscaped("verify_markovian: map undefined at a sample point");
    return *img;
  };

  // Orientation from the first sample of S+.
  std::vector<int> face_axes;
  for (int a = 0; a + 1 < n; ++a) face_axes.push_back(a);
  Rectangle s_plus = s, s_minus = s;
  s_plus.lo[n - 1] = s.hi[n - 1];
  s_minus.hi[n - 1] = s.lo[n - 1];
  {
    const Point probe = eval(detail::lattice_point(s_plus, grid_res, 0, face_axes));
    v.case_used = (probe[n - 1] >= 0.5 * (a_n + b_n)) ? MarkovCase::S_plus_above
                                                      : MarkovCase::S_plus_below;
  }
  const bool plus_above = v.case_used == MarkovCase::S_plus_above;

  const long face_total = detail::ipow(grid_res, n - 1);
  const long body_total = detail::ipow(grid_res, n);
  std::vector<int> body_axes(n);
  for (int a = 0; a < n; ++a) body_axes[a] = a;

  double margin = std::numeric_limits<double>::infinity();
  long checked = 0;
  std::mutex mu;
  std::exception_ptr error;

  const auto run = [&](const Rectangle& box, const std::vector<int>& axes, long total,
                       auto&& clearance) {
    parallel_chunks(static_cast<std::size_t>(total), threads, [&](std::size_t b, std::size_t e) {
      double local = std::numeric_limits<double>::infinity();
      long cnt = 0;
      try {
        for (std::size_t f = b; f < e; ++f) {
          const Point img = eval(detail::lattice_point(box, grid_res, static_cast<long>(f), axes));
          local = std::min(local, clearance(img));
          ++cnt;
        }
      } catch (...) {
        std::lock_guard<std::mutex> g(mu);
        if (!error) error = std::current_exception();
        return;
      }
      std::lock_guard<std::mutex> g(mu);
      margin = std::min(margin, local);
      checked += cnt;
    });
    if (error) std::rethrow_exception(error);
  };

  // Horizontal-face images must overshoot the target faces.
  run(s_plus, face_axes, face_total, [&](const Point& img) {
    return plus_above ? img[n - 1] - b_n : a_n - img[n - 1];
  });
  run(s_minus, face_axes, face_total, [&](const Point& img) {
    return plus_above ? a_n - img[n - 1] : img[n - 1] - b_n;
  });
  // Body samples whose image height falls inside the vertical extent of R2
  // must be strictly interior in the remaining coordinates.
  run(s, body_axes, body_total, [&](const Point& img) {
    if (img[n - 1] < a_n || img[n - 1] > b_n) return std::numeric_limits<double>::infinity();
    double c = std::numeric_limits<double>::infinity();
    for (int a = 0; a + 1 < n; ++a)
      c = std::min({c, img[a] - r2.lo[a], r2.hi[a] - img[a]});
    return c;
  });

  v.samples_checked = checked;
  v.margin = std::isfinite(margin) ? margin : 0.0;
  v.passed = margin > 0;
  return v;
}

// ---------------------------------------------------------------------------
// Exact mode for diagonal affine pieces. All comparisons happen in rational
// arithmetic; the verdict is unconditional.

struct AffinePieceData {
  RatBox r1;
  RatBox r2;
  RatBox slab;
  std::vector<Rational> scale;
  std::vector<Rational> offset;
};

inline AffinePieceData piece_data(const PseudoHorseshoe& h, long i, long j) {
  const MarkovPiece& p = h.piece(i, j);
  return AffinePieceData{h.grid.rects[i], h.grid.rects[j], p.slab, p.scale, p.offset};
}

inline MarkovVerdict verify_markovian_exact(const AffinePieceData& d) {
  const int n = static_cast<int>(d.r1.lo.size());
  if (!is_strict_horizontal_subrect(d.r1, d.slab))
    throw InvalidParams("verify_markovian_exact: slab is not a strict horizontal subrectangle");
  for (int a = 0; a < n; ++a)
    if (d.scale[a] == 0) throw InvalidParams("verify_markovian_exact: singular linear part");

  MarkovVerdict v;
  v.mode = VerifyMode::exact;

  // Image of the slab under the diagonal affine map, per axis.
  std::vector<Rational> img_lo(n), img_hi(n);
  for (int a = 0; a < n; ++a) {
    Rational lo = d.scale[a] * d.slab.lo[a] + d.offset[a];
    Rational hi = d.scale[a] * d.slab.hi[a] + d.offset[a];
    if (lo > hi) std::swap(lo, hi);
    img_lo[a] = lo;
    img_hi[a] = hi;
  }
  const Rational a_n = d.r2.lo[n - 1];
  const Rational b_n = d.r2.hi[n - 1];
  // Image heights of the two horizontal faces of the slab.
  const Rational plus_h = d.scale[n - 1] * d.slab.hi[n - 1] + d.offset[n - 1];
  const Rational minus_h = d.scale[n - 1] * d.slab.lo[n - 1] + d.offset[n - 1];

  const bool plus_above = plus_h >= (a_n + b_n) / 2;
  v.case_used = plus_above ? MarkovCase::S_plus_above : MarkovCase::S_plus_below;
  const Rational top = plus_above ? plus_h : minus_h;
  const Rational bot = plus_above ? minus_h : plus_h;

  Rational margin = top - b_n;  // overshoot above
  margin = rat_min(margin, Rational(a_n - bot));
  for (int a = 0; a + 1 < n; ++a) {
    margin = rat_min(margin, Rational(img_lo[a] - d.r2.lo[a]));
    margin = rat_min(margin, Rational(d.r2.hi[a] - img_hi[a]));
  }
  v.margin = to_double(margin);
  v.passed = margin > 0;
  return v;
}

inline MarkovVerdict verify_markovian_exact(const PseudoHorseshoe& h, long i, long j) {
  return verify_markovian_exact(piece_data(h, i, j));
}

// Composition of two affine pieces: verifies that the two-step image of the
// pulled-back slab S12 /\ phi1^{-1}(S23) crosses R3 Markovianly.
inline MarkovVerdict verify_chain_exact(const AffinePieceData& p1, const AffinePieceData& p2) {
  const int n = static_cast<int>(p1.r1.lo.size());
  // Pull S23 back through the first map and intersect with S12.
  RatBox pre;
  pre.lo.resize(n);
  pre.hi.resize(n);
  for (int a = 0; a < n; ++a) {
    Rational lo = (p2.slab.lo[a] - p1.offset[a]) / p1.scale[a];
    Rational hi = (p2.slab.hi[a] - p1.offset[a]) / p1.scale[a];
    if (lo > hi) std::swap(lo, hi);
    pre.lo[a] = lo;
    pre.hi[a] = hi;
  }
  RatBox pulled;
  if (!intersect_boxes(p1.slab, pre, pulled))
    throw InvalidParams("verify_chain_exact: empty pulled-back slab");

  AffinePieceData comp;
  comp.r1 = p1.r1;
  comp.r2 = p2.r2;
  comp.slab = pulled;
  comp.scale.resize(n);
  comp.offset.resize(n);
  for (int a = 0; a < n; ++a) {
    comp.scale[a] = p2.scale[a] * p1.scale[a];
    comp.offset[a] = p2.scale[a] * p1.offset[a] + p2.offset[a];
  }
  return verify_markovian_exact(comp);
}

// Sampled composite check. Both single-step verdicts must already pass; per
// column of S12, the heights the first map sends into S23 are bracketed by
// coarse samples and refined by bisection, and the composite faces are
// probed at the refined boundary (a stand-in for the pulled-back slab).
inline MarkovVerdict verify_chain(const EvalMap& phi1, const EvalMap& phi2, const Rectangle& r1,
                                  const Rectangle& r2, const Rectangle& r3, const Rectangle& s12,
                                  const Rectangle& s23, int grid_res) {
  const MarkovVerdict v1 = verify_markovian(phi1, r1, r2, s12, grid_res);
  const MarkovVerdict v2 = verify_markovian(phi2, r2, r3, s23, grid_res);
  MarkovVerdict v;
  v.mode = VerifyMode::sampled;
  v.resolution = grid_res;
  if (!v1.passed || !v2.passed) return v;

  const int n = r1.dim();
  const double a_n = r3.lo[n - 1];
  const double b_n = r3.hi[n - 1];
  const long cols = detail::ipow(grid_res, n - 1);
  std::vector<int> face_axes;
  for (int a = 0; a + 1 < n; ++a) face_axes.push_back(a);

  const auto eval = [&](const EvalMap& phi, const Point& p) {
    auto img = phi(p);
    if (!img) throw EvaluationEscaped("verify_chain: map undefined at a sample point");
    return *img;
  };

  double margin = std::numeric_limits<double>::infinity();
  long checked = 0;
  bool found_any = false;
  std::optional<bool> comp_plus_above;

  const double slab_lo = s12.lo[n - 1];
  const double slab_hi = s12.hi[n - 1];
  const auto height_in_s23 = [&](Point x, double height) {
    x[n - 1] = height;
    ++checked;
    return s23.contains(eval(phi1, x));
  };

  for (long col = 0; col < cols; ++col) {
    const Point base = detail::lattice_point(s12, grid_res, col, face_axes);
    long first_in = -1, last_in = -1;
    const auto height_at = [&](long t) {
      return slab_lo + (slab_hi - slab_lo) * static_cast<double>(t) / (grid_res - 1);
    };
    for (long t = 0; t < grid_res; ++t) {
      Point x = base;
      x[n - 1] = height_at(t);
      const Point mid = eval(phi1, x);
      ++checked;
      if (!s23.contains(mid)) continue;
      if (first_in < 0) first_in = t;
      last_in = t;
      // Interior condition inside the vertical band of R3.
      const Point img = eval(phi2, mid);
      if (img[n - 1] >= a_n && img[n - 1] <= b_n) {
        for (int a = 0; a + 1 < n; ++a)
          margin = std::min({margin, img[a] - r3.lo[a], r3.hi[a] - img[a]});
      }
    }
    if (first_in < 0) continue;
    found_any = true;
    // Refine the two boundary heights of the pulled-back slab by bisection.
    const auto refine = [&](double inside, double outside) {
      for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (inside + outside);
        if (height_in_s23(base, mid)) inside = mid;
        else outside = mid;
      }
      return inside;
    };
    const double bottom =
        first_in == 0 ? slab_lo : refine(height_at(first_in), height_at(first_in - 1));
    const double top =
        last_in == grid_res - 1 ? slab_hi : refine(height_at(last_in), height_at(last_in + 1));
    Point xb = base, xt = base;
    xb[n - 1] = bottom;
    xt[n - 1] = top;
    const Point lo_img = eval(phi2, eval(phi1, xb));
    const Point hi_img = eval(phi2, eval(phi1, xt));
    checked += 2;
    if (!comp_plus_above) comp_plus_above = hi_img[n - 1] >= 0.5 * (a_n + b_n);
    const double up = *comp_plus_above ? hi_img[n - 1] - b_n : a_n - hi_img[n - 1];
    const double dn = *comp_plus_above ? a_n - lo_img[n - 1] : lo_img[n - 1] - b_n;
    margin = std::min({margin, up, dn});
  }

  v.samples_checked = checked;
  if (!found_any || !comp_plus_above) return v;
  v.case_used = *comp_plus_above ? MarkovCase::S_plus_above : MarkovCase::S_plus_below;
  v.margin = std::isfinite(margin) ? margin : 0.0;
  v.passed = std::isfinite(margin) && margin > 0;
  return v;
}

// Exact verdict for a whole symbol path through a pseudo-horseshoe (or one
// stage sequence of a chained horseshoe): composes pieces step by step.
template <typename PieceAt>
MarkovVerdict verify_path_exact(const std::vector<RatBox>& rects, PieceAt&& piece_at,
                                const ItineraryWord& word) {
  if (word.size() < 2) throw InvalidParams("verify_path_exact: need at least two symbols");
  const int n = static_cast<int>(rects[0].lo.size());

  auto piece_as_data = [&](int step) {
    const MarkovPiece& p = piece_at(step, word[step], word[step + 1]);
    return AffinePieceData{rects[word[step]], rects[word[step + 1]], p.slab, p.scale, p.offset};
  };

  AffinePieceData acc = piece_as_data(0);
  for (std::size_t s = 1; s + 1 < word.size(); ++s) {
    const AffinePieceData nxt = piece_as_data(static_cast<int>(s));
    RatBox pre;
    pre.lo.resize(n);
    pre.hi.resize(n);
    for (int a = 0; a < n; ++a) {
      Rational lo = (nxt.slab.lo[a] - acc.offset[a]) / acc.scale[a];
      Rational hi = (nxt.slab.hi[a] - acc.offset[a]) / acc.scale[a];
      if (lo > hi) std::swap(lo, hi);
      pre.lo[a] = lo;
      pre.hi[a] = hi;
    }
    RatBox pulled;
    if (!intersect_boxes(acc.slab, pre, pulled))
      throw InvalidParams("verify_path_exact: empty pulled-back slab");
    acc.slab = pulled;
    acc.r2 = nxt.r2;
    for (int a = 0; a < n; ++a) {
      acc.offset[a] = nxt.scale[a] * acc.offset[a] + nxt.offset[a];
      acc.scale[a] = nxt.scale[a] * acc.scale[a];
    }
  }
  return verify_markovian_exact(acc);
}

inline MarkovVerdict verify_path_exact(const PseudoHorseshoe& h, const ItineraryWord& word) {
  return verify_path_exact(
      h.grid.rects, [&](int, int i, int j) -> const MarkovPiece& { return h.piece(i, j); }, word);
}

inline MarkovVerdict verify_path_exact(const ChainedHorseshoe& ch, const ItineraryWord& word) {
  return verify_path_exact(
      ch.stages[0].grid.rects,
      [&](int s, int i, int j) -> const MarkovPiece& { return ch.stages[s % ch.p].piece(i, j); },
      word);
}

// Largest tested uniform vertical-translation amplitude eta <= eta_max such
// that the verdict still passes for both phi + eta e_n and phi - eta e_n.
// Monotone bisection; a certified lower bound on the C0 robustness radius.
inline double robustness_radius(const EvalMap& phi, const Rectangle& r1, const Rectangle& r2,
                                const Rectangle& s, double eta_max, int steps, int grid_res = 8) {
  if (!(eta_max > 0) || steps < 1) throw InvalidParams("robustness_radius: bad parameters");
  const int n = r1.dim();
  const auto shifted = [&](double eta) {
    return EvalMap([phi, eta, n](const Point& x) -> std::optional<Point> {
      auto y = phi(x);
      if (!y) return std::nullopt;
      (*y)[n - 1] += eta;
      return y;
    });
  };
  const auto passes = [&](double eta) {
    return verify_markovian(shifted(eta), r1, r2, s, grid_res).passed &&
           verify_markovian(shifted(-eta), r1, r2, s, grid_res).passed;
  };
  if (!verify_markovian(phi, r1, r2, s, grid_res).passed)
    throw InvalidParams("robustness_radius: base verdict must pass");
  if (passes(eta_max)) return eta_max;
  double lo = 0.0, hi = eta_max;
  for (int i = 0; i < steps; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (passes(mid)) lo = mid;
    else hi = mid;
  }
  return lo;
}

// Exact counterpart for affine pieces: the radius under vertical shifts is
// the smaller of the two face overshoots.
inline double robustness_radius_exact(const AffinePieceData& d, double eta_max) {
  const MarkovVerdict base = verify_markovian_exact(d);
  if (!base.passed) throw InvalidParams("robustness_radius_exact: base verdict must pass");
  const int n = static_cast<int>(d.r1.lo.size());
  const Rational plus_h = d.scale[n - 1] * d.slab.hi[n - 1] + d.offset[n - 1];
  const Rational minus_h = d.scale[n - 1] * d.slab.lo[n - 1] + d.offset[n - 1];
  const Rational top = rat_max(plus_h, minus_h);
  const Rational bot = rat_min(plus_h, minus_h);
  const Rational up = top - d.r2.hi[n - 1];
  const Rational dn = d.r2.lo[n - 1] - bot;
  const double r = to_double(rat_min(up, dn));
  return std::min(r, eta_max);
}

}  // namespace mdimlab
