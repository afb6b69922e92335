#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mdimlab/common.hpp"
#include "mdimlab/geometry.hpp"
#include "mdimlab/rational.hpp"

namespace mdimlab {

// Parameters of an eps_k-separated N_k-pseudo-horseshoe inside the ball
// B_delta of the unit chart cube. Derived quantities: eps = delta / k and
// rect_count = (2k)^n.
//
// rho and eta split the per-axis slack budget: rectangles take a rho
// fraction of it as side length, gaps take an eta fraction on top of the
// required eps, and the remainder keeps everything strictly inside
// B_delta. Feasibility requires rho + eta < 1.
struct HorseshoeParams {
  int n = 2;
  int k = 1;
  Rational delta = Rational(1, 4);
  Rational rho = Rational(1, 2);
  Rational eta = Rational(1, 20);
  std::size_t max_rects = 1u << 20;
  std::size_t max_pieces = 300000;

  Rational eps() const { return delta / k; }
  long per_axis() const { return 2L * k; }

  BigInt rect_count_big() const { return bigint_pow(BigInt(per_axis()), static_cast<unsigned>(n)); }

  long rect_count() const {
    const BigInt big = rect_count_big();
    if (big > BigInt(max_rects))
      throw InfeasibleGrid("rectangle count (2k)^n exceeds the configured budget");
    return static_cast<long>(big);
  }

  void validate() const {
    if (n < 2) throw InvalidParams("horseshoe dimension n must be at least 2");
    if (k < 1) throw InvalidParams("separation index k must be at least 1");
    if (!(delta > 0) || !(delta < Rational(1, 2)))
      throw InvalidParams("delta must lie strictly between 0 and 1/2");
    if (!(rho > 0) || !(eta > 0) || !(rho + eta < 1))
      throw InvalidParams("need rho > 0, eta > 0 and rho + eta < 1");
    (void)rect_count();
  }
};

// The (2k)^n rectangles: a regular lattice of cubes of side `w` inside
// B_delta with adjacent gap strictly greater than eps. Per axis, the 2k
// sides plus the extra gap surplus consume (rho + eta) * eps of the eps
// of slack left by the 2k-1 mandatory gaps, so the layout fits with a
// positive outer margin.
struct RectGrid {
  HorseshoeParams params;
  Rational w;       // rectangle side
  Rational gap;     // adjacent gap = eps * (1 + eta / (2k - 1)) > eps
  Rational pitch;   // w + gap
  Rational margin;  // distance from -delta to the first rectangle
  std::vector<RatBox> rects;
};

inline RectGrid build_rect_grid(const HorseshoeParams& params) {
  params.validate();
  RectGrid g;
  g.params = params;
  const long q = params.per_axis();
  const long count = params.rect_count();
  const Rational eps = params.eps();
  g.w = params.rho * eps / q;
  g.gap = eps + params.eta * eps / (q - 1);  // q = 2k >= 2
  g.pitch = g.w + g.gap;
  const Rational span = q * g.w + (q - 1) * g.gap;
  g.margin = (2 * params.delta - span) / 2;
  if (!(g.margin > 0)) throw InfeasiblePacking("rectangle lattice does not fit inside B_delta");

  const int n = params.n;
  g.rects.reserve(static_cast<std::size_t>(count));
  std::vector<long> idx(n, 0);
  for (long flat = 0; flat < count; ++flat) {
    RatBox r;
    r.lo.resize(n);
    r.hi.resize(n);
    for (int a = 0; a < n; ++a) {
      const Rational start = -params.delta + g.margin + idx[a] * g.pitch;
      r.lo[a] = start;
      r.hi[a] = start + g.w;
    }
    g.rects.push_back(std::move(r));
    for (int a = n - 1; a >= 0; --a) {
      if (++idx[a] < q) break;
      idx[a] = 0;
    }
  }
  return g;
}

// One Markov piece: the affine map A_{i,j} defined on the horizontal slab
// S_{i,j} of rectangle i, sending it onto a vertical strip through
// rectangle j that overshoots both horizontal faces. The linear part is
// diagonal with positive entries and unit determinant.
struct MarkovPiece {
  int source = 0;
  int target = 0;
  RatBox slab;
  std::vector<Rational> scale;
  std::vector<Rational> offset;

  Rational det() const {
    Rational d = 1;
    for (const auto& s : scale) d *= s;
    return d;
  }

  RatBox image_of(const RatBox& box) const {
    RatBox out;
    out.lo.resize(box.lo.size());
    out.hi.resize(box.hi.size());
    for (std::size_t a = 0; a < box.lo.size(); ++a) {
      out.lo[a] = scale[a] * box.lo[a] + offset[a];
      out.hi[a] = scale[a] * box.hi[a] + offset[a];
    }
    return out;
  }

  RatBox preimage_of(const RatBox& box) const {
    RatBox out;
    out.lo.resize(box.lo.size());
    out.hi.resize(box.hi.size());
    for (std::size_t a = 0; a < box.lo.size(); ++a) {
      out.lo[a] = (box.lo[a] - offset[a]) / scale[a];
      out.hi[a] = (box.hi[a] - offset[a]) / scale[a];
    }
    return out;
  }
};

// Full pseudo-horseshoe: every ordered pair (i, j) carries a Markov piece,
// which is what the (N_k)^m itinerary count needs. Construction is exact;
// `cache` holds double mirrors for evaluation.
struct PseudoHorseshoe {
  HorseshoeParams params;
  RectGrid grid;

  // Shared piece layout. Strips are stacked along axis 0 inside the target
  // rectangle, slabs along the last axis inside the source rectangle.
  Rational strip_width;     // u     = w / (2 N)
  Rational strip_gap;       // g_s   = w / (2 (N + 1))
  Rational overshoot;       // o     = g_s (beyond each horizontal face)
  Rational lateral_shrink;  // beta, contraction on axes 1..n-2 (n >= 3)
  Rational slab_height;     // h, fixed by the unit-determinant condition
  Rational slab_gap;        // (w - N h) / (N + 1)

  std::vector<MarkovPiece> pieces;  // N * N entries, index = source * N + target
  bool canonical = true;            // false when loaded pieces deviate from the layout

  struct Cache {
    int n = 0;
    long q = 0;
    long count = 0;
    double delta = 0, margin = 0, pitch = 0, w = 0;
    double slab_gap = 0, slab_height = 0;
    std::vector<double> scale;   // count*count*n
    std::vector<double> offset;  // count*count*n
    std::vector<double> slab_lo, slab_hi;
  };
  Cache cache;

  long count() const { return static_cast<long>(grid.rects.size()); }

  const MarkovPiece& piece(long i, long j) const {
    return pieces[static_cast<std::size_t>(i) * count() + j];
  }

  void rebuild_cache() {
    const long N = count();
    cache.n = params.n;
    cache.q = params.per_axis();
    cache.count = N;
    cache.delta = to_double(params.delta);
    cache.margin = to_double(grid.margin);
    cache.pitch = to_double(grid.pitch);
    cache.w = to_double(grid.w);
    cache.slab_gap = to_double(slab_gap);
    cache.slab_height = to_double(slab_height);
    const std::size_t total = static_cast<std::size_t>(N) * N * params.n;
    cache.scale.resize(total);
    cache.offset.resize(total);
    cache.slab_lo.resize(static_cast<std::size_t>(N) * N * params.n);
    cache.slab_hi.resize(static_cast<std::size_t>(N) * N * params.n);
    for (std::size_t p = 0; p < pieces.size(); ++p) {
      for (int a = 0; a < params.n; ++a) {
        cache.scale[p * params.n + a] = to_double(pieces[p].scale[a]);
        cache.offset[p * params.n + a] = to_double(pieces[p].offset[a]);
        cache.slab_lo[p * params.n + a] = to_double(pieces[p].slab.lo[a]);
        cache.slab_hi[p * params.n + a] = to_double(pieces[p].slab.hi[a]);
      }
    }
  }
};

inline PseudoHorseshoe build_pseudo_horseshoe(const HorseshoeParams& params) {
  PseudoHorseshoe h;
  h.params = params;
  h.grid = build_rect_grid(params);
  const long N = h.count();
  const BigInt piece_budget = BigInt(N) * N;
  if (piece_budget > BigInt(params.max_pieces))
    throw InfeasibleGrid("piece count N^2 exceeds the configured budget");

  const int n = params.n;
  const Rational W = h.grid.w;
  h.strip_width = W / (2 * N);
  h.strip_gap = W / (2 * (N + 1));
  h.overshoot = h.strip_gap;
  h.lateral_shrink = Rational(9, 10);
  const Rational img_height = W + 2 * h.overshoot;

  // Unit determinant: (u/W) * beta^(n-2) * (img_height/h) = 1.
  Rational lateral = 1;
  for (int a = 1; a + 1 < n; ++a) lateral *= h.lateral_shrink;
  h.slab_height = img_height * lateral * h.strip_width / W;
  h.slab_gap = (W - N * h.slab_height) / (N + 1);
  if (!(h.slab_gap > 0)) throw InfeasiblePacking("slabs do not fit inside the rectangle");

  h.pieces.reserve(static_cast<std::size_t>(N) * N);
  for (long i = 0; i < N; ++i) {
    const RatBox& ri = h.grid.rects[i];
    for (long j = 0; j < N; ++j) {
      const RatBox& rj = h.grid.rects[j];
      MarkovPiece p;
      p.source = static_cast<int>(i);
      p.target = static_cast<int>(j);
      p.slab = ri;
      const Rational slab_lo = ri.lo[n - 1] + h.slab_gap * (j + 1) + h.slab_height * j;
      p.slab.lo[n - 1] = slab_lo;
      p.slab.hi[n - 1] = slab_lo + h.slab_height;

      p.scale.resize(n);
      p.offset.resize(n);
      // Axis 0: contract onto the strip slot reserved for source i.
      p.scale[0] = h.strip_width / W;
      const Rational strip_lo = rj.lo[0] + h.strip_gap * (i + 1) + h.strip_width * i;
      p.offset[0] = strip_lo - p.scale[0] * ri.lo[0];
      // Axes 1..n-2: contract by beta, centered in the target range.
      for (int a = 1; a + 1 < n; ++a) {
        p.scale[a] = h.lateral_shrink;
        const Rational lo = rj.lo[a] + W * (1 - h.lateral_shrink) / 2;
        p.offset[a] = lo - p.scale[a] * ri.lo[a];
      }
      // Last axis: expand the slab across the target, overshooting both
      // horizontal faces by `overshoot`.
      p.scale[n - 1] = img_height / h.slab_height;
      p.offset[n - 1] = (rj.lo[n - 1] - h.overshoot) - p.scale[n - 1] * p.slab.lo[n - 1];

      if (p.det() != 1) throw InfeasiblePacking("piece determinant is not exactly one");
      h.pieces.push_back(std::move(p));
    }
  }
  h.canonical = true;
  h.rebuild_cache();
  return h;
}

namespace detail {

// Locates the lattice slot of value v along one axis; returns -1 when v is
// not inside any rectangle side interval.
inline long locate_interval(double v, double start, double pitch, double width, long q) {
  const double rel = v - start;
  if (rel < 0) return -1;
  long t = static_cast<long>(rel / pitch);
  if (t >= q) t = q - 1;
  // Guard against floating rounding at slot boundaries.
  for (long c = t; c >= t - 1 && c >= 0; --c) {
    const double lo = start + static_cast<double>(c) * pitch;
    if (v >= lo && v <= lo + width) return c;
  }
  return -1;
}

}  // namespace detail

// Locates the rectangle containing x, or -1. Double precision; boundary
// points count as inside.
inline long locate_rect(const PseudoHorseshoe& h, const Point& x) {
  const auto& c = h.cache;
  if (static_cast<int>(x.size()) != c.n) throw DimensionError("locate_rect");
  const double start = -c.delta + c.margin;
  long flat = 0;
  for (int a = 0; a < c.n; ++a) {
    const long t = detail::locate_interval(x[a], start, c.pitch, c.w, c.q);
    if (t < 0) return -1;
    flat = flat * c.q + t;
  }
  return flat;
}

// Locates the slab (target index) of x inside rectangle i, or -1.
inline long locate_slab(const PseudoHorseshoe& h, long i, const Point& x) {
  const auto& c = h.cache;
  const double rect_lo = -c.delta + c.margin +
                         static_cast<double>(i % c.q) * c.pitch;  // last-axis start
  const double off = x[static_cast<std::size_t>(c.n) - 1] - rect_lo;
  const double step = c.slab_gap + c.slab_height;
  if (off < c.slab_gap) return -1;
  long j = static_cast<long>((off - c.slab_gap) / step);
  if (j >= c.count) j = c.count - 1;
  for (long cand = j; cand >= j - 1 && cand >= 0; --cand) {
    const double lo = c.slab_gap + static_cast<double>(cand) * step;
    if (off >= lo && off <= lo + c.slab_height) return cand;
  }
  return -1;
}

// One application of the horseshoe map. Points outside every slab escape
// (reported as nullopt, not an error).
inline std::optional<Point> apply_horseshoe(const PseudoHorseshoe& h, const Point& x) {
  const auto& c = h.cache;
  if (static_cast<int>(x.size()) != c.n) throw DimensionError("apply_horseshoe");
  if (h.canonical) {
    const long i = locate_rect(h, x);
    if (i < 0) return std::nullopt;
    const long j = locate_slab(h, i, x);
    if (j < 0) return std::nullopt;
    const std::size_t p = (static_cast<std::size_t>(i) * c.count + j) * c.n;
    Point y(c.n);
    for (int a = 0; a < c.n; ++a) y[a] = c.scale[p + a] * x[a] + c.offset[p + a];
    return y;
  }
  // Non-canonical (edited) pieces: scan the slabs.
  for (std::size_t p = 0; p < h.pieces.size(); ++p) {
    bool inside = true;
    for (int a = 0; a < c.n && inside; ++a) {
      const std::size_t q = p * c.n + a;
      inside = x[a] >= c.slab_lo[q] && x[a] <= c.slab_hi[q];
    }
    if (inside) {
      Point y(c.n);
      for (int a = 0; a < c.n; ++a) y[a] = c.scale[p * c.n + a] * x[a] + c.offset[p * c.n + a];
      return y;
    }
  }
  return std::nullopt;
}

// -------------------------------------------------------------------------
// Chained horseshoe: p stages linked through diagonal bi-Lipschitz charts
// along a synthetic period-p orbit. The ambient space is the box
// [0, 2p] x [0, 2]^(n-1); stage i occupies the slot with x_0 in [2i, 2i+2].

struct ChartMap {
  std::vector<Rational> center;
  std::vector<Rational> scale;  // per-axis, in [1/C, C]

  Point forward(const Point& x) const {
    Point y(x.size());
    for (std::size_t a = 0; a < x.size(); ++a)
      y[a] = to_double(scale[a]) * (x[a] - to_double(center[a]));
    return y;
  }
  Point inverse(const Point& y) const {
    Point x(y.size());
    for (std::size_t a = 0; a < y.size(); ++a)
      x[a] = y[a] / to_double(scale[a]) + to_double(center[a]);
    return x;
  }

  Rational lipschitz() const {
    Rational m = scale[0];
    for (const auto& s : scale) m = rat_max(m, s);
    return m;
  }
  Rational inverse_lipschitz() const {
    Rational m = scale[0];
    for (const auto& s : scale) m = rat_min(m, s);
    return 1 / m;
  }
};

struct ChainedHorseshoe {
  HorseshoeParams params;
  int p = 1;
  Rational chart_bound;  // C > 1
  std::uint64_t seed = 0;
  std::vector<ChartMap> charts;         // p entries
  std::vector<PseudoHorseshoe> stages;  // p entries

  Rectangle ambient_box() const {
    Rectangle b;
    b.lo.assign(params.n, 0.0);
    b.hi.assign(params.n, 2.0);
    b.hi[0] = 2.0 * p;
    return b;
  }

  int slot_of(const Point& x) const {
    int s = static_cast<int>(x[0] / 2.0);
    if (s >= p) s = p - 1;
    if (s < 0) s = 0;
    return s;
  }
};

inline ChainedHorseshoe build_chained(const HorseshoeParams& params, int p, const Rational& C,
                                      std::uint64_t seed = 0) {
  params.validate();
  if (p < 1) throw InvalidParams("chain period p must be at least 1");
  if (!(C > 1)) throw InvalidParams("chart bound C must exceed 1");

  ChainedHorseshoe ch;
  ch.params = params;
  ch.p = p;
  ch.chart_bound = C;
  ch.seed = seed;

  // Scales are drawn from a rational lattice inside [max(1/C, 9 delta/8), C],
  // so the bi-Lipschitz bound C and B_delta inside the chart image are both
  // exact coefficient facts.
  Rational lo = rat_max(Rational(Rational(1) / C), Rational(params.delta * Rational(9, 8)));
  if (!(lo < C)) throw InvalidParams("chart bound C too small for this delta");
  Rng rng(seed ^ 0x5bd1e995u);
  for (int i = 0; i < p; ++i) {
    ChartMap chart;
    chart.center.resize(params.n);
    chart.scale.resize(params.n);
    chart.center[0] = Rational(2 * i + 1);
    for (int a = 1; a < params.n; ++a) chart.center[a] = 1;
    for (int a = 0; a < params.n; ++a) {
      const auto t = rng.next_below(17);
      chart.scale[a] = lo + (C - lo) * Rational(static_cast<long>(t), 16);
    }
    ch.charts.push_back(std::move(chart));
  }

  const BigInt stage_pieces = BigInt(p) * params.rect_count_big() * params.rect_count_big();
  if (stage_pieces > BigInt(params.max_pieces))
    throw InfeasibleGrid("total piece count p*N^2 exceeds the configured budget");
  ch.stages.reserve(p);
  for (int i = 0; i < p; ++i) ch.stages.push_back(build_pseudo_horseshoe(params));
  return ch;
}

// Global map of the chained horseshoe: on stage i it equals
// psi_{i+1}^{-1} . phi_i . psi_i restricted to the Markov slabs.
inline std::optional<Point> apply_chained(const ChainedHorseshoe& ch, const Point& x) {
  if (static_cast<int>(x.size()) != ch.params.n) throw DimensionError("apply_chained");
  const int s = ch.slot_of(x);
  const Point y = ch.charts[s].forward(x);
  const auto z = apply_horseshoe(ch.stages[s], y);
  if (!z) return std::nullopt;
  return ch.charts[(s + 1) % ch.p].inverse(*z);
}

// Chart-side distance of two points in the same slot.
inline double chart_distance(const ChainedHorseshoe& ch, const Point& x, const Point& y) {
  const int sx = ch.slot_of(x);
  if (sx != ch.slot_of(y)) throw DomainError("chart_distance: points lie in different slots");
  return max_norm_dist(ch.charts[sx].forward(x), ch.charts[sx].forward(y));
}

// -------------------------------------------------------------------------
// Itineraries. A word (j_1, ..., j_m) with 0-based symbols names the set of
// points whose first m iterates visit rectangles R_{j_1}, ..., R_{j_m} in
// order; for this construction that set is an exact rectangle with positive
// volume, computed by pulling target rectangles back through the pieces.

using ItineraryWord = std::vector<int>;

namespace detail {

template <typename PieceAt>
RatBox itinerary_cell_impl(const std::vector<RatBox>& rects, PieceAt&& piece_at,
                           const ItineraryWord& word) {
  if (word.empty()) throw InvalidParams("itinerary word must have length at least 1");
  RatBox cell = rects[word.back()];
  for (int s = static_cast<int>(word.size()) - 2; s >= 0; --s) {
    const MarkovPiece& p = piece_at(s, word[s], word[s + 1]);
    const RatBox pre = p.preimage_of(cell);
    RatBox next;
    if (!intersect_boxes(p.slab, pre, next))
      throw InvalidParams("empty itinerary cell: pieces deviate from the canonical layout");
    cell = std::move(next);
  }
  return cell;
}

}  // namespace detail

inline RatBox itinerary_cell(const PseudoHorseshoe& h, const ItineraryWord& word) {
  for (int sym : word)
    if (sym < 0 || sym >= h.count()) throw InvalidParams("itinerary symbol out of range");
  return detail::itinerary_cell_impl(
      h.grid.rects, [&](int, int i, int j) -> const MarkovPiece& { return h.piece(i, j); },
      word);
}

// Cell of a chained horseshoe, expressed in stage-0 chart coordinates;
// step s goes through the pieces of stage s mod p.
inline RatBox itinerary_cell(const ChainedHorseshoe& ch, const ItineraryWord& word) {
  const long N = ch.stages[0].count();
  for (int sym : word)
    if (sym < 0 || sym >= N) throw InvalidParams("itinerary symbol out of range");
  return detail::itinerary_cell_impl(
      ch.stages[0].grid.rects,
      [&](int s, int i, int j) -> const MarkovPiece& { return ch.stages[s % ch.p].piece(i, j); },
      word);
}

// Double-precision cell for sampling paths; same recursion on the cached
// coefficients.
inline Rectangle itinerary_cell_d(const PseudoHorseshoe& h, const ItineraryWord& word) {
  if (word.empty()) throw InvalidParams("itinerary word must have length at least 1");
  const auto& c = h.cache;
  const int n = c.n;
  Rectangle cell = to_double_box(h.grid.rects[word.back()]);
  for (int s = static_cast<int>(word.size()) - 2; s >= 0; --s) {
    const std::size_t p =
        (static_cast<std::size_t>(word[s]) * c.count + word[s + 1]) * static_cast<std::size_t>(n);
    for (int a = 0; a < n; ++a) {
      const double sc = c.scale[p + a], off = c.offset[p + a];
      double lo = (cell.lo[a] - off) / sc;
      double hi = (cell.hi[a] - off) / sc;
      lo = std::max(lo, c.slab_lo[p + a]);
      hi = std::min(hi, c.slab_hi[p + a]);
      cell.lo[a] = lo;
      cell.hi[a] = hi;
    }
  }
  return cell;
}

// Exact itinerary count (N_k)^m as a big integer; the log is reported in
// doubles separately since the power overflows quickly.
inline BigInt symbolic_count(long rect_count, int m) {
  if (rect_count < 1 || m < 1) throw InvalidParams("symbolic_count: need N >= 1 and m >= 1");
  return bigint_pow(BigInt(rect_count), static_cast<unsigned>(m));
}

inline double symbolic_log_count(long rect_count, int m) {
  if (rect_count < 1 || m < 1) throw InvalidParams("symbolic_log_count: need N >= 1 and m >= 1");
  return static_cast<double>(m) * std::log(static_cast<double>(rect_count));
}

// Enumerates all words of the given length in lexicographic order, calling
// fn(word) for each. Returns the number of words visited.
template <typename Fn>
BigInt for_each_word(long rect_count, int length, Fn&& fn) {
  ItineraryWord word(length, 0);
  BigInt visited = 0;
  while (true) {
    fn(word);
    ++visited;
    int pos = length - 1;
    while (pos >= 0 && ++word[pos] == rect_count) word[pos--] = 0;
    if (pos < 0) break;
  }
  return visited;
}

}  // namespace mdimlab
