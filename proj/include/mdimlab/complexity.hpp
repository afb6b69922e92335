#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <unordered_map>
#include <vector>

#include "mdimlab/common.hpp"
#include "mdimlab/geometry.hpp"
#include "mdimlab/rational.hpp"
#include "mdimlab/systems.hpp"

namespace mdimlab {

enum class CountMode { greedy, symbolic };

inline const char* count_mode_name(CountMode m) {
  return m == CountMode::greedy ? "greedy" : "symbolic";
}

// ---------------------------------------------------------------------------
// Sample clouds: a finite proxy for the phase space, with orbits precomputed
// to a fixed horizon. Escapes are recorded per point; operations at horizon m
// use only the points whose orbits survive m steps.

enum class CloudSource { lattice, uniform, itinerary_cells, explicit_points };

struct SampleCloud {
  Domain domain;
  int dim = 0;
  int horizon = 0;
  std::size_t count = 0;
  std::vector<double> orbits;  // count * horizon * dim, point-major
  std::vector<int> steps;      // valid orbit length per point
  CloudSource source = CloudSource::explicit_points;

  // Itinerary metadata for clouds sampled from horseshoe cells (empty
  // otherwise). The two bounds certify when dynamical balls coincide with
  // cells: every cell has diameter <= cell_diameter and distinct cells are
  // at least min_cell_gap apart in d_m.
  std::vector<std::vector<int>> words;
  double cell_diameter = 0.0;
  double min_cell_gap = 0.0;

  bool torus() const { return std::holds_alternative<TorusDomain>(domain); }

  const double* at(std::size_t point, int step = 0) const {
    return orbits.data() + (point * horizon + step) * static_cast<std::size_t>(dim);
  }

  Point point_at(std::size_t point, int step = 0) const {
    const double* p = at(point, step);
    return Point(p, p + dim);
  }
};

namespace detail {

inline double step_dist(const double* a, const double* b, int dim, bool torus) {
  double m = 0.0;
  if (torus) {
    for (int i = 0; i < dim; ++i) m = std::max(m, circle_dist(a[i], b[i]));
  } else {
    for (int i = 0; i < dim; ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  }
  return m;
}

}  // namespace detail

// d_m between two cloud points (orbits must be valid to m steps).
inline double cloud_dyn_dist(const SampleCloud& c, std::size_t i, std::size_t j, int m) {
  const bool torus = c.torus();
  double best = 0.0;
  const std::size_t stride = static_cast<std::size_t>(c.dim);
  const double* a = c.at(i);
  const double* b = c.at(j);
  for (int s = 0; s < m; ++s, a += stride, b += stride)
    best = std::max(best, detail::step_dist(a, b, c.dim, torus));
  return best;
}

// true iff d_m(x_i, x_j) >= eps; exits at the first separating step.
inline bool cloud_separated(const SampleCloud& c, std::size_t i, std::size_t j, int m,
                            double eps) {
  const bool torus = c.torus();
  const std::size_t stride = static_cast<std::size_t>(c.dim);
  const double* a = c.at(i);
  const double* b = c.at(j);
  for (int s = 0; s < m; ++s, a += stride, b += stride)
    if (detail::step_dist(a, b, c.dim, torus) >= eps) return true;
  return false;
}

// Fills orbits for a list of start points.
inline SampleCloud make_cloud(const System& sys, const std::vector<Point>& starts, int horizon,
                              CloudSource source = CloudSource::explicit_points,
                              unsigned threads = 1) {
  if (horizon < 1) throw InvalidParams("cloud horizon must be at least 1");
  SampleCloud c;
  c.domain = sys.domain;
  c.dim = domain_dim(sys.domain);
  c.horizon = horizon;
  c.count = starts.size();
  c.source = source;
  c.orbits.assign(c.count * static_cast<std::size_t>(horizon) * c.dim, 0.0);
  c.steps.assign(c.count, 0);
  parallel_chunks(c.count, threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      const OrbitSegment seg = orbit(sys, starts[p], horizon);
      c.steps[p] = seg.length();
      for (int s = 0; s < seg.length(); ++s) {
        double* row = c.orbits.data() + (p * horizon + s) * c.dim;
        std::copy(seg.points[s].begin(), seg.points[s].end(), row);
      }
    }
  });
  return c;
}

// Regular lattice over the domain: `res` samples per axis, endpoints included
// for boxes and excluded for tori (0 and 1 coincide there).
inline SampleCloud lattice_cloud(const System& sys, long res, int horizon, unsigned threads = 1) {
  if (res < 2) throw InvalidParams("lattice resolution must be at least 2");
  const int n = domain_dim(sys.domain);
  const bool torus = std::holds_alternative<TorusDomain>(sys.domain);
  std::vector<double> lo(n, 0.0), width(n, 1.0);
  if (const auto* cube = std::get_if<CubeDomain>(&sys.domain)) {
    for (int a = 0; a < n; ++a) {
      lo[a] = cube->box.lo[a];
      width[a] = cube->box.side(a);
    }
  }
  BigInt total_big = bigint_pow(BigInt(res), static_cast<unsigned>(n));
  if (total_big > BigInt(1) << 26) throw InvalidParams("lattice cloud too large");
  const std::size_t total = static_cast<std::size_t>(total_big);
  std::vector<Point> starts;
  starts.reserve(total);
  std::vector<long> idx(n, 0);
  for (std::size_t f = 0; f < total; ++f) {
    Point p(n);
    for (int a = 0; a < n; ++a) {
      const double u = torus ? static_cast<double>(idx[a]) / res
                             : static_cast<double>(idx[a]) / (res - 1);
      p[a] = lo[a] + u * width[a];
    }
    starts.push_back(std::move(p));
    for (int a = n - 1; a >= 0; --a) {
      if (++idx[a] < res) break;
      idx[a] = 0;
    }
  }
  SampleCloud c = make_cloud(sys, starts, horizon, CloudSource::lattice, threads);
  return c;
}

inline SampleCloud uniform_cloud(const System& sys, std::size_t count, std::uint64_t seed,
                                 int horizon, unsigned threads = 1) {
  if (count < 1) throw InvalidParams("uniform cloud needs at least one point");
  const int n = domain_dim(sys.domain);
  std::vector<double> lo(n, 0.0), width(n, 1.0);
  if (const auto* cube = std::get_if<CubeDomain>(&sys.domain)) {
    for (int a = 0; a < n; ++a) {
      lo[a] = cube->box.lo[a];
      width[a] = cube->box.side(a);
    }
  }
  Rng rng(seed);
  std::vector<Point> starts;
  starts.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Point p(n);
    for (int a = 0; a < n; ++a) p[a] = lo[a] + width[a] * rng.next_unit();
    starts.push_back(std::move(p));
  }
  return make_cloud(sys, starts, horizon, CloudSource::uniform, threads);
}

// ---------------------------------------------------------------------------
// Uniform grid hash over step-0 coordinates with cell size >= eps: any two
// points closer than eps (max norm) land in the same or adjacent cells.

class GridIndex {
 public:
  GridIndex(const SampleCloud& cloud, double eps) : cloud_(&cloud), torus_(cloud.torus()) {
    if (!(eps > 0)) throw InvalidParams("GridIndex: eps must be positive");
    dim_ = cloud.dim;
    if (torus_) {
      cells_ = std::max<long>(1, static_cast<long>(std::floor(1.0 / eps)));
      cell_size_ = 1.0 / static_cast<double>(cells_);
    } else {
      cells_ = 0;
      cell_size_ = eps;
    }
  }

  void insert(std::uint32_t idx) {
    buckets_[key_of(cloud_->at(idx))].push_back(idx);
    ++size_;
  }

  std::size_t size() const { return size_; }

  // Visits every stored index whose step-0 cell is within one cell of x's.
  // Wrapped torus neighbors are deduplicated per axis so no bucket is seen
  // twice even when an axis has fewer than three cells.
  template <typename Fn>
  void for_candidates(const double* x, Fn&& fn) const {
    std::vector<std::vector<long>> axis_cells(dim_);
    for (int a = 0; a < dim_; ++a) {
      const long base = cell_coord(x[a]);
      for (long off = -1; off <= 1; ++off) {
        const long c = wrap_cell(base + off);
        auto& cells = axis_cells[a];
        if (std::find(cells.begin(), cells.end(), c) == cells.end()) cells.push_back(c);
      }
    }
    std::vector<std::size_t> pos(dim_, 0);
    while (true) {
      std::uint64_t key = 0x9e3779b97f4a7c15ULL;
      for (int a = 0; a < dim_; ++a) key = mix(key, axis_cells[a][pos[a]]);
      const auto it = buckets_.find(key);
      if (it != buckets_.end())
        for (std::uint32_t idx : it->second) fn(idx);
      int a = dim_ - 1;
      while (a >= 0 && ++pos[a] == axis_cells[a].size()) pos[a--] = 0;
      if (a < 0) break;
    }
  }

  // Neighbor query: all stored points within max-norm distance eps of x at
  // step 0 (candidates from the 3^n adjacent cells, then filtered).
  std::vector<std::uint32_t> query_within(const Point& x, double eps) const {
    std::vector<std::uint32_t> out;
    for_candidates(x.data(), [&](std::uint32_t idx) {
      if (detail::step_dist(x.data(), cloud_->at(idx), dim_, torus_) <= eps) out.push_back(idx);
    });
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::uint64_t key_of(const double* x) const {
    std::uint64_t key = 0x9e3779b97f4a7c15ULL;
    for (int a = 0; a < dim_; ++a) key = mix(key, cell_coord(x[a]));
    return key;
  }

  long cell_coord(double v) const {
    const long c = static_cast<long>(std::floor(v / cell_size_));
    return torus_ ? ((c % cells_) + cells_) % cells_ : c;
  }

  long wrap_cell(long c) const {
    if (!torus_) return c;
    return ((c % cells_) + cells_) % cells_;
  }

  static std::uint64_t mix(std::uint64_t h, long v) {
    std::uint64_t z = h ^ (static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    return z ^ (z >> 27);
  }

  const SampleCloud* cloud_;
  bool torus_;
  int dim_ = 0;
  long cells_ = 0;
  double cell_size_ = 0.0;
  std::size_t size_ = 0;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets_;
};

inline GridIndex build_spatial_index(const SampleCloud& cloud, double eps) {
  GridIndex idx(cloud, eps);
  for (std::size_t i = 0; i < cloud.count; ++i) idx.insert(static_cast<std::uint32_t>(i));
  return idx;
}

// ---------------------------------------------------------------------------
// Greedy maximal separated sets. Points are visited in lexicographic order
// of their step-0 coordinates (ties by original index), which makes the
// result deterministic; a point is kept iff it is d_m-separated by eps from
// every kept point. The returned set is maximal on the cloud, so its size
// is a lower bound for S restricted to the cloud.

namespace detail {

inline std::vector<std::uint32_t> cloud_visit_order(const SampleCloud& c) {
  std::vector<std::uint32_t> order(c.count);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    const double* pa = c.at(a);
    const double* pb = c.at(b);
    for (int i = 0; i < c.dim; ++i) {
      if (pa[i] < pb[i]) return true;
      if (pa[i] > pb[i]) return false;
    }
    return a < b;
  });
  return order;
}

}  // namespace detail

inline std::vector<std::uint32_t> max_separated(const SampleCloud& cloud, int m, double eps,
                                                bool use_index = true) {
  if (m < 1 || m > cloud.horizon) throw InvalidParams("max_separated: bad horizon m");
  if (!(eps > 0)) throw InvalidParams("max_separated: eps must be positive");
  const auto order = detail::cloud_visit_order(cloud);
  std::vector<std::uint32_t> kept;

  if (use_index) {
    GridIndex index(cloud, eps);
    for (std::uint32_t cand : order) {
      if (cloud.steps[cand] < m) continue;
      bool ok = true;
      // Only kept points within eps at step 0 can fail to be separated;
      // everyone else is separated already at step 0.
      index.for_candidates(cloud.at(cand), [&](std::uint32_t kq) {
        if (ok && !cloud_separated(cloud, cand, kq, m, eps)) ok = false;
      });
      if (ok) {
        index.insert(cand);
        kept.push_back(cand);
      }
    }
  } else {
    for (std::uint32_t cand : order) {
      if (cloud.steps[cand] < m) continue;
      bool ok = true;
      for (std::uint32_t kq : kept) {
        if (!cloud_separated(cloud, cand, kq, m, eps)) {
          ok = false;
          break;
        }
      }
      if (ok) kept.push_back(cand);
    }
  }
  return kept;
}

// ---------------------------------------------------------------------------
// Greedy covering by (m, eps)-dynamical balls centered at cloud points.
// Centers are restricted to a greedy maximal separated set: maximality makes
// those balls a cover, so the greedy count never exceeds the separated count
// and the packing/covering chain S(2e) <= N(e) <= S(e) holds on every run.

struct CoverCurve {
  std::vector<std::uint32_t> pick_order;   // chosen centers
  std::vector<std::size_t> covered_after;  // cumulative covered points
  std::size_t eligible = 0;                // points with orbits valid to m

  // Number of balls needed to cover at least `target` points.
  long balls_for(std::size_t target) const {
    if (target == 0) return 0;
    for (std::size_t i = 0; i < covered_after.size(); ++i)
      if (covered_after[i] >= target) return static_cast<long>(i) + 1;
    return static_cast<long>(covered_after.size());
  }
};

inline CoverCurve greedy_cover_curve(const SampleCloud& cloud, int m, double eps) {
  if (m < 1 || m > cloud.horizon) throw InvalidParams("greedy_cover_curve: bad horizon m");
  if (!(eps > 0)) throw InvalidParams("greedy_cover_curve: eps must be positive");
  CoverCurve curve;

  const std::vector<std::uint32_t> centers = max_separated(cloud, m, eps);
  GridIndex index = build_spatial_index(cloud, eps);

  // Ball membership (open balls, d_m < eps) computed once per center.
  std::vector<std::vector<std::uint32_t>> balls(centers.size());
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const std::uint32_t ci = centers[c];
    auto& ball = balls[c];
    index.for_candidates(cloud.at(ci), [&](std::uint32_t j) {
      if (cloud.steps[j] >= m && !cloud_separated(cloud, ci, j, m, eps)) ball.push_back(j);
    });
    std::sort(ball.begin(), ball.end());
  }

  std::size_t eligible = 0;
  for (std::size_t i = 0; i < cloud.count; ++i)
    if (cloud.steps[i] >= m) ++eligible;
  curve.eligible = eligible;

  // Lazy max-gain selection; ties resolved toward the smaller center index.
  using Entry = std::pair<std::size_t, std::uint32_t>;  // (gain bound, center slot)
  const auto cmp = [](const Entry& a, const Entry& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second > b.second;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
  for (std::size_t c = 0; c < centers.size(); ++c)
    heap.push({balls[c].size(), static_cast<std::uint32_t>(c)});

  std::vector<char> covered(cloud.count, 0);
  std::size_t covered_count = 0;
  while (covered_count < eligible && !heap.empty()) {
    auto [bound, slot] = heap.top();
    heap.pop();
    std::size_t gain = 0;
    for (std::uint32_t j : balls[slot])
      if (!covered[j]) ++gain;
    if (gain == 0) continue;
    if (!heap.empty() && gain < heap.top().first) {
      heap.push({gain, slot});
      continue;
    }
    for (std::uint32_t j : balls[slot]) {
      if (!covered[j]) {
        covered[j] = 1;
        ++covered_count;
      }
    }
    curve.pick_order.push_back(centers[slot]);
    curve.covered_after.push_back(covered_count);
  }
  return curve;
}

// Minimal-cardinality covering estimate (an upper bound for the covering
// number restricted to the cloud; greedy set cover is within a log factor
// of the optimal cover of the cloud).
inline long min_spanning(const SampleCloud& cloud, int m, double eps) {
  const CoverCurve curve = greedy_cover_curve(cloud, m, eps);
  return static_cast<long>(curve.pick_order.size());
}

// ---------------------------------------------------------------------------
// Rate fits and reports.

struct SepFit {
  double slope = 0.0;           // least-squares slope of log S against m
  double tail_quotient = 0.0;   // log S(m_max) / m_max
  bool degenerate = false;      // all counts equal
};

inline SepFit sep_rate(const std::vector<int>& ms, const std::vector<double>& log_counts) {
  if (ms.size() != log_counts.size() || ms.size() < 3)
    throw ScheduleError("sep_rate: need at least 3 horizon values");
  SepFit fit;
  fit.tail_quotient = log_counts.back() / ms.back();
  bool all_equal = true;
  for (double v : log_counts)
    if (v != log_counts.front()) all_equal = false;
  if (all_equal) {
    fit.degenerate = true;
    fit.slope = 0.0;
    return fit;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(ms.size());
  for (std::size_t i = 0; i < ms.size(); ++i) {
    sx += ms[i];
    sy += log_counts[i];
    sxx += static_cast<double>(ms[i]) * ms[i];
    sxy += ms[i] * log_counts[i];
  }
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return fit;
}

struct CountRow {
  int m = 0;
  double eps = 0.0;
  BigInt s_lower;      // separated-set size (lower bound for S on the cloud)
  long n_upper = -1;   // covering count (upper bound on the cloud), -1 if skipped
  CountMode mode = CountMode::greedy;
};

struct ComplexityReport {
  std::vector<CountRow> rows;
  std::vector<std::pair<double, SepFit>> sep_estimates;  // per eps
};

// ---------------------------------------------------------------------------
// Symbolic (closed-form) separated counts for the calibration systems and
// the horseshoe family. These serve as oracles for the greedy estimates.

inline BigInt symbolic_separated_count(const System& sys, int m, double eps) {
  if (m < 1 || !(eps > 0)) throw InvalidParams("symbolic_separated_count: bad arguments");

  const auto box_packing = [&](const Rectangle& box) {
    BigInt total = 1;
    for (int a = 0; a < box.dim(); ++a)
      total *= BigInt(static_cast<long long>(std::floor(box.side(a) / eps))) + 1;
    return total;
  };
  const auto torus_packing = [&](int n) {
    const long long per = std::max(1LL, static_cast<long long>(std::floor(1.0 / eps)));
    return bigint_pow(BigInt(per), static_cast<unsigned>(n));
  };

  if (std::holds_alternative<IdentityMap>(sys.kind) ||
      std::holds_alternative<RotationMap>(sys.kind)) {
    // Isometries: d_m equals the ambient metric, counts do not grow with m.
    if (const auto* cube = std::get_if<CubeDomain>(&sys.domain)) return box_packing(cube->box);
    return torus_packing(domain_dim(sys.domain));
  }
  if (std::holds_alternative<DoublingMap>(sys.kind)) {
    // Points eps * 2^-(m-1) apart are (m, eps)-separated on the circle.
    const double scale = std::ldexp(1.0 / eps, m - 1);
    if (scale > 9e18) throw InvalidParams("symbolic doubling count overflows the step budget");
    return BigInt(static_cast<long long>(std::floor(scale)));
  }
  const auto horseshoe_count = [&](const HorseshoeParams& p) {
    if (eps > to_double(p.eps()) * (1.0 + kDefaultTol))
      throw InvalidParams("symbolic horseshoe count requires eps <= delta / k");
    return symbolic_count(p.rect_count(), m);
  };
  if (const auto* h = std::get_if<HorseshoeMap>(&sys.kind)) return horseshoe_count(h->h->params);
  if (const auto* c = std::get_if<ChainedMap>(&sys.kind)) return horseshoe_count(c->c->params);
  throw InvalidParams("no symbolic counting backend for this system kind");
}

inline bool has_symbolic_backend(const System& sys) {
  return std::holds_alternative<IdentityMap>(sys.kind) ||
         std::holds_alternative<RotationMap>(sys.kind) ||
         std::holds_alternative<DoublingMap>(sys.kind) ||
         std::holds_alternative<HorseshoeMap>(sys.kind) ||
         std::holds_alternative<ChainedMap>(sys.kind);
}

// ---------------------------------------------------------------------------
// Finite-scale metric mean dimension estimate: per eps, the Sep slope over
// the m schedule divided by -log eps. The lower/upper fields are min/max of
// the ratio over the tail (second half) of the eps schedule. Values above
// dim + 0.2 are flagged as sampling artifacts, never clamped.

struct MdimRow {
  double eps = 0.0;
  double sep = 0.0;
  double ratio = 0.0;
  bool suspect = false;
  CountMode mode = CountMode::greedy;
};

struct MdimReport {
  std::vector<MdimRow> rows;
  double lower = 0.0;
  double upper = 0.0;
};

struct CloudSpec {
  enum class Kind { lattice, uniform } kind = Kind::lattice;
  long resolution = 64;
  std::size_t count = 10000;
  std::uint64_t seed = 1;
};

inline SampleCloud build_cloud(const System& sys, const CloudSpec& spec, int horizon,
                               unsigned threads = 1) {
  if (spec.kind == CloudSpec::Kind::lattice)
    return lattice_cloud(sys, spec.resolution, horizon, threads);
  return uniform_cloud(sys, spec.count, spec.seed, horizon, threads);
}

inline double greedy_sep_estimate(const SampleCloud& cloud, double eps,
                                  const std::vector<int>& m_schedule) {
  std::vector<double> logs;
  logs.reserve(m_schedule.size());
  for (int m : m_schedule) {
    const auto kept = max_separated(cloud, m, eps);
    logs.push_back(std::log(static_cast<double>(std::max<std::size_t>(1, kept.size()))));
  }
  return sep_rate(m_schedule, logs).slope;
}

// Symbolic mdim table for the horseshoe family: one row per k, at scale
// eps_k = delta / k, with the exact Sep slope log (2k)^n. No pieces are
// materialized, so the table extends to large k.
inline MdimReport horseshoe_family_mdim_table(int n, const Rational& delta,
                                              const std::vector<int>& k_schedule) {
  if (k_schedule.empty()) throw ScheduleError("horseshoe_family_mdim_table: empty k schedule");
  MdimReport report;
  for (int k : k_schedule) {
    HorseshoeParams p;
    p.n = n;
    p.k = k;
    p.delta = delta;
    p.max_rects = std::numeric_limits<std::size_t>::max();
    if (k < 1) throw ScheduleError("horseshoe_family_mdim_table: k must be positive");
    if (!(delta > 0) || !(delta < Rational(1, 2)))
      throw InvalidParams("horseshoe_family_mdim_table: delta must lie in (0, 1/2)");
    MdimRow row;
    row.eps = to_double(p.eps());
    row.sep = static_cast<double>(n) * std::log(2.0 * k);
    row.ratio = row.sep / (-std::log(row.eps));
    row.suspect = row.ratio > n + 0.2;
    row.mode = CountMode::symbolic;
    report.rows.push_back(row);
  }
  const std::size_t tail = report.rows.size() - report.rows.size() / 2;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = report.rows.size() - tail; i < report.rows.size(); ++i) {
    lo = std::min(lo, report.rows[i].ratio);
    hi = std::max(hi, report.rows[i].ratio);
  }
  report.lower = lo;
  report.upper = hi;
  return report;
}

inline MdimReport mdim_estimate(const System& sys, const std::vector<double>& eps_schedule,
                                const std::vector<int>& m_schedule, const CloudSpec& cloud_spec,
                                CountMode mode, unsigned threads = 1) {
  if (eps_schedule.size() < 3) throw ScheduleError("mdim_estimate: need at least 3 eps values");
  for (std::size_t i = 1; i < eps_schedule.size(); ++i)
    if (!(eps_schedule[i] < eps_schedule[i - 1]))
      throw ScheduleError("mdim_estimate: eps schedule must be strictly decreasing");
  if (m_schedule.size() < 3) throw ScheduleError("mdim_estimate: need at least 3 horizon values");

  const int n = domain_dim(sys.domain);
  MdimReport report;
  std::optional<SampleCloud> cloud;
  if (mode == CountMode::greedy) {
    const int horizon = *std::max_element(m_schedule.begin(), m_schedule.end());
    cloud = build_cloud(sys, cloud_spec, horizon, threads);
  }

  for (double eps : eps_schedule) {
    MdimRow row;
    row.eps = eps;
    row.mode = mode;
    if (mode == CountMode::symbolic) {
      std::vector<double> logs;
      for (int m : m_schedule) logs.push_back(log_bigint(symbolic_separated_count(sys, m, eps)));
      row.sep = sep_rate(m_schedule, logs).slope;
    } else {
      row.sep = greedy_sep_estimate(*cloud, eps, m_schedule);
    }
    row.ratio = row.sep / (-std::log(eps));
    row.suspect = row.ratio > n + 0.2;
    report.rows.push_back(row);
  }

  const std::size_t tail = report.rows.size() - report.rows.size() / 2;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = report.rows.size() - tail; i < report.rows.size(); ++i) {
    lo = std::min(lo, report.rows[i].ratio);
    hi = std::max(hi, report.rows[i].ratio);
  }
  report.lower = lo;
  report.upper = hi;
  return report;
}

}  // namespace mdimlab
