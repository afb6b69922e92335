#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <vector>

#include "mdimlab/common.hpp"
#include "mdimlab/complexity.hpp"
#include "mdimlab/horseshoe.hpp"
#include "mdimlab/systems.hpp"

namespace mdimlab {

// A samplable probability measure standing in for an invariant measure.
// - lebesgue_cube: normalized volume on the system's box domain;
// - bernoulli_itineraries: uniform symbol sequences of the given depth on a
//   horseshoe, realized by sampling uniformly inside the itinerary cell
//   (the maximal-entropy measure of the full shift on N_k symbols);
// - empirical: exactly the given points.
struct MeasureSpec {
  enum class Kind { lebesgue_cube, bernoulli_itineraries, empirical };
  Kind kind = Kind::lebesgue_cube;
  std::uint64_t seed = 1;

  std::shared_ptr<const PseudoHorseshoe> horseshoe;  // bernoulli_itineraries
  int depth = 3;

  std::vector<Point> points;  // empirical
};

inline SampleCloud sample_measure(const System& sys, const MeasureSpec& spec, std::size_t count,
                                  unsigned threads = 1) {
  switch (spec.kind) {
    case MeasureSpec::Kind::lebesgue_cube: {
      if (!std::holds_alternative<CubeDomain>(sys.domain) &&
          !std::holds_alternative<TorusDomain>(sys.domain))
        throw InvalidParams("sample_measure: unsupported domain");
      const int horizon = std::max(1, spec.depth);
      return uniform_cloud(sys, count, spec.seed, horizon, threads);
    }
    case MeasureSpec::Kind::empirical: {
      if (spec.points.empty()) throw InvalidParams("sample_measure: empty empirical measure");
      return make_cloud(sys, spec.points, std::max(1, spec.depth),
                        CloudSource::explicit_points, threads);
    }
    case MeasureSpec::Kind::bernoulli_itineraries: {
      if (!spec.horseshoe) throw InvalidParams("sample_measure: missing horseshoe reference");
      const PseudoHorseshoe& h = *spec.horseshoe;
      if (spec.depth < 1) throw InvalidParams("sample_measure: depth must be at least 1");
      const long N = h.count();
      Rng rng(spec.seed);
      std::vector<Point> starts;
      starts.reserve(count);
      std::vector<std::vector<int>> words;
      words.reserve(count);
      ItineraryWord word(spec.depth);
      for (std::size_t s = 0; s < count; ++s) {
        for (int d = 0; d < spec.depth; ++d)
          word[d] = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(N)));
        const Rectangle cell = itinerary_cell_d(h, word);
        Point p(h.params.n);
        for (int a = 0; a < h.params.n; ++a) {
          // Stay strictly inside the cell so rounding can never push the
          // sample across a slab boundary.
          const double u = 0.001 + 0.998 * rng.next_unit();
          p[a] = cell.lo[a] + u * (cell.hi[a] - cell.lo[a]);
        }
        starts.push_back(std::move(p));
        words.push_back(word);
      }
      SampleCloud c = make_cloud(sys, starts, spec.depth, CloudSource::itinerary_cells, threads);
      c.words = std::move(words);
      // Certificates for the ball/cell equivalence: cells sit inside grid
      // rectangles of side w, and distinct words are separated by at least
      // the grid gap at the step where they first differ.
      c.cell_diameter = to_double(h.grid.w) * (1.0 + 1e-12);
      c.min_cell_gap = to_double(h.grid.gap) * (1.0 - 1e-12);
      return c;
    }
  }
  throw InvalidParams("sample_measure: unknown measure kind");
}

// ---------------------------------------------------------------------------
// Empirical Katok covering count: the number of (m, eps)-dynamical balls
// centered at cloud points needed to cover ceil((1 - mass_delta) * |cloud|)
// + 1 sample points. When the cloud carries itinerary words and eps lies
// strictly between the cell diameter and the inter-cell gap, each ball
// covers exactly one depth-m cell, so the greedy cover reduces to counting
// cells by occupancy; otherwise the generic greedy cover runs.

namespace detail {

inline bool cell_mode_valid(const SampleCloud& cloud, int m, double eps) {
  return !cloud.words.empty() && m >= 1 &&
         m <= static_cast<int>(cloud.words.front().size()) && cloud.cell_diameter < eps &&
         eps <= cloud.min_cell_gap;
}

// Occupancy of depth-m cells, sorted descending.
inline std::vector<std::size_t> cell_occupancy(const SampleCloud& cloud, int m) {
  std::map<std::vector<int>, std::size_t> occ;
  std::vector<int> prefix(m);
  for (const auto& w : cloud.words) {
    std::copy(w.begin(), w.begin() + m, prefix.begin());
    ++occ[prefix];
  }
  std::vector<std::size_t> counts;
  counts.reserve(occ.size());
  for (const auto& [w, c] : occ) counts.push_back(c);
  std::sort(counts.rbegin(), counts.rend());
  return counts;
}

inline std::size_t katok_target(std::size_t count, double mass_delta) {
  const double need = std::ceil((1.0 - mass_delta) * static_cast<double>(count)) + 1.0;
  return std::min(count, static_cast<std::size_t>(need));
}

}  // namespace detail

inline long katok_cover_count(const SampleCloud& cloud, int m, double eps, double mass_delta) {
  if (!(mass_delta > 0.0) || !(mass_delta < 1.0))
    throw InvalidParams("katok_cover_count: mass_delta must lie in (0, 1)");
  const std::size_t target = detail::katok_target(cloud.count, mass_delta);
  if (detail::cell_mode_valid(cloud, m, eps)) {
    const auto occ = detail::cell_occupancy(cloud, m);
    std::size_t covered = 0;
    long balls = 0;
    for (std::size_t c : occ) {
      covered += c;
      ++balls;
      if (covered >= target) return balls;
    }
    return balls;
  }
  const CoverCurve curve = greedy_cover_curve(cloud, m, eps);
  return curve.balls_for(std::min(target, curve.eligible));
}

struct KatokRow {
  int m = 0;
  double eps = 0.0;
  double mass_delta = 0.0;
  long n_nu = 0;
  double h_estimate = 0.0;  // log(n_nu) / m
  bool cell_mode = false;
};

struct KatokReport {
  std::vector<KatokRow> rows;
  double slope = 0.0;  // least-squares slope of log N_nu against m
  bool degenerate = false;
};

// Katok eps-entropy estimate for the measure: growth rate in m of the
// covering counts at the given eps and mass deficit.
inline KatokReport katok_entropy(const System& sys, const MeasureSpec& spec, double eps,
                                 double mass_delta, const std::vector<int>& m_range,
                                 std::size_t count, unsigned threads = 1) {
  if (m_range.size() < 3) throw ScheduleError("katok_entropy: need at least 3 horizon values");
  MeasureSpec local = spec;
  local.depth = std::max(local.depth, *std::max_element(m_range.begin(), m_range.end()));
  const SampleCloud cloud = sample_measure(sys, local, count, threads);

  KatokReport report;
  std::vector<double> logs;
  for (int m : m_range) {
    KatokRow row;
    row.m = m;
    row.eps = eps;
    row.mass_delta = mass_delta;
    row.cell_mode = detail::cell_mode_valid(cloud, m, eps);
    row.n_nu = katok_cover_count(cloud, m, eps, mass_delta);
    row.h_estimate = std::log(static_cast<double>(std::max<long>(1, row.n_nu))) / m;
    logs.push_back(std::log(static_cast<double>(std::max<long>(1, row.n_nu))));
    report.rows.push_back(row);
  }
  const SepFit fit = sep_rate(m_range, logs);
  report.slope = fit.slope;
  report.degenerate = fit.degenerate;
  return report;
}

// ---------------------------------------------------------------------------
// Variational comparison at finite scale: per eps, the best Katok quotient
// over the mass-delta grid against the Sep estimate, both divided by
// -log eps. Cell-backed clouds use the deepest affordable horizon quotient
// (the regression saturates once the number of cells passes the sample
// budget); generic clouds use the regression slope.

struct GapRow {
  double eps = 0.0;
  double sep_col = 0.0;  // Sep(eps) / (-log eps)
  double h_col = 0.0;    // sup over delta of the Katok estimate / (-log eps)
  double gap = 0.0;      // sep_col - h_col
  double best_delta = 0.0;
  bool cell_mode = false;
  CountMode sep_mode = CountMode::greedy;
};

struct GapReport {
  std::vector<GapRow> rows;
};

inline GapReport variational_gap(const System& sys, const MeasureSpec& spec,
                                 const std::vector<double>& eps_schedule,
                                 const std::vector<double>& mass_delta_schedule,
                                 const std::vector<int>& m_schedule, std::size_t count,
                                 CountMode sep_mode, const CloudSpec& sep_cloud_spec = {},
                                 unsigned threads = 1) {
  if (eps_schedule.empty() || mass_delta_schedule.empty() || m_schedule.size() < 3)
    throw ScheduleError("variational_gap: empty schedule");

  MeasureSpec local = spec;
  local.depth = std::max(local.depth, *std::max_element(m_schedule.begin(), m_schedule.end()));
  const SampleCloud measure_cloud = sample_measure(sys, local, count, threads);

  std::optional<SampleCloud> sep_cloud;
  if (sep_mode == CountMode::greedy) {
    const int horizon = *std::max_element(m_schedule.begin(), m_schedule.end());
    sep_cloud = build_cloud(sys, sep_cloud_spec, horizon, threads);
  }

  GapReport report;
  for (double eps : eps_schedule) {
    GapRow row;
    row.eps = eps;
    row.sep_mode = sep_mode;
    const double denom = -std::log(eps);
    if (sep_mode == CountMode::symbolic) {
      std::vector<double> logs;
      for (int m : m_schedule) logs.push_back(log_bigint(symbolic_separated_count(sys, m, eps)));
      row.sep_col = sep_rate(m_schedule, logs).slope / denom;
    } else {
      row.sep_col = greedy_sep_estimate(*sep_cloud, eps, m_schedule) / denom;
    }

    row.cell_mode = detail::cell_mode_valid(measure_cloud, m_schedule.front(), eps);
    double best_h = 0.0;
    double best_delta = mass_delta_schedule.front();
    for (double d : mass_delta_schedule) {
      double h = 0.0;
      if (row.cell_mode) {
        for (int m : m_schedule) {
          const long c = katok_cover_count(measure_cloud, m, eps, d);
          h = std::max(h, std::log(static_cast<double>(std::max<long>(1, c))) / m);
        }
      } else {
        std::vector<double> logs;
        for (int m : m_schedule) {
          const long c = katok_cover_count(measure_cloud, m, eps, d);
          logs.push_back(std::log(static_cast<double>(std::max<long>(1, c))));
        }
        h = sep_rate(m_schedule, logs).slope;
      }
      if (h > best_h) {
        best_h = h;
        best_delta = d;
      }
    }
    row.h_col = best_h / denom;
    row.best_delta = best_delta;
    row.gap = row.sep_col - row.h_col;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace mdimlab
