// Acceptance suite: end-to-end checks of the quantitative guarantees this
// library is built around, each with its tolerance pinned in code. Prints
// one line per criterion and exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "mdimlab/complexity.hpp"
#include "mdimlab/horseshoe.hpp"
#include "mdimlab/katok.hpp"
#include "mdimlab/markov_check.hpp"
#include "mdimlab/systems.hpp"
#include "oracles.hpp"

using namespace mdimlab;
using Clock = std::chrono::steady_clock;

namespace {

struct Criterion {
  std::string name;
  std::function<bool(std::string&)> run;
  double budget_seconds;
};

HorseshoeParams make_params(int n, int k, const Rational& delta) {
  HorseshoeParams p;
  p.n = n;
  p.k = k;
  p.delta = delta;
  return p;
}

bool check(bool ok, std::string& detail, const std::string& msg) {
  if (!ok && detail.empty()) detail = msg;
  return ok;
}

// 1. Exact itinerary counts: the number of nonempty itinerary cells equals
//    (N_k)^m = (2 delta / eps_k)^(n m) exactly, and representatives of
//    distinct words are chart-side separated by eps_k.
bool criterion_itinerary_counts(std::string& detail) {
  bool ok = true;
  const Rational delta(1, 4);
  for (int k : {1, 2}) {
    for (int p : {1, 3}) {
      const auto ch = std::make_shared<ChainedHorseshoe>(
          build_chained(make_params(2, k, delta), p, Rational(3, 2), 7));
      const System sys = make_chained_system(ch);
      const PseudoHorseshoe& stage = ch->stages[0];
      const long N = stage.count();
      const double eps = to_double(ch->params.eps());
      for (int m = 1; m <= 5; ++m) {
        BigInt nonempty = 0;
        for_each_word(N, m, [&](const ItineraryWord& w) {
          const Rectangle cell = itinerary_cell_d(stage, w);
          bool pos = true;
          for (int a = 0; a < 2; ++a) pos = pos && cell.lo[a] < cell.hi[a];
          if (pos) ++nonempty;
        });
        const BigInt expected = symbolic_count(N, m);
        ok &= check(nonempty == expected, detail,
                    "cell count mismatch at k=" + std::to_string(k) + " m=" + std::to_string(m));
        ok &= check(expected == bigint_pow(BigInt(2 * k), static_cast<unsigned>(2 * m)), detail,
                    "(2 delta / eps)^(n m) identity failed");
        // Chart-side separation of representatives on sampled word pairs.
        Rng rng(1000 * k + 10 * p + m);
        for (int t = 0; t < 400; ++t) {
          ItineraryWord a(m), b(m);
          for (int s = 0; s < m; ++s) {
            a[s] = static_cast<int>(rng.next_below(N));
            b[s] = static_cast<int>(rng.next_below(N));
          }
          if (a == b) continue;
          const Point pa = ch->charts[0].inverse(box_center(itinerary_cell_d(stage, a)));
          const Point pb = ch->charts[0].inverse(box_center(itinerary_cell_d(stage, b)));
          ok &= check(chart_side_dyn_distance(sys, m, pa, pb) >= eps, detail,
                      "chart-side separation below eps_k");
        }
      }
      // Exact-cell spot checks in rational arithmetic.
      Rng rng(k * 31 + p);
      for (int t = 0; t < 40; ++t) {
        ItineraryWord w(5);
        for (auto& s : w) s = static_cast<int>(rng.next_below(N));
        ok &= check(itinerary_cell(*ch, w).valid_rectangle(), detail,
                    "exact itinerary cell empty");
      }
    }
  }
  return ok;
}

// 2. Symbolic mdim table over k = 1..64 reproduces the lower-bound display
//    n (1 - log(2 delta) / log eps_k); the k=64 value is within 0.1 n of n
//    and no value exceeds n + 0.001.
bool criterion_family_slope(std::string& detail) {
  const int n = 2;
  const Rational delta(2, 5);
  std::vector<int> ks;
  for (int k = 1; k <= 64; ++k) ks.push_back(k);
  const MdimReport table = horseshoe_family_mdim_table(n, delta, ks);
  bool ok = check(table.rows.size() == 64, detail, "row count");
  const double log2delta = std::log(2.0 * to_double(delta));
  for (const auto& row : table.rows) {
    const double display = n * (1.0 - log2delta / std::log(row.eps));
    ok &= check(std::fabs(row.ratio - display) <= 1e-9, detail,
                "row deviates from the closed-form display");
    ok &= check(row.ratio <= n + 0.001, detail, "ratio exceeds the dimension ceiling");
  }
  ok &= check(std::fabs(table.rows.back().ratio - n) <= 0.1 * n, detail,
              "k=64 ratio not within 0.1 n of n");
  return ok;
}

// 3. Greedy separated-set extraction on itinerary-cell centers returns
//    exactly (N_k)^m points at threshold eps_k (n=2, k=1, m <= 4).
bool criterion_greedy_matches_symbolic(std::string& detail) {
  const auto h = std::make_shared<PseudoHorseshoe>(
      build_pseudo_horseshoe(make_params(2, 1, Rational(1, 4))));
  const System sys = make_horseshoe_system(h);
  const double eps = to_double(h->params.eps());
  bool ok = true;
  for (int m = 1; m <= 4; ++m) {
    std::vector<Point> reps;
    for_each_word(h->count(), m, [&](const ItineraryWord& w) {
      reps.push_back(box_center(itinerary_cell_d(*h, w)));
    });
    const SampleCloud cloud = make_cloud(sys, reps, m, CloudSource::itinerary_cells);
    const auto kept = max_separated(cloud, m, eps);
    ok &= check(BigInt(static_cast<long long>(kept.size())) == symbolic_count(h->count(), m),
                detail, "greedy count != (N_k)^m at m=" + std::to_string(m));
  }
  return ok;
}

// 4. Markovian verification: every piece of every built horseshoe passes in
//    exact mode and at sampling resolution 16; a corrupted piece fails.
bool criterion_markov_verification(std::string& detail) {
  bool ok = true;
  for (int k : {1, 2}) {
    const PseudoHorseshoe h = build_pseudo_horseshoe(make_params(2, k, Rational(1, 4)));
    const long N = h.count();
    for (long i = 0; i < N; ++i) {
      for (long j = 0; j < N; ++j) {
        ok &= check(verify_markovian_exact(h, i, j).passed, detail, "exact verdict failed");
        const MarkovPiece& piece = h.piece(i, j);
        std::vector<double> scale(2), offset(2);
        for (int a = 0; a < 2; ++a) {
          scale[a] = to_double(piece.scale[a]);
          offset[a] = to_double(piece.offset[a]);
        }
        const EvalMap phi = [&scale, &offset](const Point& x) -> std::optional<Point> {
          Point y(2);
          for (int a = 0; a < 2; ++a) y[a] = scale[a] * x[a] + offset[a];
          return y;
        };
        ok &= check(verify_markovian(phi, to_double_box(h.grid.rects[i]),
                                     to_double_box(h.grid.rects[j]), to_double_box(piece.slab), 16)
                        .passed,
                    detail, "sampled verdict failed at resolution 16");
      }
    }
  }
  // Adversarial corruption: shift one piece's vertical translation by
  // 2 delta, pushing its strip outside the target rectangle.
  const PseudoHorseshoe h = build_pseudo_horseshoe(make_params(2, 1, Rational(1, 4)));
  AffinePieceData bad = piece_data(h, 1, 2);
  bad.offset[1] += 2 * h.params.delta;
  ok &= check(!verify_markovian_exact(bad).passed, detail, "corrupted piece passed");
  return ok;
}

// 5. Variational comparison with the Bernoulli itinerary measure: per k in
//    1..8 the Katok column and the Sep column differ by at most 0.1 n, and
//    the final row reaches at least 0.8 n.
bool criterion_variational_gap(std::string& detail) {
  const int n = 2;
  const Rational delta(2, 5);
  bool ok = true;
  double final_sep = 0, final_h = 0;
  for (int k = 1; k <= 8; ++k) {
    const auto h = std::make_shared<PseudoHorseshoe>(
        build_pseudo_horseshoe(make_params(n, k, delta)));
    const System sys = make_horseshoe_system(h);
    MeasureSpec spec;
    spec.kind = MeasureSpec::Kind::bernoulli_itineraries;
    spec.horseshoe = h;
    spec.depth = 3;
    spec.seed = 4242;
    const double eps = to_double(h->params.eps());
    const GapReport r = variational_gap(sys, spec, {eps}, {0.5, 0.2, 0.1, 0.05}, {1, 2, 3},
                                        100000, CountMode::symbolic);
    const GapRow& row = r.rows.front();
    ok &= check(std::fabs(row.gap) <= 0.1 * n, detail,
                "gap above 0.1 n at k=" + std::to_string(k));
    final_sep = row.sep_col;
    final_h = row.h_col;
  }
  ok &= check(final_sep >= 0.8 * n, detail, "final Sep column below 0.8 n");
  ok &= check(final_h >= 0.8 * n, detail, "final Katok column below 0.8 n");
  return ok;
}

// 6. Calibration against known growth rates: doubling-map Sep rate within
//    10% of log 2 at eps = 2^-6; identity and rotation mdim at most 0.05.
bool criterion_calibration(std::string& detail) {
  bool ok = true;
  {
    const System sys = make_doubling();
    const SampleCloud cloud = lattice_cloud(sys, 65536, 10);
    std::vector<int> ms{6, 7, 8, 9, 10};
    std::vector<double> logs;
    for (int m : ms)
      logs.push_back(std::log(static_cast<double>(max_separated(cloud, m, 0.015625).size())));
    const double slope = sep_rate(ms, logs).slope;
    ok &= check(std::fabs(slope - std::log(2.0)) <= 0.1 * std::log(2.0), detail,
                "doubling Sep rate off by more than 10%");
  }
  const CloudSpec spec{CloudSpec::Kind::lattice, 65, 0, 1};
  const std::vector<double> epss{0.25, 0.125, 0.0625};
  const std::vector<int> ms{1, 2, 3};
  for (const System& sys : {make_identity_cube(2), make_rotation({0.3183098861837907, 0.1})}) {
    const MdimReport r = mdim_estimate(sys, epss, ms, spec, CountMode::greedy);
    ok &= check(r.upper <= 0.05, detail, "isometry mdim estimate above 0.05");
  }
  return ok;
}

// 7. Conservativity surrogate: every piece has determinant exactly one in
//    rational arithmetic, and a 1e5-sample pushforward is uniform on image
//    sub-boxes within three standard errors.
bool criterion_volume_preservation(std::string& detail) {
  const PseudoHorseshoe h = build_pseudo_horseshoe(make_params(2, 1, Rational(1, 4)));
  bool ok = true;
  for (const auto& piece : h.pieces)
    ok &= check(piece.det() == Rational(1), detail, "determinant differs from one");

  const MarkovPiece& piece = h.piece(0, 1);
  const Rectangle slab = to_double_box(piece.slab);
  const Rectangle strip = to_double_box(piece.image_of(piece.slab));
  const std::size_t samples = 100000;
  const auto sub_box = [&](double flo, double fhi) {
    Rectangle b = strip;
    for (int a = 0; a < 2; ++a) {
      const double w = strip.hi[a] - strip.lo[a];
      b.lo[a] = strip.lo[a] + flo * w;
      b.hi[a] = strip.lo[a] + fhi * w;
    }
    return b;
  };
  const Rectangle boxes[3] = {sub_box(0.0, 0.5), sub_box(0.25, 0.75), sub_box(0.45, 0.55)};
  const double fractions[3] = {0.25, 0.25, 0.01};
  std::size_t hits[3] = {0, 0, 0};
  Rng rng(2024);
  for (std::size_t s = 0; s < samples; ++s) {
    Point x(2);
    for (int a = 0; a < 2; ++a)
      x[a] = slab.lo[a] + (slab.hi[a] - slab.lo[a]) * rng.next_unit();
    const auto img = apply_horseshoe(h, x);
    if (!img) return check(false, detail, "sample escaped its own slab");
    for (int b = 0; b < 3; ++b)
      if (boxes[b].contains(*img)) ++hits[b];
  }
  for (int b = 0; b < 3; ++b) {
    const double p = fractions[b];
    const double se = std::sqrt(p * (1 - p) / samples);
    ok &= check(std::fabs(static_cast<double>(hits[b]) / samples - p) <= 3 * se, detail,
                "pushforward frequency outside 3 standard errors");
  }
  return ok;
}

// 8. Determinism/performance gate: index-accelerated and naive extraction
//    agree exactly on 1e4 lattice points, with the indexed path at least
//    5x faster at eps = 2^-5.
bool criterion_index_performance(std::string& detail) {
  const System sys = make_cat_map();
  const SampleCloud cloud = lattice_cloud(sys, 100, 4);
  const double eps = 0.03125;
  const int m = 4;
  double best_indexed = 1e100, best_naive = 1e100;
  std::vector<std::uint32_t> indexed, naive;
  for (int rep = 0; rep < 3; ++rep) {
    const auto t0 = Clock::now();
    indexed = max_separated(cloud, m, eps, true);
    const auto t1 = Clock::now();
    naive = max_separated(cloud, m, eps, false);
    const auto t2 = Clock::now();
    best_indexed = std::min(best_indexed, std::chrono::duration<double>(t1 - t0).count());
    best_naive = std::min(best_naive, std::chrono::duration<double>(t2 - t1).count());
  }
  bool ok = check(indexed == naive, detail, "indexed and naive outputs differ");
  ok &= check(indexed == oracles::naive_max_separated(cloud, m, eps), detail,
              "outputs differ from the reference oracle");
  const double speedup = best_naive / best_indexed;
  ok &= check(speedup >= 5.0, detail,
              "speedup " + std::to_string(speedup) + "x below the 5x gate");
  return ok;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"itinerary cell count equals (N_k)^m with chart-side separation", criterion_itinerary_counts, 10.0},
      {"symbolic mdim table reproduces the family slope and ceiling", criterion_family_slope, 5.0},
      {"greedy separated extraction matches the symbolic count", criterion_greedy_matches_symbolic, 60.0},
      {"all Markov pieces verify exactly and at resolution 16; corruption fails", criterion_markov_verification, 10.0},
      {"Katok column tracks Sep column for the Bernoulli measure", criterion_variational_gap, 300.0},
      {"calibration: doubling log 2 within 10%, isometries below 0.05", criterion_calibration, 120.0},
      {"unit determinants and uniform pushforward at 3 sigma", criterion_volume_preservation, 60.0},
      {"indexed extraction matches naive and is at least 5x faster", criterion_index_performance, 0.0},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = criteria[i].run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (ok && criteria[i].budget_seconds > 0 && secs > criteria[i].budget_seconds) {
      ok = false;
      detail = "runtime budget exceeded";
    }
    std::printf("[%s] criterion %zu: %s (%.2fs)%s%s\n", ok ? "PASS" : "FAIL", i + 1,
                criteria[i].name.c_str(), secs, detail.empty() ? "" : " - ",
                detail.c_str());
    if (!ok) ++failures;
  }
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all %zu criteria passed\n", criteria.size());
  return 0;
}
