#include "mdimlab/complexity.hpp"

#include <gtest/gtest.h>

#include "mdimlab/horseshoe.hpp"
#include "mdimlab/katok.hpp"
#include "oracles.hpp"

using namespace mdimlab;

namespace {

std::shared_ptr<PseudoHorseshoe> horseshoe(int k) {
  HorseshoeParams p;
  p.n = 2;
  p.k = k;
  p.delta = Rational(1, 4);
  return std::make_shared<PseudoHorseshoe>(build_pseudo_horseshoe(p));
}

SampleCloud cell_center_cloud(const std::shared_ptr<PseudoHorseshoe>& h, int m) {
  const System sys = make_horseshoe_system(h);
  std::vector<Point> reps;
  for_each_word(h->count(), m, [&](const ItineraryWord& w) {
    reps.push_back(box_center(itinerary_cell_d(*h, w)));
  });
  return make_cloud(sys, reps, m, CloudSource::itinerary_cells);
}

}  // namespace

TEST(CloudBuild, OrbitsMatchSystems) {
  const System sys = make_doubling();
  const SampleCloud c = lattice_cloud(sys, 64, 6);
  Rng rng(5);
  for (int t = 0; t < 40; ++t) {
    const std::size_t i = rng.next_below(c.count);
    const OrbitSegment seg = orbit(sys, c.point_at(i, 0), 6);
    ASSERT_EQ(seg.length(), c.steps[i]);
    for (int s = 0; s < seg.length(); ++s)
      EXPECT_EQ(seg.points[s][0], c.at(i, s)[0]);
  }
}

TEST(CloudBuild, ThreadCountDoesNotChangeOrbits) {
  const System sys = make_cat_map();
  const SampleCloud a = lattice_cloud(sys, 17, 5, 1);
  const SampleCloud b = lattice_cloud(sys, 17, 5, 4);
  EXPECT_EQ(a.orbits, b.orbits);
  EXPECT_EQ(a.steps, b.steps);
}

TEST(SpatialIndex, NeighborQuerySemantics) {
  const System sys = make_identity_cube(2);
  const SampleCloud c =
      make_cloud(sys, {{0.5, 0.5}, {0.5, 0.5 + 0.15}, {0.5, 0.5 + 0.3}}, 1);
  const GridIndex idx = build_spatial_index(c, 0.2);
  // Query at a stored point includes the point itself.
  const auto at_self = idx.query_within({0.5, 0.5}, 0.2);
  EXPECT_TRUE(std::find(at_self.begin(), at_self.end(), 0u) != at_self.end());
  EXPECT_TRUE(std::find(at_self.begin(), at_self.end(), 1u) != at_self.end());
  // A point at 1.5 * eps is not a neighbor.
  EXPECT_TRUE(std::find(at_self.begin(), at_self.end(), 2u) == at_self.end());
}

TEST(SpatialIndex, CoarseTorusCellsVisitBucketsOnce) {
  // With eps >= 1/3 a torus axis has at most two index cells; wrapped
  // neighbor enumeration must not report candidates twice.
  const System sys = make_doubling();
  const SampleCloud c = lattice_cloud(sys, 64, 3);
  const GridIndex idx = build_spatial_index(c, 0.4);
  std::size_t visits = 0;
  idx.for_candidates(c.at(0), [&](std::uint32_t) { ++visits; });
  EXPECT_EQ(visits, c.count);  // every point exactly once
  EXPECT_EQ(max_separated(c, 2, 0.4, true), max_separated(c, 2, 0.4, false));
  const long s2 = static_cast<long>(max_separated(c, 2, 0.8).size());
  const long n = min_spanning(c, 2, 0.4);
  EXPECT_LE(s2, n);
}

TEST(SpatialIndex, TorusWrapsAround) {
  const System sys = make_doubling();
  const SampleCloud c = make_cloud(sys, {{0.01}, {0.99}}, 1);
  const GridIndex idx = build_spatial_index(c, 0.1);
  const auto near_zero = idx.query_within({0.01}, 0.1);
  EXPECT_EQ(near_zero.size(), 2u);  // 0.99 is 0.02 away across the wrap
}

TEST(MaxSeparated, IdentityLatticePacking) {
  const System sys = make_identity_cube(2);
  const SampleCloud c = lattice_cloud(sys, 33, 1);
  for (int m : {1}) {
    const auto kept = max_separated(c, m, 0.25);
    EXPECT_EQ(kept.size(), 25u);  // 5 x 5 max-norm packing
    EXPECT_EQ(static_cast<long long>(kept.size()),
              oracles::box_lattice_packing(make_box<double>({0, 0}, {1, 1}), 0.25));
  }
}

TEST(MaxSeparated, DoublingM1MatchesAmbientPacking) {
  const System doubling = make_doubling();
  const SampleCloud c = lattice_cloud(doubling, 256, 2);
  const auto m1 = max_separated(c, 1, 1.0 / 16);
  // d_1 is the ambient circle metric: 16 points at spacing 1/16.
  EXPECT_EQ(m1.size(), 16u);
}

TEST(MaxSeparated, HorseshoeCellCentersAllKept) {
  const auto h = horseshoe(1);
  const SampleCloud c = cell_center_cloud(h, 3);
  ASSERT_EQ(c.count, 64u);
  const auto kept = max_separated(c, 3, to_double(h->params.eps()));
  EXPECT_EQ(kept.size(), 64u);
}

TEST(MaxSeparated, IndexedEqualsNaive) {
  const System sys = make_cat_map();
  const SampleCloud c = uniform_cloud(sys, 10000, 31, 4);
  for (double eps : {0.125, 0.03125}) {
    for (int m : {1, 3}) {
      const auto indexed = max_separated(c, m, eps, true);
      const auto naive = max_separated(c, m, eps, false);
      EXPECT_EQ(indexed, naive);
      const auto oracle = oracles::naive_max_separated(c, m, eps);
      EXPECT_EQ(indexed, oracle);
    }
  }
}

TEST(MaxSeparated, ResultIsSeparatedAndMaximal) {
  const System sys = make_doubling();
  const SampleCloud c = lattice_cloud(sys, 512, 5);
  const double eps = 0.0625;
  const int m = 4;
  const auto kept = max_separated(c, m, eps);
  for (std::size_t a = 0; a < kept.size(); ++a)
    for (std::size_t b = a + 1; b < kept.size(); ++b)
      EXPECT_GE(cloud_dyn_dist(c, kept[a], kept[b], m), eps);
  // Maximality: every cloud point is within eps of some kept point.
  for (std::size_t i = 0; i < c.count; ++i) {
    bool covered = false;
    for (std::uint32_t kq : kept)
      if (cloud_dyn_dist(c, i, kq, m) < eps) {
        covered = true;
        break;
      }
    EXPECT_TRUE(covered);
  }
}

TEST(MinSpanning, OneBallCoversWhenEpsExceedsDiameter) {
  const System sys = make_identity_cube(2);
  const SampleCloud c = lattice_cloud(sys, 9, 1);
  EXPECT_EQ(min_spanning(c, 1, 1.5), 1);
}

TEST(MinSpanning, DualityChainOnEveryRun) {
  struct Case {
    System sys;
    long res;
    std::vector<int> ms;
    std::vector<double> epss;
  };
  const std::vector<Case> cases = {
      {make_doubling(), 4096, {1, 3, 5}, {0.125, 0.0625}},
      {make_cat_map(), 48, {1, 2, 3}, {0.25, 0.125}},
      {make_identity_cube(2), 33, {1, 2}, {0.25, 0.125}},
  };
  for (const auto& cs : cases) {
    const SampleCloud c = lattice_cloud(cs.sys, cs.res, cs.ms.back());
    for (int m : cs.ms) {
      for (double eps : cs.epss) {
        const long s_eps = static_cast<long>(max_separated(c, m, eps).size());
        const long s_2eps = static_cast<long>(max_separated(c, m, 2 * eps).size());
        const long n_eps = min_spanning(c, m, eps);
        EXPECT_LE(s_2eps, n_eps);
        EXPECT_LE(n_eps, s_eps);
      }
    }
  }
}

TEST(MinSpanning, DoublingWithinFactorFourOfDyadicOracle) {
  const System sys = make_doubling();
  const SampleCloud c = lattice_cloud(sys, 32768, 8);
  const long n = min_spanning(c, 8, 0.03125);
  const long long oracle = oracles::doubling_dyadic_count(8, 5);  // 2^12
  EXPECT_GE(n, oracle / 4);
  EXPECT_LE(n, oracle * 4);
}

TEST(Monotonicity, CountsDecreaseInEps) {
  const System sys = make_doubling();
  const SampleCloud c = lattice_cloud(sys, 4096, 6);
  for (int m : {2, 5}) {
    long prev_s = -1, prev_n = -1;
    for (double eps : {0.03125, 0.0625, 0.125, 0.25}) {
      const long s = static_cast<long>(max_separated(c, m, eps).size());
      const long n = min_spanning(c, m, eps);
      if (prev_s >= 0) {
        EXPECT_LE(s, prev_s);
        EXPECT_LE(n, prev_n);
      }
      prev_s = s;
      prev_n = n;
    }
  }
}

TEST(SepRate, SymbolicHorseshoeSlopeExact) {
  std::vector<int> ms{1, 2, 3, 4, 5};
  std::vector<double> logs;
  for (int m : ms) logs.push_back(log_bigint(symbolic_count(16, m)));
  EXPECT_NEAR(sep_rate(ms, logs).slope, std::log(16.0), 1e-12);
}

TEST(SepRate, ConstantCountsAreDegenerate) {
  const SepFit fit = sep_rate({1, 2, 3}, {std::log(25.0), std::log(25.0), std::log(25.0)});
  EXPECT_TRUE(fit.degenerate);
  EXPECT_EQ(fit.slope, 0.0);
  EXPECT_THROW(sep_rate({1, 2}, {0.0, 0.0}), ScheduleError);
}

TEST(SepRate, DoublingGreedyWithinTenPercent) {
  const System sys = make_doubling();
  const SampleCloud c = lattice_cloud(sys, 16384, 8);
  std::vector<int> ms{4, 5, 6, 7, 8};
  std::vector<double> logs;
  for (int m : ms)
    logs.push_back(std::log(static_cast<double>(max_separated(c, m, 0.015625).size())));
  EXPECT_NEAR(sep_rate(ms, logs).slope, std::log(2.0), 0.1 * std::log(2.0));
}

TEST(SepRate, DoublingBracketsLogTwoAcrossScales) {
  const System sys = make_doubling();
  const SampleCloud c = lattice_cloud(sys, 32768, 8);
  const std::vector<int> ms{4, 5, 6, 7, 8};
  for (double eps : {0.0625, 0.03125, 0.0078125}) {  // 2^-4, 2^-5, 2^-7
    std::vector<double> logs;
    for (int m : ms)
      logs.push_back(std::log(static_cast<double>(max_separated(c, m, eps).size())));
    const double slope = sep_rate(ms, logs).slope;
    EXPECT_GE(slope, 0.9 * std::log(2.0));
    EXPECT_LE(slope, 1.1 * std::log(2.0));
  }
}

TEST(SepRate, SymbolicDoublingExactAndMonotone) {
  const System sys = make_doubling();
  const std::vector<int> ms{4, 5, 6, 7, 8};
  const auto slope_at = [&](double eps) {
    std::vector<double> logs;
    for (int m : ms) logs.push_back(log_bigint(symbolic_separated_count(sys, m, eps)));
    return sep_rate(ms, logs).slope;
  };
  EXPECT_NEAR(slope_at(0.0625), std::log(2.0), 1e-12);
  EXPECT_NEAR(slope_at(0.015625), std::log(2.0), 1e-12);
  EXPECT_GE(slope_at(0.015625), slope_at(0.0625) - 1e-12);
}

TEST(SepRate, MonotoneInEpsWithTolerance) {
  const System sys = make_doubling();
  const SampleCloud c = lattice_cloud(sys, 16384, 8);
  const std::vector<int> ms{4, 5, 6, 7, 8};
  const auto slope_at = [&](double eps) {
    std::vector<double> logs;
    for (int m : ms)
      logs.push_back(std::log(static_cast<double>(max_separated(c, m, eps).size())));
    return sep_rate(ms, logs).slope;
  };
  EXPECT_GE(slope_at(0.03125), slope_at(0.0625) - 0.05);
}

TEST(SymbolicCounts, BackendsAndErrors) {
  EXPECT_EQ(symbolic_separated_count(make_identity_cube(2), 7, 0.25), BigInt(25));
  EXPECT_EQ(symbolic_separated_count(make_rotation({0.1}), 3, 0.25), BigInt(4));
  EXPECT_EQ(symbolic_separated_count(make_doubling(), 8, 0.03125),
            BigInt(oracles::doubling_dyadic_count(8, 5)));
  const auto h = horseshoe(2);
  const System sys = make_horseshoe_system(h);
  EXPECT_EQ(symbolic_separated_count(sys, 3, to_double(h->params.eps())), BigInt(4096));
  EXPECT_THROW(symbolic_separated_count(sys, 3, 1.0), InvalidParams);
  EXPECT_THROW(symbolic_separated_count(make_cat_map(), 3, 0.25), InvalidParams);
  EXPECT_FALSE(has_symbolic_backend(make_cat_map()));
}

TEST(CatMap, GreedySlopeNearLogGoldenRatioSquared) {
  // Classical growth rate log((3 + sqrt 5) / 2) ~ 0.9624.
  const System sys = make_cat_map();
  const SampleCloud c = lattice_cloud(sys, 512, 5);
  std::vector<int> ms{1, 2, 3, 4, 5};
  std::vector<double> logs;
  for (int m : ms)
    logs.push_back(std::log(static_cast<double>(max_separated(c, m, 0.0625).size())));
  const double expected = std::log((3.0 + std::sqrt(5.0)) / 2.0);
  EXPECT_NEAR(sep_rate(ms, logs).slope, expected, 0.15 * expected);
}

TEST(Mdim, IdentityAndRotationNearZero) {
  const CloudSpec spec{CloudSpec::Kind::lattice, 65, 0, 1};
  const std::vector<double> epss{0.25, 0.125, 0.0625};
  const std::vector<int> ms{1, 2, 3};
  for (const System& sys : {make_identity_cube(2), make_rotation({0.318309, 0.1})}) {
    const MdimReport r = mdim_estimate(sys, epss, ms, spec, CountMode::greedy);
    EXPECT_LE(r.upper, 0.05);
    EXPECT_GE(r.lower, 0.0);
  }
}

TEST(Mdim, DoublingRatioShrinksWithEps) {
  const System sys = make_doubling();
  CloudSpec spec{CloudSpec::Kind::lattice, 262144, 0, 1};
  const std::vector<double> epss{std::pow(2.0, -9), std::pow(2.0, -11), std::pow(2.0, -13)};
  const std::vector<int> ms{2, 3, 4, 5};
  const MdimReport r = mdim_estimate(sys, epss, ms, spec, CountMode::greedy);
  EXPECT_LE(r.upper, 0.1);  // entropy-finite map: ratio log2 / (-log eps) -> 0
  for (const auto& row : r.rows) EXPECT_FALSE(row.suspect);
}

TEST(Mdim, ChainedFamilyMatchesClosedForm) {
  const int n = 2;
  const Rational delta(2, 5);
  std::vector<int> ks;
  for (int k = 1; k <= 64; ++k) ks.push_back(k);
  const MdimReport r = horseshoe_family_mdim_table(n, delta, ks);
  ASSERT_EQ(r.rows.size(), 64u);
  const double log2delta = std::log(2.0 * to_double(delta));
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const double eps = r.rows[i].eps;
    const double expected = n * (1.0 - log2delta / std::log(eps));
    EXPECT_NEAR(r.rows[i].ratio, expected, 1e-9);
    EXPECT_LE(r.rows[i].ratio, n + 0.001);
  }
  EXPECT_NEAR(r.rows.back().ratio, 2.0, 0.1 * 2.0);
  EXPECT_THROW(horseshoe_family_mdim_table(n, delta, {}), ScheduleError);
}

TEST(Mdim, ScheduleValidation) {
  const System sys = make_identity_cube(2);
  const CloudSpec spec;
  EXPECT_THROW(mdim_estimate(sys, {0.25, 0.5, 0.125}, {1, 2, 3}, spec, CountMode::greedy),
               ScheduleError);
  EXPECT_THROW(mdim_estimate(sys, {0.25, 0.125}, {1, 2, 3}, spec, CountMode::greedy),
               ScheduleError);
  EXPECT_THROW(mdim_estimate(sys, {0.5, 0.25, 0.125}, {1, 2}, spec, CountMode::greedy),
               ScheduleError);
}
