#include <gtest/gtest.h>

#include <sstream>

#include "boolmf/energy.hpp"
#include "oracle.hpp"

using namespace boolmf;

TEST(RlCell, Examples) {
  EXPECT_DOUBLE_EQ(rl_cell(0, 3, 2.0), 6.0);
  EXPECT_DOUBLE_EQ(rl_cell(1, 0, 2.0), 2.0);
  EXPECT_DOUBLE_EQ(rl_cell(1, 2, 2.0), 0.0);
  EXPECT_THROW(rl_cell(0, -1, 1.0), std::invalid_argument);
  EXPECT_THROW(rl_cell(2, 0, 1.0), std::invalid_argument);
}

TEST(RlCell, ZeroExactlyWhenLogicalMatchesAndMonotone) {
  for (int k = 1; k <= 12; ++k) {
    for (int vhat = 0; vhat <= k; ++vhat) {
      for (int v = 0; v <= 1; ++v) {
        EXPECT_EQ(rl_cell(v, vhat, 0.7) == 0.0, (vhat > 0 ? 1 : 0) == v);
      }
      if (vhat > 0) {
        EXPECT_GT(rl_cell(0, vhat, 1.0), rl_cell(0, vhat - 1, 1.0));
        EXPECT_LE(rl_cell(1, vhat, 1.0), rl_cell(1, vhat - 1, 1.0));
        EXPECT_EQ(rl_cell(1, vhat, 1.0), 0.0);
      }
    }
  }
}

TEST(BcEnergy, CountsMismatches) {
  const auto v = BinaryMatrix::from_rows({{1, 0}, {0, 1}});
  IntMatrix c(2, 2);
  c(0, 0) = 1;
  c(0, 1) = 1;
  c(1, 1) = 1;
  EXPECT_EQ(bc_energy(v, c), 1);
  c(0, 1) = 0;
  EXPECT_EQ(bc_energy(v, c), 0);
  EXPECT_THROW(bc_energy(v, IntMatrix(2, 3)), std::invalid_argument);
}

TEST(Energies, MatchOracleOnRandomStates) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lam(0.1, 5.0);
  for (int trial = 0; trial < 300; ++trial) {
    auto v = oracle::random_matrix(rng, 8, 8);
    if (trial % 2) v.set_missing(trial % 8, (trial / 8) % 8);
    const auto f = oracle::random_factors(rng, 8, 8, 3, 0.4);
    const auto c = integer_product(f);
    const PenaltyField p(8, 8, lam(rng));
    const auto ref = oracle::counts(f);
    ASSERT_EQ(bc_energy(v, c), oracle::bc(v, ref));
    ASSERT_DOUBLE_EQ(rl_energy(v, c, p), oracle::rl(v, ref, p));
  }
}

TEST(Energies, MaskedMismatchContributesNothing) {
  auto v = BinaryMatrix::from_rows({{1, 0}});
  IntMatrix c(1, 2);
  c(0, 1) = 3;  // (0,1) and (0,0) both wrong
  const PenaltyField p(1, 2, 1.0);
  EXPECT_EQ(bc_energy(v, c), 2);
  v.set_missing(0, 1);
  EXPECT_EQ(bc_energy(v, c), 1);
  EXPECT_DOUBLE_EQ(rl_energy(v, c, p), 1.0);
}

TEST(PenaltyField, GrowthAndValidation) {
  PenaltyField p(2, 2, 2.0, 0.5);
  p.grow(0, 1, 100.0);
  EXPECT_DOUBLE_EQ(p(0, 1), 3.0);
  EXPECT_DOUBLE_EQ(p.max(), 3.0);
  for (int i = 0; i < 20; ++i) p.grow(0, 1, 100.0);
  EXPECT_DOUBLE_EQ(p(0, 1), 100.0);
  EXPECT_THROW(PenaltyField(1, 1, 0.0), std::invalid_argument);
  EXPECT_THROW(PenaltyField(1, 1, 1.0, -0.1), std::invalid_argument);
}

namespace {

void expect_consistent(const FactorState& s) {
  const auto ref = oracle::counts(s.factors());
  for (std::size_t i = 0; i < s.counts().rows(); ++i) {
    for (std::size_t j = 0; j < s.counts().cols(); ++j) ASSERT_EQ(s.counts()(i, j), ref[i][j]);
  }
  ASSERT_EQ(s.mismatches(), oracle::bc(s.target(), ref));
  const double e = s.cost() == CostKind::Binary ? static_cast<double>(oracle::bc(s.target(), ref))
                                                 : oracle::rl(s.target(), ref, s.penalty());
  ASSERT_NEAR(s.energy(), e, 1e-9);
}

}  // namespace

TEST(FactorState, DeltaMatchesRecomputeForBothCosts) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t m = 3 + trial % 9;
    const std::size_t n = 70 - trial % 5;  // crosses a word boundary
    const std::size_t k = 1 + trial % 4;
    auto v = oracle::random_matrix(rng, m, n, 0.4);
    if (trial % 3 == 0) v.set_missing(0, 0);
    const CostKind cost = trial % 2 ? CostKind::Binary : CostKind::RectifiedLinear;
    FactorState s(v, oracle::random_factors(rng, m, n, k, 0.3), cost, PenaltyField(m, n, 1.5, 0.25));
    for (int step = 0; step < 200; ++step) {
      if (step % 50 == 25) s.grow_violated_penalties(1e12);
      const FlipSite site = s.site(std::uniform_int_distribution<std::size_t>(0, s.spin_count() - 1)(rng));
      const double before = s.energy();
      const auto d = s.flip_delta(site);
      s.apply(d);
      ASSERT_NEAR(s.energy() - before, d.energy, 1e-9);
      expect_consistent(s);
    }
  }
}

TEST(FactorState, FlipTwiceRestores) {
  std::mt19937_64 rng(13);
  const auto v = oracle::random_matrix(rng, 9, 9);
  FactorState s(v, oracle::random_factors(rng, 9, 9, 3), CostKind::RectifiedLinear, PenaltyField(9, 9, 2.0));
  const auto counts = s.counts();
  const double e = s.energy();
  const FlipSite site{FactorSide::H, 1, 4};
  const auto d1 = s.flip_delta(site);
  s.apply(d1);
  const auto d2 = s.flip_delta(site);
  s.apply(d2);
  EXPECT_EQ(d1.energy + d2.energy, 0.0);
  EXPECT_EQ(d1.sign, -d2.sign);
  EXPECT_EQ(s.counts(), counts);
  EXPECT_DOUBLE_EQ(s.energy(), e);
}

TEST(FactorState, FlipAgainstEmptyPartnerIsFree) {
  std::mt19937_64 rng(14);
  const auto v = oracle::random_matrix(rng, 5, 6);
  FactorPair f = oracle::random_factors(rng, 5, 6, 2);
  for (std::size_t j = 0; j < 6; ++j) f.h().set(1, j, false);
  FactorState s(v, f, CostKind::Binary, PenaltyField(5, 6, 1.0));
  const auto d = s.flip_delta({FactorSide::W, 3, 1});
  EXPECT_EQ(d.energy, 0.0);
  EXPECT_TRUE(s.affected_cells({FactorSide::W, 3, 1}).empty());
}

TEST(FactorState, AffectedCellsAreTheCountDifference) {
  std::mt19937_64 rng(15);
  const auto v = oracle::random_matrix(rng, 6, 7);
  FactorState s(v, oracle::random_factors(rng, 6, 7, 3), CostKind::Binary, PenaltyField(6, 7, 1.0));
  for (std::size_t spin = 0; spin < s.spin_count(); ++spin) {
    const FlipSite site = s.site(spin);
    const auto before = s.counts();
    const auto cells = s.affected_cells(site);
    s.flip(site);
    std::size_t changed = 0;
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < 7; ++j) changed += s.counts()(i, j) != before(i, j);
    }
    ASSERT_EQ(changed, cells.size());
    for (const auto& c : cells) ASSERT_EQ(s.counts()(c.i, c.j) - before(c.i, c.j), c.delta);
  }
}

TEST(FactorState, SiteIndexingAndErrors) {
  FactorState s(BinaryMatrix(4, 5), FactorPair::zeros(4, 5, 2), CostKind::Binary, PenaltyField(4, 5, 1.0));
  EXPECT_EQ(s.spin_count(), 4U * 2 + 2 * 5);
  EXPECT_EQ(s.site(0), (FlipSite{FactorSide::W, 0, 0}));
  EXPECT_EQ(s.site(3), (FlipSite{FactorSide::W, 1, 1}));
  EXPECT_EQ(s.site(8), (FlipSite{FactorSide::H, 0, 0}));
  EXPECT_EQ(s.site(17), (FlipSite{FactorSide::H, 1, 4}));
  EXPECT_THROW(s.site(18), std::out_of_range);
  EXPECT_THROW(s.flip_delta({FactorSide::H, 2, 0}), std::out_of_range);
  const auto d = s.flip_delta({FactorSide::W, 0, 0});
  s.apply(d);
  EXPECT_THROW(s.apply(d), std::logic_error);
  EXPECT_THROW(FactorState(BinaryMatrix(4, 4), FactorPair::zeros(4, 5, 2), CostKind::Binary,
                           PenaltyField(4, 4, 1.0)),
               std::invalid_argument);
}

TEST(FactorState, GrowthTouchesOnlyViolatedObservedCells) {
  auto v = BinaryMatrix::from_rows({{1, 0}, {0, 0}});
  v.set_missing(1, 1);
  FactorPair f(BinaryMatrix::from_rows({{0}, {1}}), BinaryMatrix::from_rows({{1, 1}}));
  // counts: [[0,0],[1,1]]; violated: (0,0) and (1,0); (1,1) is missing
  FactorState s(v, f, CostKind::RectifiedLinear, PenaltyField(2, 2, 1.0, 1.0));
  EXPECT_DOUBLE_EQ(s.energy(), 2.0);
  EXPECT_EQ(s.grow_violated_penalties(1e12), 2U);
  EXPECT_DOUBLE_EQ(s.penalty()(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(s.penalty()(1, 0), 2.0);
  EXPECT_DOUBLE_EQ(s.penalty()(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(s.penalty()(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(s.energy(), 4.0);
}

TEST(Landscape, AtSolutionAndOneFlipAway) {
  std::mt19937_64 rng(16);
  const auto f = oracle::random_factors(rng, 12, 12, 3, 0.3);
  const auto v = bool_product(f);
  const std::vector<std::size_t> ds{0, 1, 72};
  const auto rows = landscape_probe(f, v, ds, 40, 99);
  ASSERT_EQ(rows.size(), 120U);
  for (const auto& r : rows) {
    if (r.distance == 0) {
      EXPECT_EQ(r.bc_energy, 0);
      EXPECT_EQ(r.rl_energy, 0.0);
    }
    EXPECT_EQ(r.bc_energy > 0, r.rl_energy > 0.0);
  }
  const auto again = landscape_probe(f, v, ds, 40, 99);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    EXPECT_EQ(rows[r].bc_energy, again[r].bc_energy);
    EXPECT_EQ(rows[r].rl_energy, again[r].rl_energy);
  }
  const std::vector<std::size_t> too_far{73};
  EXPECT_THROW(landscape_probe(f, v, too_far, 1, 0), std::invalid_argument);
}

TEST(Landscape, CsvHeader) {
  std::ostringstream os;
  const std::vector<LandscapeRow> rows{{3, 2, 4.5, 1}};
  write_landscape_csv(os, rows);
  EXPECT_EQ(os.str(), "distance,bc_energy,rl_energy,sample_index\n3,2,4.5,1\n");
}
