#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "boolmf/sweep.hpp"
#include "oracle.hpp"

using namespace boolmf;

namespace {

SweepSpec small_spec() {
  SweepSpec s;
  s.m = 8;
  s.n = 8;
  s.ranks = {2};
  s.rhos = {0.3};
  s.rho_tol = 0.05;
  s.modes = {Mode::BC, Mode::RLF, Mode::RLU};
  s.beta0s = {10.0, 1.0};
  s.beta_fs = {0.1};
  s.lambda0s = {1.0, 2.0};
  s.lambda_ps = {0.01};
  s.instances = 2;
  s.seeds = 3;
  s.max_mcs = 3000;
  s.threads = 2;
  s.master_seed = 5;
  return s;
}

std::string raw_csv(const SweepResult& r) {
  std::ostringstream os;
  write_raw_csv(os, r.raw);
  return os.str();
}

}  // namespace

TEST(SweepConfig, ParsesListsAndComments) {
  std::istringstream in(
      "# grid\nm = 20\nn=25\nk=4,6\nrho=0.1,0.5\nmode=bc,rl-u\nbeta0=10,2\nbetaf=0.01\n"
      "lambda0=2\nlambdap=0.01,0.1\ninstances=3\nseeds=4\ncensor=0.8\ntarget=best\nseed=9\n\n");
  const auto s = parse_sweep_config(in);
  EXPECT_EQ(s.m, 20U);
  EXPECT_EQ(s.n, 25U);
  EXPECT_EQ(s.ranks, (std::vector<std::size_t>{4, 6}));
  EXPECT_EQ(s.rhos, (std::vector<double>{0.1, 0.5}));
  EXPECT_EQ(s.modes, (std::vector<Mode>{Mode::BC, Mode::RLU}));
  EXPECT_EQ(s.lambda_ps.size(), 2U);
  EXPECT_EQ(s.censor_fraction, 0.8);
  EXPECT_EQ(s.target, Target::BestWithinBudget);
  EXPECT_EQ(s.master_seed, 9U);
}

TEST(SweepConfig, RejectsUnknownKeysAndBadValues) {
  std::istringstream a("temperature=3\n");
  EXPECT_THROW(parse_sweep_config(a), std::invalid_argument);
  std::istringstream b("k=four\n");
  EXPECT_THROW(parse_sweep_config(b), std::invalid_argument);
  std::istringstream c("just words\n");
  EXPECT_THROW(parse_sweep_config(c), std::invalid_argument);
  SweepSpec s;
  apply_sweep_setting(s, "censor", "0");
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = SweepSpec{};
  s.beta0s.clear();
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(Sweep, GridShapeCollapsesIrrelevantPenaltyDimensions) {
  const auto spec = small_spec();
  const auto r = sweep(spec);
  // BC: 2 schedules; RL-F: 2 schedules x 2 lambda0; RL-U: the same x 1 lambdap.
  EXPECT_EQ(r.points.size(), 2U + 4U + 4U);
  EXPECT_EQ(r.raw.size(), r.points.size() * 6);
  EXPECT_EQ(r.best.size(), 1U + 2U + 2U);
  for (const auto& row : r.raw) {
    EXPECT_EQ(row.lambda0.has_value(), row.mode != Mode::BC);
    EXPECT_EQ(row.lambda_p.has_value(), row.mode == Mode::RLU);
  }
}

TEST(Sweep, ModesShareInstancesAndSeeds) {
  const auto r = sweep(small_spec());
  std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> seeds;
  for (const auto& row : r.raw) {
    auto [it, inserted] = seeds.try_emplace({row.instance, row.seed_index}, row.run_seed);
    EXPECT_EQ(it->second, row.run_seed);
  }
  EXPECT_EQ(seeds.size(), 6U);
}

TEST(Sweep, DeterministicAcrossThreadCounts) {
  auto spec = small_spec();
  const auto a = raw_csv(sweep(spec));
  spec.threads = 1;
  EXPECT_EQ(a, raw_csv(sweep(spec)));
}

TEST(Sweep, SummaryIsRecomputableFromRaw) {
  const auto spec = small_spec();
  auto r = sweep(spec);
  for (std::size_t p = 0; p < r.points.size(); ++p) {
    const auto& s = r.points[p];
    std::vector<double> v;
    std::size_t solved = 0;
    for (const auto& row : r.raw) {
      if (row.mode == s.mode && row.beta0 == s.beta0 && row.lambda0 == s.lambda0) {
        v.push_back(row.mcs0 ? static_cast<double>(*row.mcs0) : std::numeric_limits<double>::infinity());
        solved += row.mcs0.has_value();
      }
    }
    ASSERT_EQ(v.size(), s.runs);
    EXPECT_EQ(s.stats.median, oracle::median(v));
    EXPECT_EQ(s.solve_rate, static_cast<double>(solved) / static_cast<double>(v.size()));
  }
  std::ostringstream before, after;
  write_summary_csv(before, r.best);
  summarize(spec, r);
  write_summary_csv(after, r.best);
  EXPECT_EQ(before.str(), after.str());
}

TEST(Sweep, BestHasTheSmallestMedianPerGroup) {
  const auto r = sweep(small_spec());
  for (const auto& b : r.best) {
    for (const auto& p : r.points) {
      if (p.mode == b.mode && p.lambda0 == b.lambda0 && p.lambda_p == b.lambda_p) {
        EXPECT_LE(b.stats.median, p.stats.median);
      }
    }
  }
}

TEST(Sweep, CensoringKeepsTheFastestRuns) {
  SweepResult r;
  for (std::size_t i = 0; i < 5; ++i) {
    RawRow row;
    row.seed_index = i;
    if (i < 4) row.mcs0 = 10 * (i + 1);
    r.raw.push_back(row);
  }
  SweepSpec spec;
  spec.censor_fraction = 0.8;
  summarize(spec, r);
  ASSERT_EQ(r.points.size(), 1U);
  EXPECT_EQ(r.points[0].kept, 4U);
  EXPECT_EQ(r.points[0].stats.median, 25.0);
  EXPECT_TRUE(r.points[0].censored);
  EXPECT_EQ(r.points[0].solve_rate, 0.8);
  spec.censor_fraction.reset();
  summarize(spec, r);
  EXPECT_EQ(r.points[0].stats.median, 30.0);
}

TEST(Sweep, BestWithinBudgetUsesMcs1) {
  RawRow row;
  row.mcs1 = 17;
  EXPECT_EQ(row.metric(Target::BestWithinBudget), 17.0);
  EXPECT_TRUE(std::isinf(row.metric(Target::ExactZero)));
  row.mcs0 = 12;
  EXPECT_EQ(row.metric(Target::ExactZero), 12.0);
}
