#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "boolmf/stats.hpp"
#include "oracle.hpp"

using namespace boolmf;

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
}

TEST(MedianIqr, SmallCases) {
  const std::vector<double> one{5.0};
  const auto a = median_iqr(one);
  EXPECT_EQ(a.median, 5.0);
  EXPECT_EQ(a.q1, 5.0);
  EXPECT_EQ(a.q3, 5.0);
  const std::vector<double> four{4.0, 1.0, 3.0, 2.0};
  const auto b = median_iqr(four);
  EXPECT_EQ(b.median, 2.5);
  EXPECT_EQ(b.q1, 1.75);
  EXPECT_EQ(b.q3, 3.25);
  EXPECT_THROW(median_iqr(std::vector<double>{}), std::invalid_argument);
}

TEST(MedianIqr, InfinityStaysOnTop) {
  const std::vector<double> v{1.0, inf, 2.0, inf, 3.0};
  const auto q = median_iqr(v);
  EXPECT_EQ(q.median, 3.0);
  EXPECT_EQ(q.q1, 2.0);
  EXPECT_EQ(q.q3, inf);
  const std::vector<double> all{inf, inf};
  EXPECT_EQ(median_iqr(all).median, inf);
}

TEST(MedianIqr, MatchesSortOracle) {
  std::mt19937_64 rng(61);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> v(1 + rng() % 40);
    for (auto& x : v) x = static_cast<double>(rng() % 1000);
    const auto q = median_iqr(v);
    ASSERT_DOUBLE_EQ(q.median, oracle::median(v));
    ASSERT_DOUBLE_EQ(q.q1, oracle::quantile7(v, 0.25));
    ASSERT_DOUBLE_EQ(q.q3, oracle::quantile7(v, 0.75));
  }
}

TEST(Censor, KeepsSmallestRoundedFraction) {
  const std::vector<double> v{5.0, 1.0, 4.0, 2.0, 3.0};
  EXPECT_EQ(censor_smallest(v, 0.8), (std::vector<double>{1, 2, 3, 4}));
  EXPECT_EQ(censor_smallest(v, 0.01), (std::vector<double>{1}));
  EXPECT_EQ(censor_smallest(v, 1.0).size(), 5U);
  EXPECT_EQ(censor_smallest(std::vector<double>{2, 1}, 0.25), (std::vector<double>{1}));  // 0.5 rounds up
  EXPECT_THROW(censor_smallest(v, 0.0), std::invalid_argument);
  EXPECT_THROW(censor_smallest(v, 1.1), std::invalid_argument);
}

TEST(Spearman, RanksAndTies) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> sq{1, 4, 9, 16, 25};
  const std::vector<double> rev{5, 4, 3, 2, 1};
  EXPECT_DOUBLE_EQ(spearman(x, sq), 1.0);
  EXPECT_DOUBLE_EQ(spearman(x, rev), -1.0);
  EXPECT_EQ(spearman(x, std::vector<double>{3, 3, 3, 3, 3}), 0.0);
  // Ties get average ranks; Pearson on (1,2,3,4,5) vs (1.5,1.5,3,4,5).
  const double r = spearman(x, std::vector<double>{1, 1, 2, 3, 4});
  EXPECT_NEAR(r, 9.5 / std::sqrt(10.0 * 9.5), 1e-12);
  EXPECT_THROW(spearman(x, std::vector<double>{1, 2}), std::invalid_argument);
}
