#include <gtest/gtest.h>

#include <sstream>

#include "boolmf/binmat.hpp"
#include "oracle.hpp"

using namespace boolmf;

TEST(BinaryMatrix, RejectsNonBinaryEntries) {
  EXPECT_THROW(BinaryMatrix(1, 2, {0, 2}), std::invalid_argument);
  EXPECT_THROW(BinaryMatrix(2, 2, {0, 1, 1}), std::invalid_argument);
  EXPECT_THROW(BinaryMatrix::from_rows({{1, 0}, {1}}), std::invalid_argument);
}

TEST(BinaryMatrix, DensityCountsObservedOnly) {
  BinaryMatrix a = BinaryMatrix::from_rows({{1, 1}, {0, 0}});
  EXPECT_DOUBLE_EQ(a.density(), 0.5);
  a.set_missing(1, 0);
  a.set_missing(1, 1);
  EXPECT_EQ(a.observed_count(), 2U);
  EXPECT_DOUBLE_EQ(a.density(), 1.0);
  EXPECT_THROW(a.at(2, 0), std::out_of_range);
}

TEST(BinaryMatrix, MaskShapeMustMatch) {
  BinaryMatrix a(2, 2);
  EXPECT_THROW(a.set_mask({1, 1, 1}), std::invalid_argument);
}

TEST(BoolProduct, IdentityLikeFactors) {
  FactorPair f(BinaryMatrix::from_rows({{1, 0}, {0, 1}}), BinaryMatrix::from_rows({{1, 1}, {0, 1}}));
  EXPECT_EQ(bool_product(f), BinaryMatrix::from_rows({{1, 1}, {0, 1}}));
}

TEST(BoolProduct, ZeroFactorAnnihilates) {
  std::mt19937_64 rng(1);
  FactorPair f(BinaryMatrix(3, 2), oracle::random_matrix(rng, 2, 3));
  EXPECT_EQ(bool_product(f), BinaryMatrix(3, 3));
}

TEST(IntegerProduct, BothTermsContribute) {
  FactorPair f(BinaryMatrix::from_rows({{1, 1}}), BinaryMatrix::from_rows({{1}, {1}}));
  EXPECT_EQ(integer_product(f)(0, 0), 2);
}

TEST(IntegerProduct, MatchesTripleLoopAndBoolProduct) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const auto f = oracle::random_factors(rng, 6, 6, 4);
    const auto c = integer_product(f);
    const auto ref = oracle::counts(f);
    const auto b = bool_product(f);
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < 6; ++j) {
        ASSERT_EQ(c(i, j), ref[i][j]);
        ASSERT_LE(c(i, j), 4);
        ASSERT_EQ(b(i, j), ref[i][j] > 0 ? 1 : 0);
      }
    }
    ASSERT_EQ(logical(c), b);
  }
}

TEST(FactorPair, ShapeChecks) {
  EXPECT_THROW(FactorPair(BinaryMatrix(3, 2), BinaryMatrix(3, 3)), std::invalid_argument);
  EXPECT_THROW(FactorPair(BinaryMatrix(3, 0), BinaryMatrix(0, 3)), std::invalid_argument);
  BinaryMatrix masked(3, 2);
  masked.set_missing(0, 0);
  EXPECT_THROW(FactorPair(masked, BinaryMatrix(2, 3)), std::invalid_argument);
}

TEST(Hamming, SmallCases) {
  const auto d = hamming_rows(BinaryMatrix::from_rows({{1, 0, 1}, {1, 1, 1}, {1, 0, 1}}));
  EXPECT_EQ(d(0, 1), 1);
  EXPECT_EQ(d(0, 2), 0);
  EXPECT_EQ(d(1, 1), 0);
}

TEST(Hamming, MatchesXorRecountAndIsAMetric) {
  std::mt19937_64 rng(3);
  const auto a = oracle::random_matrix(rng, 10, 8);
  const auto d = hamming_rows(a);
  for (std::size_t u = 0; u < 10; ++u) {
    for (std::size_t v = 0; v < 10; ++v) {
      int x = 0;
      for (std::size_t j = 0; j < 8; ++j) x += a(u, j) ^ a(v, j);
      ASSERT_EQ(d(u, v), x);
      ASSERT_EQ(d(u, v), d(v, u));
      for (std::size_t w = 0; w < 10; ++w) ASSERT_LE(d(u, w), d(u, v) + d(v, w));
    }
  }
}

TEST(Hamming, RejectsMissingEntries) {
  BinaryMatrix a(2, 2);
  a.set_missing(0, 1);
  EXPECT_THROW(hamming_rows(a), std::invalid_argument);
}

TEST(SwapSymmetry, ProductInvariantForAllPairs) {
  std::mt19937_64 rng(4);
  const auto f = oracle::random_factors(rng, 7, 9, 4);
  EXPECT_EQ(swap_symmetry(f, 2, 2), f);
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = a + 1; b < 4; ++b) {
      const auto g = swap_symmetry(f, a, b);
      EXPECT_EQ(bool_product(g), bool_product(f));
      EXPECT_EQ(g.w()(0, a), f.w()(0, b));
    }
  }
  EXPECT_THROW(swap_symmetry(f, 0, 4), std::out_of_range);
}

TEST(MatrixIo, RoundTripsWithMask) {
  std::mt19937_64 rng(5);
  auto a = oracle::random_matrix(rng, 4, 7);
  a.set_missing(1, 3);
  a.set_missing(3, 0);
  std::stringstream ss;
  write_matrix(ss, a);
  EXPECT_EQ(read_matrix(ss), a);
}

TEST(MatrixIo, FormatIsHeaderThenRows) {
  std::stringstream ss("2 3\n10?\n011\n");
  const auto a = read_matrix(ss);
  EXPECT_EQ(a.rows(), 2U);
  EXPECT_FALSE(a.observed(0, 2));
  EXPECT_EQ(a(1, 2), 1);
}

TEST(MatrixIo, MalformedInputsRejected) {
  for (const char* text : {"", "2\n", "2 2\n10\n", "2 2\n10\n1x\n", "1 2\n101\n", "1 2\n10\n11\n"}) {
    std::stringstream ss(text);
    EXPECT_THROW(read_matrix(ss), std::runtime_error) << text;
  }
  EXPECT_THROW(load_matrix("/nonexistent/file.txt"), std::runtime_error);
}
