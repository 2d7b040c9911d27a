#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "boolmf/energy.hpp"
#include "boolmf/instgen.hpp"

using namespace boolmf;

TEST(BernoulliRate, ClosedForm) {
  EXPECT_NEAR(bernoulli_rate_for(0.25, 1), 0.5, 1e-15);
  EXPECT_NEAR(bernoulli_rate_for(0.1, 8), std::sqrt(1.0 - std::pow(0.9, 1.0 / 8.0)), 1e-15);
  EXPECT_NEAR(bernoulli_rate_for(0.1, 8), 0.11438, 5e-6);
  EXPECT_NEAR(bernoulli_rate_for(0.8, 12), std::sqrt(1.0 - std::pow(0.2, 1.0 / 12.0)), 1e-15);
  EXPECT_LT(bernoulli_rate_for(1e-9, 4), 1e-4);
  EXPECT_THROW(bernoulli_rate_for(0.0, 3), std::invalid_argument);
  EXPECT_THROW(bernoulli_rate_for(0.5, 0), std::invalid_argument);
}

TEST(BernoulliRate, ProducesTargetDensityOnAverage) {
  // Draw W, H at rate p with no acceptance window and average the density.
  for (auto [rho, k] : {std::pair{0.1, std::size_t{8}}, std::pair{0.8, std::size_t{12}}}) {
    const double p = bernoulli_rate_for(rho, k);
    std::mt19937_64 rng(31);
    std::bernoulli_distribution bit(p);
    double sum = 0.0;
    const int draws = 1000;
    for (int d = 0; d < draws; ++d) {
      FactorPair f = FactorPair::zeros(30, 30, k);
      for (std::size_t i = 0; i < 30; ++i) {
        for (std::size_t t = 0; t < k; ++t) f.w().set(i, t, bit(rng));
      }
      for (std::size_t t = 0; t < k; ++t) {
        for (std::size_t j = 0; j < 30; ++j) f.h().set(t, j, bit(rng));
      }
      sum += bool_product(f).density();
    }
    EXPECT_NEAR(sum / draws, rho, 0.01) << rho;
  }
}

TEST(Generate, WindowExactnessAndDeterminism) {
  for (double rho : {0.1, 0.5, 0.8}) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      GeneratorConfig g;
      g.rho = rho;
      g.seed = seed;
      const auto inst = generate(g);
      ASSERT_EQ(bool_product(inst.planted), inst.true_v);
      ASSERT_GE(inst.true_v.density(), rho - 0.01 - 1e-12);
      ASSERT_LE(inst.true_v.density(), rho + 0.01 + 1e-12);
      ASSERT_FALSE(inst.v.has_mask());
      ASSERT_EQ(bc_energy(inst.v, integer_product(inst.planted)), 0);
    }
  }
  GeneratorConfig g;
  g.seed = 5;
  const auto a = generate(g);
  const auto b = generate(g);
  EXPECT_EQ(a.v, b.v);
  EXPECT_EQ(a.planted, b.planted);
}

TEST(Generate, InfeasibleWindowReportsParameters) {
  GeneratorConfig g;
  g.m = 2;
  g.n = 2;
  g.rank = 1;
  g.rho = 0.4;  // densities on 2x2 are multiples of 0.25
  g.rho_tol = 0.0;
  g.max_resamples = 50;
  try {
    generate(g);
    FAIL() << "expected GenerationError";
  } catch (const GenerationError& e) {
    EXPECT_NE(std::string(e.what()).find("0.4"), std::string::npos);
  }
}

TEST(Generate, ConfigValidation) {
  GeneratorConfig g;
  g.rho = 1.0;
  EXPECT_THROW(generate(g), std::invalid_argument);
  g = GeneratorConfig{};
  g.miss_ratio = 1.0;
  EXPECT_THROW(generate(g), std::invalid_argument);
  g = GeneratorConfig{};
  g.rank = 0;
  EXPECT_THROW(generate(g), std::invalid_argument);
}

TEST(ApplyMask, ExactCountAndReproducible) {
  GeneratorConfig g;
  g.seed = 2;
  const auto v = generate(g).true_v;
  EXPECT_EQ(apply_mask(v, 0.0, 1), v);
  const auto a = apply_mask(v, 0.1, 9);
  EXPECT_EQ(a.missing_count(), 90U);
  EXPECT_EQ(a, apply_mask(v, 0.1, 9));
  EXPECT_NE(a.mask().size(), 0U);
  EXPECT_NE(std::vector<std::uint8_t>(a.mask().begin(), a.mask().end()),
            std::vector<std::uint8_t>(apply_mask(v, 0.1, 10).mask().begin(), apply_mask(v, 0.1, 10).mask().end()));
  // round half up: 0.5 * 3 cells = 1.5 -> 2
  EXPECT_EQ(apply_mask(BinaryMatrix(1, 3), 0.5, 0).missing_count(), 2U);
  EXPECT_THROW(apply_mask(a, 0.1, 0), std::invalid_argument);
  EXPECT_THROW(apply_mask(v, -0.1, 0), std::invalid_argument);
}

TEST(Instance, SaveLoadRoundTrip) {
  GeneratorConfig g;
  g.m = 12;
  g.n = 9;
  g.rank = 3;
  g.rho = 0.4;
  g.rho_tol = 0.05;
  g.miss_ratio = 0.1;
  g.seed = 77;
  const auto inst = generate(g);
  EXPECT_EQ(inst.v.missing_count(), 11U);  // round(10.8)
  const auto dir = std::filesystem::temp_directory_path() / "boolmf_instgen_test";
  std::filesystem::create_directories(dir);
  save_instance(dir / "a", inst, g);
  const auto back = load_instance(dir / "a");
  EXPECT_EQ(back.v, inst.v);
  EXPECT_EQ(back.true_v, inst.true_v);
  EXPECT_EQ(back.planted, inst.planted);
  std::filesystem::remove_all(dir);
}
