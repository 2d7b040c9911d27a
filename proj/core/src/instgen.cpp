#include "boolmf/instgen.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <utility>
#include <vector>

#include "boolmf/random.hpp"

namespace boolmf {

void GeneratorConfig::validate() const {
  if (m < 1 || n < 1) throw std::invalid_argument("GeneratorConfig: M and N must be positive");
  if (rank < 1) throw std::invalid_argument("GeneratorConfig: K must be positive");
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("GeneratorConfig: rho must lie in (0, 1)");
  if (!(rho_tol >= 0.0)) throw std::invalid_argument("GeneratorConfig: rho tolerance must be nonnegative");
  if (!(miss_ratio >= 0.0 && miss_ratio < 1.0)) {
    throw std::invalid_argument("GeneratorConfig: miss ratio must lie in [0, 1)");
  }
  if (max_resamples < 1) throw std::invalid_argument("GeneratorConfig: max_resamples must be positive");
}

double bernoulli_rate_for(double rho, std::size_t rank) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("bernoulli_rate_for: rho must lie in (0, 1)");
  if (rank < 1) throw std::invalid_argument("bernoulli_rate_for: K must be positive");
  // 1 − (1 − ρ)^(1/K) via expm1/log1p keeps precision for small ρ.
  const double q = -std::expm1(std::log1p(-rho) / static_cast<double>(rank));
  return std::sqrt(q);
}

PlantedInstance generate(const GeneratorConfig& config) {
  config.validate();
  const double p = bernoulli_rate_for(config.rho, config.rank);
  Rng rng(derive_seed(config.seed, {0}));
  std::bernoulli_distribution bit(p);
  const double total = static_cast<double>(config.m * config.n);

  for (std::uint64_t attempt = 0; attempt < config.max_resamples; ++attempt) {
    FactorPair f = FactorPair::zeros(config.m, config.n, config.rank);
    for (std::size_t i = 0; i < config.m; ++i) {
      for (std::size_t k = 0; k < config.rank; ++k) f.w().set(i, k, bit(rng));
    }
    for (std::size_t k = 0; k < config.rank; ++k) {
      for (std::size_t j = 0; j < config.n; ++j) f.h().set(k, j, bit(rng));
    }
    BinaryMatrix v = bool_product(f);
    const double density = static_cast<double>(v.ones_observed()) / total;
    if (std::abs(density - config.rho) > config.rho_tol) continue;

    PlantedInstance inst;
    inst.true_v = v;
    inst.v = config.miss_ratio > 0.0 ? apply_mask(v, config.miss_ratio, derive_seed(config.seed, {1})) : v;
    inst.planted = std::move(f);
    return inst;
  }
  std::ostringstream msg;
  msg << "generate: no instance with density " << config.rho << " +/- " << config.rho_tol << " for (M, N, K) = ("
      << config.m << ", " << config.n << ", " << config.rank << ") after " << config.max_resamples << " resamples";
  throw GenerationError(msg.str());
}

BinaryMatrix apply_mask(const BinaryMatrix& v, double miss_ratio, std::uint64_t seed) {
  if (!(miss_ratio >= 0.0 && miss_ratio < 1.0)) throw std::invalid_argument("apply_mask: miss ratio must lie in [0, 1)");
  if (v.has_mask()) throw std::invalid_argument("apply_mask: input is already masked");
  const std::size_t cells = v.size();
  // Round half up.
  const auto count = static_cast<std::size_t>(std::floor(miss_ratio * static_cast<double>(cells) + 0.5));
  BinaryMatrix out = v;
  if (count == 0) return out;

  std::vector<std::size_t> order(cells);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t t = 0; t < count; ++t) {
    std::uniform_int_distribution<std::size_t> pick(t, cells - 1);
    std::swap(order[t], order[pick(rng)]);
  }
  std::vector<std::uint8_t> mask(cells, 1);
  for (std::size_t t = 0; t < count; ++t) mask[order[t]] = 0;
  out.set_mask(std::move(mask));
  return out;
}

namespace {

std::filesystem::path with_suffix(const std::filesystem::path& stem, const char* suffix) {
  return std::filesystem::path(stem.string() + suffix);
}

}  // namespace

void save_instance(const std::filesystem::path& stem, const PlantedInstance& inst, const GeneratorConfig& config) {
  save_matrix(with_suffix(stem, ".txt"), inst.v);
  save_matrix(with_suffix(stem, ".truth.txt"), inst.true_v);
  save_matrix(with_suffix(stem, ".w.txt"), inst.planted.w());
  save_matrix(with_suffix(stem, ".h.txt"), inst.planted.h());
  std::ofstream meta(with_suffix(stem, ".meta"));
  if (!meta) throw std::runtime_error("cannot write " + with_suffix(stem, ".meta").string());
  meta.precision(17);
  meta << "M=" << config.m << "\nN=" << config.n << "\nK=" << config.rank << "\nrho=" << config.rho
       << "\nseed=" << config.seed << "\nmiss=" << config.miss_ratio << "\nmiss_count=" << inst.v.missing_count()
       << "\ndensity=" << inst.true_v.density() << '\n';
}

PlantedInstance load_instance(const std::filesystem::path& stem) {
  PlantedInstance inst;
  inst.v = load_matrix(with_suffix(stem, ".txt"));
  inst.true_v = load_matrix(with_suffix(stem, ".truth.txt"));
  inst.planted = FactorPair(load_matrix(with_suffix(stem, ".w.txt")), load_matrix(with_suffix(stem, ".h.txt")));
  if (inst.v.rows() != inst.true_v.rows() || inst.v.cols() != inst.true_v.cols()) {
    throw std::runtime_error("load_instance: masked and true matrices differ in shape");
  }
  return inst;
}

}  // namespace boolmf
