#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "boolmf/binmat.hpp"

namespace boolmf {

struct GeneratorConfig {
  std::size_t m = 30;
  std::size_t n = 30;
  std::size_t rank = 8;
  double rho = 0.1;
  double rho_tol = 0.01;
  double miss_ratio = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t max_resamples = 100000;

  void validate() const;
};

struct PlantedInstance {
  BinaryMatrix v;       // what the solver sees; masked when miss_ratio > 0
  FactorPair planted;
  BinaryMatrix true_v;  // bool_product(planted), never masked
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Entry probability p with 1 − (1 − p²)^K = ρ, i.e. the rate at which an OR
/// of K independent AND-pairs of Bernoulli(p) bits is 1 with probability ρ.
double bernoulli_rate_for(double rho, std::size_t rank);

/// Samples W, H with Bernoulli(p) entries until the density of W∘H lands in
/// [ρ − tol, ρ + tol], then masks round(miss·M·N) cells.
PlantedInstance generate(const GeneratorConfig& config);

/// Marks exactly round(miss·M·N) cells missing, chosen without replacement.
BinaryMatrix apply_mask(const BinaryMatrix& v, double miss_ratio, std::uint64_t seed);

/// Writes <stem>.txt (masked V), <stem>.truth.txt, <stem>.w.txt, <stem>.h.txt
/// and a <stem>.meta key=value sidecar.
void save_instance(const std::filesystem::path& stem, const PlantedInstance& inst, const GeneratorConfig& config);
PlantedInstance load_instance(const std::filesystem::path& stem);

}  // namespace boolmf
