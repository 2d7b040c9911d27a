#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

#include "boolmf/energy.hpp"
#include "boolmf/random.hpp"

namespace boolmf {

std::vector<LandscapeRow> landscape_probe(const FactorPair& planted, const BinaryMatrix& v,
                                          std::span<const std::size_t> distances, std::size_t samples,
                                          std::uint64_t seed, double lambda) {
  if (v.rows() != planted.out_rows() || v.cols() != planted.out_cols()) {
    throw std::invalid_argument("landscape_probe: target shape does not match factors");
  }
  const std::size_t total = planted.bit_count();
  for (auto d : distances) {
    if (d > total) {
      throw std::invalid_argument("landscape_probe: distance " + std::to_string(d) + " exceeds " +
                                  std::to_string(total) + " factor bits");
    }
  }
  const PenaltyField uniform(v.rows(), v.cols(), lambda);
  const std::size_t w_bits = planted.w().size();
  const std::size_t rank = planted.rank();
  const std::size_t n = planted.out_cols();

  std::vector<LandscapeRow> rows;
  rows.reserve(distances.size() * samples);
  std::vector<std::size_t> order(total);
  for (auto d : distances) {
    for (std::size_t s = 0; s < samples; ++s) {
      Rng rng(derive_seed(seed, {d, s}));
      std::iota(order.begin(), order.end(), std::size_t{0});
      // Partial Fisher-Yates: the first d entries are a uniform d-subset.
      for (std::size_t t = 0; t < d; ++t) {
        std::uniform_int_distribution<std::size_t> pick(t, total - 1);
        std::swap(order[t], order[pick(rng)]);
      }
      FactorPair f = planted;
      for (std::size_t t = 0; t < d; ++t) {
        const std::size_t bit = order[t];
        if (bit < w_bits) {
          f.w().flip(bit / rank, bit % rank);
        } else {
          f.h().flip((bit - w_bits) / n, (bit - w_bits) % n);
        }
      }
      const ProductCounts counts = integer_product(f);
      rows.push_back({d, bc_energy(v, counts), rl_energy(v, counts, uniform), s});
    }
  }
  return rows;
}

void write_landscape_csv(std::ostream& out, std::span<const LandscapeRow> rows) {
  out << "distance,bc_energy,rl_energy,sample_index\n";
  for (const auto& r : rows) {
    out << r.distance << ',' << r.bc_energy << ',' << r.rl_energy << ',' << r.sample_index << '\n';
  }
}

}  // namespace boolmf
