#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "boolmf/binmat.hpp"

namespace boolmf {

enum class CostKind : std::uint8_t {
  Binary,          // mismatch count
  RectifiedLinear  // weighted max(0, ·) penalty per cell
};

/// Per-cell penalty weights λ_ij with their initial value and growth rate.
class PenaltyField {
 public:
  PenaltyField() = default;
  PenaltyField(std::size_t rows, std::size_t cols, double lambda0, double lambda_p = 0.0);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double lambda0() const noexcept { return lambda0_; }
  double lambda_p() const noexcept { return lambda_p_; }

  double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * cols_ + j]; }
  std::span<const double> values() const noexcept { return values_; }
  double max() const noexcept;

  /// λ_ij ← min(λ_ij (1 + λ_p), cap).
  void grow(std::size_t i, std::size_t j, double cap) noexcept;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  double lambda0_ = 1.0;
  double lambda_p_ = 0.0;
  std::vector<double> values_;
};

/// λ · max(0, (1 − v) v̂ + v (1 − v̂)).
double rl_cell(int vij, int vhat, double lambda);

/// Number of observed cells where logical(V̂_ij) != V_ij.
std::int64_t bc_energy(const BinaryMatrix& v, const ProductCounts& counts);

/// Sum of rl_cell over observed cells.
double rl_energy(const BinaryMatrix& v, const ProductCounts& counts, const PenaltyField& p);

enum class FactorSide : std::uint8_t { W, H };

struct FlipSite {
  FactorSide side = FactorSide::W;
  std::size_t row = 0;
  std::size_t col = 0;

  friend bool operator==(const FlipSite&, const FlipSite&) = default;
};

struct CellUpdate {
  std::size_t i = 0;
  std::size_t j = 0;
  int delta = 0;

  friend bool operator==(const CellUpdate&, const CellUpdate&) = default;
};

/// Outcome of a proposed single-bit flip, evaluated against a fixed state.
struct FlipDelta {
  FlipSite site;
  int sign = 0;             // +1 when the bit goes 0 -> 1, -1 otherwise
  double energy = 0.0;      // change of the active cost
  std::int64_t mismatches = 0;
};

/// Incremental factorization state: target V, factors, product counts,
/// penalty weights and the current energy of the active cost.
///
/// Alongside the counts, each row and each column of V̂ keeps 64-bit masks of
/// its count-0 and count-1 cells, and W, H keep column/row masks, so the
/// delta of a flip is a handful of popcounts over the affected line.
class FactorState {
 public:
  FactorState(BinaryMatrix v, FactorPair factors, CostKind cost, PenaltyField penalty);

  const BinaryMatrix& target() const noexcept { return v_; }
  const FactorPair& factors() const noexcept { return factors_; }
  const ProductCounts& counts() const noexcept { return counts_; }
  const PenaltyField& penalty() const noexcept { return penalty_; }
  CostKind cost() const noexcept { return cost_; }

  double energy() const noexcept { return energy_; }
  std::int64_t mismatches() const noexcept { return mismatches_; }

  /// M·K + K·N; spins are indexed W first (row-major), then H.
  std::size_t spin_count() const noexcept { return factors_.bit_count(); }
  FlipSite site(std::size_t spin) const;

  FlipDelta flip_delta(FlipSite site) const;
  /// Count changes a flip at `site` would make, in index order.
  std::vector<CellUpdate> affected_cells(FlipSite site) const;
  void apply(const FlipDelta& delta);
  void flip(FlipSite site) { apply(flip_delta(site)); }

  /// Recomputes energy and mismatch count from the product counts.
  void refresh_energy();

  /// Grows λ_ij on every observed mismatched cell, then refreshes the energy.
  /// Returns the number of cells grown.
  std::size_t grow_violated_penalties(double cap);

 private:
  using Word = std::uint64_t;

  template <bool Weighted>
  FlipDelta delta_impl(FlipSite site) const;
  void check_site(FlipSite site) const;
  void set_count_bits(std::size_t i, std::size_t j, std::int32_t count) noexcept;

  BinaryMatrix v_;
  FactorPair factors_;
  CostKind cost_;
  PenaltyField penalty_;
  bool uniform_penalty_ = true;
  ProductCounts counts_;
  double energy_ = 0.0;
  std::int64_t mismatches_ = 0;

  std::size_t row_words_ = 0;  // words per row of V̂ (N bits)
  std::size_t col_words_ = 0;  // words per column of V̂ (M bits)
  // Row-major masks, row_words_ per row i.
  std::vector<Word> row_zero_, row_one_, row_v0_, row_v1_;
  // Column-major masks, col_words_ per column j.
  std::vector<Word> col_zero_, col_one_, col_v0_, col_v1_;
  // H row k over j, W column k over i.
  std::vector<Word> h_rows_, w_cols_;
};

/// One landscape sample: a state at a given Hamming distance from the planted
/// factors and its energy under both costs.
struct LandscapeRow {
  std::size_t distance = 0;
  std::int64_t bc_energy = 0;
  double rl_energy = 0.0;
  std::size_t sample_index = 0;
};

/// Perturbs `planted` by `d` distinct uniformly chosen factor bits, for each
/// requested d and `samples` repetitions, and scores each perturbed state.
/// The RL energy uses a uniform weight `lambda`.
std::vector<LandscapeRow> landscape_probe(const FactorPair& planted, const BinaryMatrix& v,
                                          std::span<const std::size_t> distances, std::size_t samples,
                                          std::uint64_t seed, double lambda = 1.0);

void write_landscape_csv(std::ostream& out, std::span<const LandscapeRow> rows);

}  // namespace boolmf
