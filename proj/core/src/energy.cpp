#include "boolmf/energy.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>
#include <utility>

namespace boolmf {

PenaltyField::PenaltyField(std::size_t rows, std::size_t cols, double lambda0, double lambda_p)
    : rows_(rows), cols_(cols), lambda0_(lambda0), lambda_p_(lambda_p), values_(rows * cols, lambda0) {
  if (!(lambda0 > 0.0)) throw std::invalid_argument("PenaltyField: lambda0 must be positive");
  if (!(lambda_p >= 0.0)) throw std::invalid_argument("PenaltyField: lambda_p must be nonnegative");
}

double PenaltyField::max() const noexcept {
  return values_.empty() ? lambda0_ : *std::max_element(values_.begin(), values_.end());
}

void PenaltyField::grow(std::size_t i, std::size_t j, double cap) noexcept {
  double& lam = values_[i * cols_ + j];
  if (lam < cap) lam = std::min(lam * (1.0 + lambda_p_), cap);
}

double rl_cell(int vij, int vhat, double lambda) {
  if (vhat < 0) throw std::invalid_argument("rl_cell: negative product count");
  if (vij != 0 && vij != 1) throw std::invalid_argument("rl_cell: target must be 0 or 1");
  const int arg = (1 - vij) * vhat + vij * (1 - vhat);
  return lambda * static_cast<double>(std::max(0, arg));
}

namespace {

void check_dims(const BinaryMatrix& v, const ProductCounts& counts) {
  if (v.rows() != counts.rows() || v.cols() != counts.cols()) {
    throw std::invalid_argument("energy: target and product dimensions differ");
  }
}

}  // namespace

std::int64_t bc_energy(const BinaryMatrix& v, const ProductCounts& counts) {
  check_dims(v, counts);
  std::int64_t e = 0;
  for (std::size_t i = 0; i < v.rows(); ++i) {
    for (std::size_t j = 0; j < v.cols(); ++j) {
      if (!v.observed(i, j)) continue;
      e += static_cast<int>(counts(i, j) != 0) != v(i, j);
    }
  }
  return e;
}

double rl_energy(const BinaryMatrix& v, const ProductCounts& counts, const PenaltyField& p) {
  check_dims(v, counts);
  if (p.rows() != v.rows() || p.cols() != v.cols()) {
    throw std::invalid_argument("energy: penalty field dimensions differ");
  }
  double e = 0.0;
  for (std::size_t i = 0; i < v.rows(); ++i) {
    for (std::size_t j = 0; j < v.cols(); ++j) {
      if (!v.observed(i, j)) continue;
      e += rl_cell(v(i, j), counts(i, j), p(i, j));
    }
  }
  return e;
}

namespace {

using Word = std::uint64_t;

std::size_t words_for(std::size_t bits) { return (bits + 63) / 64; }

void put_bit(Word* words, std::size_t idx, bool on) noexcept {
  const Word bit = Word{1} << (idx & 63);
  if (on) {
    words[idx >> 6] |= bit;
  } else {
    words[idx >> 6] &= ~bit;
  }
}

int popcount(Word w) noexcept { return std::popcount(w); }

// Σ λ over set bits of `w`, cells at base + (word_base + b) * stride.
double lambda_sum(Word w, std::size_t word_base, const double* lambdas, std::size_t base,
                  std::size_t stride) noexcept {
  double s = 0.0;
  while (w != 0) {
    const std::size_t b = static_cast<std::size_t>(std::countr_zero(w));
    s += lambdas[base + (word_base + b) * stride];
    w &= w - 1;
  }
  return s;
}

}  // namespace

FactorState::FactorState(BinaryMatrix v, FactorPair factors, CostKind cost, PenaltyField penalty)
    : v_(std::move(v)), factors_(std::move(factors)), cost_(cost), penalty_(std::move(penalty)) {
  const std::size_t m = v_.rows();
  const std::size_t n = v_.cols();
  const std::size_t rank = factors_.rank();
  if (factors_.out_rows() != m || factors_.out_cols() != n) {
    throw std::invalid_argument("FactorState: factor shapes do not match target");
  }
  if (penalty_.rows() != m || penalty_.cols() != n) {
    throw std::invalid_argument("FactorState: penalty field shape does not match target");
  }
  // Weights only ever change through growth, so λ_p = 0 keeps them uniform.
  uniform_penalty_ = penalty_.lambda_p() == 0.0;
  counts_ = integer_product(factors_);

  row_words_ = words_for(n);
  col_words_ = words_for(m);
  row_zero_.assign(m * row_words_, 0);
  row_one_.assign(m * row_words_, 0);
  row_v0_.assign(m * row_words_, 0);
  row_v1_.assign(m * row_words_, 0);
  col_zero_.assign(n * col_words_, 0);
  col_one_.assign(n * col_words_, 0);
  col_v0_.assign(n * col_words_, 0);
  col_v1_.assign(n * col_words_, 0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      set_count_bits(i, j, counts_(i, j));
      if (!v_.observed(i, j)) continue;
      const bool one = v_(i, j) != 0;
      put_bit((one ? row_v1_ : row_v0_).data() + i * row_words_, j, true);
      put_bit((one ? col_v1_ : col_v0_).data() + j * col_words_, i, true);
    }
  }
  h_rows_.assign(rank * row_words_, 0);
  w_cols_.assign(rank * col_words_, 0);
  for (std::size_t k = 0; k < rank; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      if (factors_.h()(k, j) != 0) put_bit(h_rows_.data() + k * row_words_, j, true);
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (factors_.w()(i, k) != 0) put_bit(w_cols_.data() + k * col_words_, i, true);
    }
  }
  refresh_energy();
}

void FactorState::set_count_bits(std::size_t i, std::size_t j, std::int32_t count) noexcept {
  put_bit(row_zero_.data() + i * row_words_, j, count == 0);
  put_bit(row_one_.data() + i * row_words_, j, count == 1);
  put_bit(col_zero_.data() + j * col_words_, i, count == 0);
  put_bit(col_one_.data() + j * col_words_, i, count == 1);
}

FlipSite FactorState::site(std::size_t spin) const {
  const std::size_t rank = factors_.rank();
  const std::size_t w_bits = factors_.w().size();
  if (spin < w_bits) return {FactorSide::W, spin / rank, spin % rank};
  spin -= w_bits;
  if (spin >= factors_.h().size()) throw std::out_of_range("FactorState: spin index out of range");
  const std::size_t n = factors_.out_cols();
  return {FactorSide::H, spin / n, spin % n};
}

void FactorState::check_site(FlipSite s) const {
  const BinaryMatrix& f = s.side == FactorSide::W ? factors_.w() : factors_.h();
  if (s.row >= f.rows() || s.col >= f.cols()) throw std::out_of_range("FactorState: flip site out of range");
}

// A flip moves the count of every cell on one line (row i of V̂ for a W bit,
// column j for an H bit) that the partner factor covers. Going up, a cell
// changes its mismatch state only from count 0; going down, only from count 1.
// Observed zeros pay λ per unit of count, observed ones pay λ only at count 0.
template <bool Weighted>
FlipDelta FactorState::delta_impl(FlipSite s) const {
  const std::size_t n = v_.cols();
  FlipDelta out{s, 0, 0.0, 0};

  const Word* cover;
  const Word* edge;
  const Word* v0;
  const Word* v1;
  std::size_t words;
  std::size_t base;
  std::size_t stride;
  if (s.side == FactorSide::W) {
    const std::size_t i = s.row;
    const std::size_t k = s.col;
    out.sign = factors_.w()(i, k) != 0 ? -1 : 1;
    words = row_words_;
    cover = h_rows_.data() + k * words;
    edge = (out.sign > 0 ? row_zero_ : row_one_).data() + i * words;
    v0 = row_v0_.data() + i * words;
    v1 = row_v1_.data() + i * words;
    base = i * n;
    stride = 1;
  } else {
    const std::size_t k = s.row;
    const std::size_t j = s.col;
    out.sign = factors_.h()(k, j) != 0 ? -1 : 1;
    words = col_words_;
    cover = w_cols_.data() + k * words;
    edge = (out.sign > 0 ? col_zero_ : col_one_).data() + j * words;
    v0 = col_v0_.data() + j * words;
    v1 = col_v1_.data() + j * words;
    base = j;
    stride = n;
  }

  std::int64_t edge0 = 0;
  std::int64_t edge1 = 0;
  std::int64_t zeros = 0;
  double lam_zeros = 0.0;
  double lam_edge1 = 0.0;
  const double* lambdas = penalty_.values().data();
  for (std::size_t w = 0; w < words; ++w) {
    const Word a = cover[w];
    if (a == 0) continue;
    const Word t = a & edge[w];
    edge0 += popcount(t & v0[w]);
    edge1 += popcount(t & v1[w]);
    if constexpr (Weighted) {
      if (uniform_penalty_) {
        zeros += popcount(a & v0[w]);
      } else {
        lam_zeros += lambda_sum(a & v0[w], w * 64, lambdas, base, stride);
        lam_edge1 += lambda_sum(t & v1[w], w * 64, lambdas, base, stride);
      }
    }
  }
  out.mismatches = out.sign * (edge0 - edge1);
  if constexpr (Weighted) {
    if (uniform_penalty_) {
      out.energy = out.sign * penalty_.lambda0() * static_cast<double>(zeros - edge1);
    } else {
      out.energy = out.sign * (lam_zeros - lam_edge1);
    }
  } else {
    out.energy = static_cast<double>(out.mismatches);
  }
  return out;
}

FlipDelta FactorState::flip_delta(FlipSite s) const {
  check_site(s);
  return cost_ == CostKind::Binary ? delta_impl<false>(s) : delta_impl<true>(s);
}

std::vector<CellUpdate> FactorState::affected_cells(FlipSite s) const {
  check_site(s);
  std::vector<CellUpdate> out;
  if (s.side == FactorSide::W) {
    const int sign = factors_.w()(s.row, s.col) != 0 ? -1 : 1;
    for (std::size_t j = 0; j < v_.cols(); ++j) {
      if (factors_.h()(s.col, j) != 0) out.push_back({s.row, j, sign});
    }
  } else {
    const int sign = factors_.h()(s.row, s.col) != 0 ? -1 : 1;
    for (std::size_t i = 0; i < v_.rows(); ++i) {
      if (factors_.w()(i, s.row) != 0) out.push_back({i, s.col, sign});
    }
  }
  return out;
}

void FactorState::apply(const FlipDelta& d) {
  const FlipSite s = d.site;
  check_site(s);
  const std::uint8_t bit = s.side == FactorSide::W ? factors_.w()(s.row, s.col) : factors_.h()(s.row, s.col);
  if (d.sign != (bit != 0 ? -1 : 1)) throw std::logic_error("FactorState: stale flip delta");
  const std::size_t n = v_.cols();
  std::int32_t* counts = counts_.values().data();
  if (s.side == FactorSide::W) {
    const std::size_t i = s.row;
    const std::size_t k = s.col;
    const Word* cover = h_rows_.data() + k * row_words_;
    for (std::size_t w = 0; w < row_words_; ++w) {
      for (Word a = cover[w]; a != 0; a &= a - 1) {
        const std::size_t j = w * 64 + static_cast<std::size_t>(std::countr_zero(a));
        set_count_bits(i, j, counts[i * n + j] += d.sign);
      }
    }
    factors_.w().flip(i, k);
    put_bit(w_cols_.data() + k * col_words_, i, d.sign > 0);
  } else {
    const std::size_t k = s.row;
    const std::size_t j = s.col;
    const Word* cover = w_cols_.data() + k * col_words_;
    for (std::size_t w = 0; w < col_words_; ++w) {
      for (Word a = cover[w]; a != 0; a &= a - 1) {
        const std::size_t i = w * 64 + static_cast<std::size_t>(std::countr_zero(a));
        set_count_bits(i, j, counts[i * n + j] += d.sign);
      }
    }
    factors_.h().flip(k, j);
    put_bit(h_rows_.data() + k * row_words_, j, d.sign > 0);
  }
  energy_ += d.energy;
  mismatches_ += d.mismatches;
  // Both costs vanish on exactly the same states; drop accumulated rounding.
  if (mismatches_ == 0) energy_ = 0.0;
}

void FactorState::refresh_energy() {
  mismatches_ = bc_energy(v_, counts_);
  energy_ = cost_ == CostKind::Binary ? static_cast<double>(mismatches_) : rl_energy(v_, counts_, penalty_);
}

std::size_t FactorState::grow_violated_penalties(double cap) {
  const std::size_t m = v_.rows();
  const std::size_t n = v_.cols();
  std::size_t grown = 0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!v_.observed(i, j)) continue;
      if ((counts_(i, j) != 0) != (v_(i, j) != 0)) {
        penalty_.grow(i, j, cap);
        ++grown;
      }
    }
  }
  refresh_energy();
  return grown;
}

}  // namespace boolmf
