#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <vector>

namespace boolmf {

/// Dense row-major 0/1 matrix with an optional observation mask.
///
/// When a mask is present, `observed(i, j) == false` marks a missing entry.
/// Missing entries always store bit 0 so that the text format round-trips;
/// every consumer in this library skips them.
class BinaryMatrix {
 public:
  BinaryMatrix() = default;
  BinaryMatrix(std::size_t rows, std::size_t cols);
  BinaryMatrix(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> bits);

  static BinaryMatrix from_rows(std::initializer_list<std::initializer_list<int>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return bits_.size(); }

  std::uint8_t operator()(std::size_t i, std::size_t j) const noexcept { return bits_[i * cols_ + j]; }
  std::uint8_t at(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, bool bit);
  void flip(std::size_t i, std::size_t j);

  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  bool has_mask() const noexcept { return !mask_.empty(); }
  bool observed(std::size_t i, std::size_t j) const noexcept {
    return mask_.empty() || mask_[i * cols_ + j] != 0;
  }
  /// Observation mask, empty when every entry is observed.
  std::span<const std::uint8_t> mask() const noexcept { return mask_; }
  void set_mask(std::vector<std::uint8_t> mask);
  void set_missing(std::size_t i, std::size_t j);
  void clear_mask() noexcept { mask_.clear(); }

  std::size_t observed_count() const noexcept;
  std::size_t missing_count() const noexcept { return size() - observed_count(); }
  std::size_t ones_observed() const noexcept;
  /// Fraction of ones among observed entries; 0 when nothing is observed.
  double density() const noexcept;

  BinaryMatrix without_mask() const;

  friend bool operator==(const BinaryMatrix&, const BinaryMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> bits_;
  std::vector<std::uint8_t> mask_;
};

/// Row-major integer matrix. Holds product counts and distance tables.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols, std::int32_t fill = 0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::int32_t operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * cols_ + j]; }
  std::int32_t& operator()(std::size_t i, std::size_t j) noexcept { return values_[i * cols_ + j]; }
  std::span<const std::int32_t> values() const noexcept { return values_; }
  std::span<std::int32_t> values() noexcept { return values_; }

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::int32_t> values_;
};

/// V̂ = W·H over the integers; entry (i, j) counts the k with W_ik = H_kj = 1.
using ProductCounts = IntMatrix;

/// Candidate factors W (M×K) and H (K×N). Neither carries a mask.
class FactorPair {
 public:
  FactorPair() = default;
  FactorPair(BinaryMatrix w, BinaryMatrix h);

  /// All-zero factors of the given shape.
  static FactorPair zeros(std::size_t m, std::size_t n, std::size_t rank);

  const BinaryMatrix& w() const noexcept { return w_; }
  const BinaryMatrix& h() const noexcept { return h_; }
  BinaryMatrix& w() noexcept { return w_; }
  BinaryMatrix& h() noexcept { return h_; }

  std::size_t rank() const noexcept { return w_.cols(); }
  std::size_t out_rows() const noexcept { return w_.rows(); }
  std::size_t out_cols() const noexcept { return h_.cols(); }
  /// Number of factor bits, M·K + K·N.
  std::size_t bit_count() const noexcept { return w_.size() + h_.size(); }

  friend bool operator==(const FactorPair&, const FactorPair&) = default;

 private:
  BinaryMatrix w_;
  BinaryMatrix h_;
};

/// (W∘H)_ij = OR_k (W_ik AND H_kj).
BinaryMatrix bool_product(const FactorPair& f);

ProductCounts integer_product(const FactorPair& f);

/// Elementwise (A != 0).
BinaryMatrix logical(const IntMatrix& a);

/// Pairwise row Hamming distances. Rejects matrices with missing entries.
IntMatrix hamming_rows(const BinaryMatrix& m);

/// Exchanges column k1 with k2 of W and row k1 with k2 of H.
FactorPair swap_symmetry(const FactorPair& f, std::size_t k1, std::size_t k2);

// Text format: header "M N", then M lines of N characters from {'0','1','?'}.
BinaryMatrix read_matrix(std::istream& in);
void write_matrix(std::ostream& out, const BinaryMatrix& m);
BinaryMatrix load_matrix(const std::filesystem::path& path);
void save_matrix(const std::filesystem::path& path, const BinaryMatrix& m);

}  // namespace boolmf
