#include "boolmf/binmat.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace boolmf {

BinaryMatrix::BinaryMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), bits_(rows * cols, 0) {}

BinaryMatrix::BinaryMatrix(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> bits)
    : rows_(rows), cols_(cols), bits_(std::move(bits)) {
  if (bits_.size() != rows * cols) {
    throw std::invalid_argument("BinaryMatrix: bit vector size does not match dimensions");
  }
  for (auto b : bits_) {
    if (b > 1) throw std::invalid_argument("BinaryMatrix: entries must be 0 or 1");
  }
}

BinaryMatrix BinaryMatrix::from_rows(std::initializer_list<std::initializer_list<int>> rows) {
  const std::size_t m = rows.size();
  const std::size_t n = m == 0 ? 0 : rows.begin()->size();
  std::vector<std::uint8_t> bits;
  bits.reserve(m * n);
  for (const auto& row : rows) {
    if (row.size() != n) throw std::invalid_argument("BinaryMatrix: ragged rows");
    for (int v : row) {
      if (v != 0 && v != 1) throw std::invalid_argument("BinaryMatrix: entries must be 0 or 1");
      bits.push_back(static_cast<std::uint8_t>(v));
    }
  }
  return BinaryMatrix(m, n, std::move(bits));
}

std::uint8_t BinaryMatrix::at(std::size_t i, std::size_t j) const {
  if (i >= rows_ || j >= cols_) throw std::out_of_range("BinaryMatrix: index out of range");
  return bits_[i * cols_ + j];
}

void BinaryMatrix::set(std::size_t i, std::size_t j, bool bit) {
  if (i >= rows_ || j >= cols_) throw std::out_of_range("BinaryMatrix: index out of range");
  bits_[i * cols_ + j] = bit ? 1 : 0;
}

void BinaryMatrix::flip(std::size_t i, std::size_t j) {
  if (i >= rows_ || j >= cols_) throw std::out_of_range("BinaryMatrix: index out of range");
  bits_[i * cols_ + j] ^= 1;
}

void BinaryMatrix::set_mask(std::vector<std::uint8_t> mask) {
  if (!mask.empty() && mask.size() != bits_.size()) {
    throw std::invalid_argument("BinaryMatrix: mask dimensions differ from bits");
  }
  for (std::size_t idx = 0; idx < mask.size(); ++idx) {
    mask[idx] = mask[idx] != 0 ? 1 : 0;
    if (mask[idx] == 0) bits_[idx] = 0;
  }
  if (std::find(mask.begin(), mask.end(), std::uint8_t{0}) == mask.end()) mask.clear();
  mask_ = std::move(mask);
}

void BinaryMatrix::set_missing(std::size_t i, std::size_t j) {
  if (i >= rows_ || j >= cols_) throw std::out_of_range("BinaryMatrix: index out of range");
  if (mask_.empty()) mask_.assign(bits_.size(), 1);
  mask_[i * cols_ + j] = 0;
  bits_[i * cols_ + j] = 0;
}

std::size_t BinaryMatrix::observed_count() const noexcept {
  if (mask_.empty()) return bits_.size();
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

std::size_t BinaryMatrix::ones_observed() const noexcept {
  std::size_t ones = 0;
  for (std::size_t idx = 0; idx < bits_.size(); ++idx) {
    if (bits_[idx] != 0 && (mask_.empty() || mask_[idx] != 0)) ++ones;
  }
  return ones;
}

double BinaryMatrix::density() const noexcept {
  const std::size_t obs = observed_count();
  return obs == 0 ? 0.0 : static_cast<double>(ones_observed()) / static_cast<double>(obs);
}

BinaryMatrix BinaryMatrix::without_mask() const {
  BinaryMatrix copy = *this;
  copy.clear_mask();
  return copy;
}

FactorPair::FactorPair(BinaryMatrix w, BinaryMatrix h) : w_(std::move(w)), h_(std::move(h)) {
  if (w_.cols() != h_.rows()) {
    throw std::invalid_argument("FactorPair: W columns must equal H rows");
  }
  if (w_.cols() < 1) throw std::invalid_argument("FactorPair: rank must be at least 1");
  if (w_.has_mask() || h_.has_mask()) throw std::invalid_argument("FactorPair: factors cannot be masked");
}

FactorPair FactorPair::zeros(std::size_t m, std::size_t n, std::size_t rank) {
  return FactorPair(BinaryMatrix(m, rank), BinaryMatrix(rank, n));
}

ProductCounts integer_product(const FactorPair& f) {
  const auto& w = f.w();
  const auto& h = f.h();
  ProductCounts counts(w.rows(), h.cols());
  for (std::size_t i = 0; i < w.rows(); ++i) {
    for (std::size_t k = 0; k < f.rank(); ++k) {
      if (w(i, k) == 0) continue;
      for (std::size_t j = 0; j < h.cols(); ++j) counts(i, j) += h(k, j);
    }
  }
  return counts;
}

BinaryMatrix logical(const IntMatrix& a) {
  BinaryMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out.set(i, j, a(i, j) != 0);
  }
  return out;
}

BinaryMatrix bool_product(const FactorPair& f) {
  const auto& w = f.w();
  const auto& h = f.h();
  BinaryMatrix out(w.rows(), h.cols());
  for (std::size_t i = 0; i < w.rows(); ++i) {
    for (std::size_t j = 0; j < h.cols(); ++j) {
      bool any = false;
      for (std::size_t k = 0; k < f.rank() && !any; ++k) any = w(i, k) != 0 && h(k, j) != 0;
      out.set(i, j, any);
    }
  }
  return out;
}

IntMatrix hamming_rows(const BinaryMatrix& m) {
  if (m.has_mask() && m.missing_count() > 0) {
    throw std::invalid_argument("hamming_rows: matrix has missing entries");
  }
  IntMatrix d(m.rows(), m.rows());
  for (std::size_t u = 0; u < m.rows(); ++u) {
    for (std::size_t v = u + 1; v < m.rows(); ++v) {
      std::int32_t dist = 0;
      for (std::size_t j = 0; j < m.cols(); ++j) dist += m(u, j) != m(v, j);
      d(u, v) = dist;
      d(v, u) = dist;
    }
  }
  return d;
}

FactorPair swap_symmetry(const FactorPair& f, std::size_t k1, std::size_t k2) {
  if (k1 >= f.rank() || k2 >= f.rank()) throw std::out_of_range("swap_symmetry: rank index out of range");
  FactorPair out = f;
  if (k1 == k2) return out;
  for (std::size_t i = 0; i < f.out_rows(); ++i) {
    out.w().set(i, k1, f.w()(i, k2));
    out.w().set(i, k2, f.w()(i, k1));
  }
  for (std::size_t j = 0; j < f.out_cols(); ++j) {
    out.h().set(k1, j, f.h()(k2, j));
    out.h().set(k2, j, f.h()(k1, j));
  }
  return out;
}

BinaryMatrix read_matrix(std::istream& in) {
  std::string line;
  std::size_t m = 0;
  std::size_t n = 0;
  if (!std::getline(in, line)) throw std::runtime_error("matrix file: missing header");
  {
    std::istringstream header(line);
    if (!(header >> m >> n)) throw std::runtime_error("matrix file: malformed header '" + line + "'");
    std::string extra;
    if (header >> extra) throw std::runtime_error("matrix file: trailing data in header");
  }
  std::vector<std::uint8_t> bits;
  std::vector<std::uint8_t> mask;
  bits.reserve(m * n);
  mask.reserve(m * n);
  bool any_missing = false;
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::getline(in, line)) throw std::runtime_error("matrix file: expected " + std::to_string(m) + " rows");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.size() != n) {
      throw std::runtime_error("matrix file: row " + std::to_string(i) + " has " + std::to_string(line.size()) +
                               " characters, expected " + std::to_string(n));
    }
    for (char c : line) {
      switch (c) {
        case '0': bits.push_back(0); mask.push_back(1); break;
        case '1': bits.push_back(1); mask.push_back(1); break;
        case '?': bits.push_back(0); mask.push_back(0); any_missing = true; break;
        default: throw std::runtime_error(std::string("matrix file: invalid character '") + c + "'");
      }
    }
  }
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) throw std::runtime_error("matrix file: trailing rows");
  }
  BinaryMatrix out(m, n, std::move(bits));
  if (any_missing) out.set_mask(std::move(mask));
  return out;
}

void write_matrix(std::ostream& out, const BinaryMatrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  std::string row(m.cols(), '0');
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      row[j] = !m.observed(i, j) ? '?' : (m(i, j) != 0 ? '1' : '0');
    }
    out << row << '\n';
  }
}

BinaryMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file " + path.string());
  return read_matrix(in);
}

void save_matrix(const std::filesystem::path& path, const BinaryMatrix& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write matrix file " + path.string());
  write_matrix(out, m);
}

}  // namespace boolmf
