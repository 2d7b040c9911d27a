#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace boolmf {

struct Quartiles {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

/// Median (midpoint of the middle two for even counts) and type-7 quartiles.
/// Values may include +infinity. Throws std::invalid_argument when empty.
Quartiles median_iqr(std::span<const double> values);

/// Type-7 (linear interpolation) quantile of an ascending range.
double quantile_sorted(std::span<const double> sorted, double p);

/// The smallest round(fraction·n) values (at least one), ascending.
std::vector<double> censor_smallest(std::span<const double> values, double fraction);

/// Spearman rank correlation with average ranks for ties; 0 when either
/// side is constant.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace boolmf
