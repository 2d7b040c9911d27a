#include "boolmf/evaluation.hpp"

#include <ostream>
#include <stdexcept>

#include "boolmf/random.hpp"
#include "number_format.hpp"

namespace boolmf {

namespace {

void check_pair(const BinaryMatrix& true_v, const BinaryMatrix& masked) {
  if (true_v.rows() != masked.rows() || true_v.cols() != masked.cols()) {
    throw std::invalid_argument("evaluate_missing: true and masked matrices differ in shape");
  }
  if (masked.missing_count() == 0) throw std::invalid_argument("evaluate_missing: no masked cells to evaluate");
}

}  // namespace

double masked_error(const BinaryMatrix& true_v, const BinaryMatrix& masked, const BinaryMatrix& estimate) {
  check_pair(true_v, masked);
  if (estimate.rows() != true_v.rows() || estimate.cols() != true_v.cols()) {
    throw std::invalid_argument("masked_error: estimate shape differs");
  }
  std::size_t wrong = 0;
  std::size_t hidden = 0;
  for (std::size_t i = 0; i < true_v.rows(); ++i) {
    for (std::size_t j = 0; j < true_v.cols(); ++j) {
      if (masked.observed(i, j)) continue;
      ++hidden;
      wrong += estimate(i, j) != true_v(i, j);
    }
  }
  return 100.0 * static_cast<double>(wrong) / static_cast<double>(hidden);
}

EvaluationReport evaluate_missing(const BinaryMatrix& true_v, const BinaryMatrix& masked, const RunResult& result,
                                  double rho, std::uint64_t seed, std::size_t random_fills) {
  check_pair(true_v, masked);
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("evaluate_missing: rho must lie in [0, 1]");
  if (random_fills < 1) throw std::invalid_argument("evaluate_missing: need at least one random fill");

  EvaluationReport rep;
  rep.miss_count = masked.missing_count();
  rep.error_estimated = masked_error(true_v, masked, bool_product(result.best_factors));

  std::size_t true_ones = 0;
  for (std::size_t i = 0; i < true_v.rows(); ++i) {
    for (std::size_t j = 0; j < true_v.cols(); ++j) {
      if (!masked.observed(i, j)) true_ones += true_v(i, j);
    }
  }
  const double miss = static_cast<double>(rep.miss_count);
  rep.error_zero = 100.0 * static_cast<double>(true_ones) / miss;
  rep.error_one = 100.0 * static_cast<double>(rep.miss_count - true_ones) / miss;

  Rng rng(seed);
  std::bernoulli_distribution fill(rho);
  double sum = 0.0;
  for (std::size_t f = 0; f < random_fills; ++f) {
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < true_v.rows(); ++i) {
      for (std::size_t j = 0; j < true_v.cols(); ++j) {
        if (masked.observed(i, j)) continue;
        wrong += static_cast<std::uint8_t>(fill(rng)) != true_v(i, j);
      }
    }
    sum += 100.0 * static_cast<double>(wrong) / miss;
  }
  rep.error_random = sum / static_cast<double>(random_fills);
  return rep;
}

RunResult best_local_search(const BinaryMatrix& v, SolverConfig config, std::uint64_t budget_mcs) {
  config.target = Target::BestWithinBudget;
  config.max_mcs = budget_mcs;
  return run(v, config);
}

void write_report_csv(std::ostream& out, std::span<const ReportRow> rows) {
  out << "method,error_estimated,error_zero,error_one,error_random,miss_count,seed,instance_id\n";
  for (const auto& r : rows) {
    const auto& e = r.report;
    using detail::format_number;
    out << e.method << ',' << format_number(e.error_estimated) << ',' << format_number(e.error_zero) << ','
        << format_number(e.error_one) << ',' << format_number(e.error_random) << ',' << e.miss_count << ',' << r.seed << ',' << r.instance_id << '\n';
  }
}

}  // namespace boolmf
