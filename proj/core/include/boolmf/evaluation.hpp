#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>

#include "boolmf/annealer.hpp"
#include "boolmf/binmat.hpp"

namespace boolmf {

/// Error rates (percent) at the masked cells of one instance.
struct EvaluationReport {
  std::string method;
  double error_estimated = 0.0;
  double error_zero = 0.0;
  double error_one = 0.0;
  double error_random = 0.0;
  std::size_t miss_count = 0;
};

/// Scores `result.best_factors` against the hidden cells of `masked`, next to
/// constant-0, constant-1 and Bernoulli(rho) fills. The random baseline is the
/// mean over `random_fills` independent fills drawn from `seed`.
EvaluationReport evaluate_missing(const BinaryMatrix& true_v, const BinaryMatrix& masked, const RunResult& result,
                                  double rho, std::uint64_t seed, std::size_t random_fills = 100);

/// Percent of masked cells where `estimate` differs from `true_v`.
double masked_error(const BinaryMatrix& true_v, const BinaryMatrix& masked, const BinaryMatrix& estimate);

/// Annealer run with a best-within-budget target and `budget_mcs` sweeps.
RunResult best_local_search(const BinaryMatrix& v, SolverConfig config, std::uint64_t budget_mcs);

struct ReportRow {
  EvaluationReport report;
  std::uint64_t seed = 0;
  std::string instance_id;
};

/// Columns: method,error_estimated,error_zero,error_one,error_random,miss_count,seed,instance_id.
void write_report_csv(std::ostream& out, std::span<const ReportRow> rows);

}  // namespace boolmf
