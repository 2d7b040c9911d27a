#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "boolmf/binmat.hpp"
#include "boolmf/energy.hpp"

namespace boolmf {

enum class Mode : std::uint8_t {
  BC,   // binary mismatch cost
  RLF,  // rectified-linear cost, one fixed weight
  RLU   // rectified-linear cost, violated weights grow every MCS
};

std::string_view to_string(Mode mode) noexcept;
/// Accepts "bc", "rl-f", "rl-u" (case-insensitive, '_' allowed for '-').
Mode parse_mode(std::string_view text);

/// Geometric inverse-temperature schedule driven by acceptance counts.
struct TemperatureSchedule {
  double beta0 = 2.0;
  double beta_f = 0.1;
  std::uint64_t accepts_per_update = 1000;
  /// Consecutive MCS with zero acceptances before giving up; 0 disables.
  std::uint64_t stall_limit_mcs = 1000;
};

enum class Target : std::uint8_t {
  ExactZero,       // a run that ends with E > 0 is unsolved
  BestWithinBudget // keep the lowest-error state seen within the budget
};

enum class InitKind : std::uint8_t { Random, Zero };

/// Number of flip attempts making up one MCS.
enum class SweepKind : std::uint8_t {
  Spins,  // every bit of W and H once, in a fresh random permutation
  Cells   // M·N i.i.d. uniformly chosen bits (compatibility reading)
};

struct SolverConfig {
  Mode mode = Mode::RLU;
  std::size_t rank = 1;
  TemperatureSchedule schedule;
  double lambda0 = 2.0;
  double lambda_p = 0.01;
  double lambda_cap = 1e12;
  std::uint64_t max_mcs = 200000;
  std::uint64_t seed = 0;
  Target target = Target::ExactZero;
  InitKind init = InitKind::Random;
  SweepKind sweep = SweepKind::Spins;
  /// Sample the trace every this many MCS; 0 records no trace.
  std::uint64_t trace_every = 0;
  /// From-scratch energy refresh period for the weighted cost.
  std::uint64_t refresh_every = 10000;
  /// Wall-clock cap in seconds; 0 disables. Hitting it ends the run as Budget
  /// and makes the result timing dependent.
  double wall_seconds = 0.0;

  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
};

struct TracePoint {
  std::uint64_t mcs = 0;
  double energy = 0.0;
  std::int64_t mismatches = 0;
  double beta = 0.0;
  double max_lambda = 0.0;
};

enum class StopReason : std::uint8_t { Solved, Stalled, Budget };
std::string_view to_string(StopReason reason) noexcept;

struct RunResult {
  FactorPair best_factors;
  /// Active-cost energy of the best state when it was recorded.
  double best_energy = 0.0;
  /// Observed mismatches of the best state; the selection criterion.
  std::int64_t best_mismatches = 0;
  std::optional<std::uint64_t> mcs0;
  std::uint64_t mcs1 = 0;
  std::uint64_t total_mcs = 0;
  std::uint64_t attempts = 0;
  std::uint64_t acceptances = 0;
  double final_beta = 0.0;
  double final_max_lambda = 0.0;
  StopReason stopped = StopReason::Budget;
  std::vector<TracePoint> trace;

  bool solved() const noexcept { return mcs0.has_value(); }
};

/// Builds the starting state: factors from the run seed (or all zeros),
/// λ_ij = λ_0 and the energy of the mode's cost.
FactorState init_state(const BinaryMatrix& v, const SolverConfig& config);

/// Observed cells where logical(V̂_ij) != V_ij, recounted from scratch.
std::int64_t record_mismatches(const FactorState& state);

/// Metropolis simulated annealing over single-bit flips of W and H.
RunResult run(const BinaryMatrix& v, const SolverConfig& config);

/// Columns: mcs,energy,mismatches,beta,max_lambda.
void write_trace_csv(std::ostream& out, std::span<const TracePoint> trace);

}  // namespace boolmf
