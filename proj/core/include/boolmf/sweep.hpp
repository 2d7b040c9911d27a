#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "boolmf/annealer.hpp"
#include "boolmf/binmat.hpp"
#include "boolmf/stats.hpp"

namespace boolmf {

/// A grid of annealer runs over planted instances (or one fixed matrix).
///
/// Every (mode, K, ρ, β_0, β_f, λ_0, λ_p) grid point is run on the same
/// `instances × seeds` cells; instance and start-state seeds depend only on
/// (master seed, M, N, K, ρ, instance, seed index), so modes and schedules are
/// compared on identical inputs. Mode-irrelevant λ dimensions collapse: BC
/// runs once per schedule, RL-F once per λ_0.
struct SweepSpec {
  std::size_t m = 30;
  std::size_t n = 30;
  std::vector<std::size_t> ranks{8};
  std::vector<double> rhos{0.1};
  double rho_tol = 0.01;
  double miss = 0.0;
  std::optional<std::filesystem::path> matrix_file;

  std::vector<Mode> modes{Mode::BC, Mode::RLF, Mode::RLU};
  std::vector<double> beta0s{10.0, 2.0, 1.0};
  std::vector<double> beta_fs{0.01, 0.1};
  std::vector<double> lambda0s{2.0};
  std::vector<double> lambda_ps{0.01};

  std::size_t instances = 10;
  std::size_t seeds = 10;
  std::optional<double> censor_fraction;

  std::uint64_t max_mcs = 200000;
  double wall_seconds = 0.0;
  std::uint64_t accepts_per_update = 1000;
  std::uint64_t stall_limit_mcs = 1000;
  Target target = Target::ExactZero;
  SweepKind sweep = SweepKind::Spins;
  std::uint64_t master_seed = 0;
  std::size_t threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

/// Flat key=value lines ('#' comments); list values are comma-separated.
/// Keys mirror the CLI flags: m, n, k, rho, rho-tol, miss, matrix, mode,
/// beta0, betaf, lambda0, lambdap, instances, seeds, censor, max-mcs,
/// wall-seconds, accepts-per-update, stall-limit, target, seed, threads.
SweepSpec parse_sweep_config(std::istream& in);
SweepSpec load_sweep_config(const std::filesystem::path& path);
/// Applies one key=value setting; throws std::invalid_argument for unknown keys.
void apply_sweep_setting(SweepSpec& spec, const std::string& key, const std::string& value);

struct RawRow {
  Mode mode = Mode::BC;
  std::size_t rank = 0;
  double rho = 0.0;
  double beta0 = 0.0;
  double beta_f = 0.0;
  std::optional<double> lambda0;
  std::optional<double> lambda_p;
  std::size_t instance = 0;
  std::size_t seed_index = 0;
  std::uint64_t run_seed = 0;
  std::string status;  // solved | stalled | budget | error
  std::optional<std::uint64_t> mcs0;
  std::uint64_t mcs1 = 0;
  std::uint64_t total_mcs = 0;
  std::int64_t best_mismatches = 0;
  double best_energy = 0.0;

  /// The statistic summarized for this row: MCS0 (unsolved = +inf) under an
  /// exact-zero target, MCS1 otherwise.
  double metric(Target target) const;
};

struct SummaryRow {
  Mode mode = Mode::BC;
  std::size_t rank = 0;
  double rho = 0.0;
  std::optional<double> lambda0;
  std::optional<double> lambda_p;
  double beta0 = 0.0;
  double beta_f = 0.0;
  std::size_t runs = 0;
  std::size_t kept = 0;
  double solve_rate = 0.0;
  Quartiles stats;
  bool censored = false;
};

struct SweepResult {
  std::vector<RawRow> raw;
  std::vector<SummaryRow> points;  // every grid point
  std::vector<SummaryRow> best;    // per (mode, K, ρ, λ_0, λ_p): the schedule with the smallest median
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

SweepResult sweep(const SweepSpec& spec, const ProgressFn& progress = {});

/// Rebuilds grid-point and best-schedule summaries from raw rows alone.
void summarize(const SweepSpec& spec, SweepResult& result);

void write_raw_csv(std::ostream& out, std::span<const RawRow> rows);
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);

/// Seeds shared by every grid point that touches the same instance cell.
std::uint64_t instance_seed(std::uint64_t master, std::size_t m, std::size_t n, std::size_t rank, double rho,
                            std::size_t instance);
std::uint64_t run_seed(std::uint64_t master, std::size_t m, std::size_t n, std::size_t rank, double rho,
                       std::size_t instance, std::size_t seed_index);

}  // namespace boolmf
