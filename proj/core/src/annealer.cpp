#include "boolmf/annealer.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "boolmf/random.hpp"

namespace boolmf {

namespace {
constexpr double kNegligibleExponent = 37.0;
}  // namespace

std::string_view to_string(Mode mode) noexcept {
  switch (mode) {
    case Mode::BC: return "bc";
    case Mode::RLF: return "rl-f";
    case Mode::RLU: return "rl-u";
  }
  return "?";
}

Mode parse_mode(std::string_view text) {
  std::string norm;
  for (char c : text) norm.push_back(c == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (norm == "bc") return Mode::BC;
  if (norm == "rl-f" || norm == "rlf") return Mode::RLF;
  if (norm == "rl-u" || norm == "rlu") return Mode::RLU;
  throw std::invalid_argument("unknown mode '" + std::string(text) + "' (expected bc, rl-f or rl-u)");
}

std::string_view to_string(StopReason reason) noexcept {
  switch (reason) {
    case StopReason::Solved: return "solved";
    case StopReason::Stalled: return "stalled";
    case StopReason::Budget: return "budget";
  }
  return "?";
}

void SolverConfig::validate() const {
  if (rank < 1) throw std::invalid_argument("SolverConfig: rank must be at least 1");
  if (!(schedule.beta0 > 0.0)) throw std::invalid_argument("SolverConfig: beta0 must be positive");
  if (!(schedule.beta_f >= 0.0)) throw std::invalid_argument("SolverConfig: beta_f must be nonnegative");
  if (schedule.accepts_per_update < 1) throw std::invalid_argument("SolverConfig: accepts_per_update must be >= 1");
  if (mode != Mode::BC) {
    if (!(lambda0 > 0.0)) throw std::invalid_argument("SolverConfig: lambda0 must be positive");
    if (!(lambda_p >= 0.0)) throw std::invalid_argument("SolverConfig: lambda_p must be nonnegative");
    if (!(lambda_cap >= lambda0)) throw std::invalid_argument("SolverConfig: lambda_cap must be >= lambda0");
  }
  if (!(wall_seconds >= 0.0)) throw std::invalid_argument("SolverConfig: wall_seconds must be nonnegative");
  if (target == Target::ExactZero && max_mcs == std::numeric_limits<std::uint64_t>::max() &&
      schedule.stall_limit_mcs == 0) {
    throw std::invalid_argument("SolverConfig: exact-zero target needs an MCS budget or a stall limit");
  }
}

FactorState init_state(const BinaryMatrix& v, const SolverConfig& config) {
  config.validate();
  const std::size_t m = v.rows();
  const std::size_t n = v.cols();
  FactorPair f = FactorPair::zeros(m, n, config.rank);
  if (config.init == InitKind::Random) {
    Rng rng(derive_seed(config.seed, {0}));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t k = 0; k < config.rank; ++k) f.w().set(i, k, (rng() >> 63) != 0);
    }
    for (std::size_t k = 0; k < config.rank; ++k) {
      for (std::size_t j = 0; j < n; ++j) f.h().set(k, j, (rng() >> 63) != 0);
    }
  }
  const CostKind cost = config.mode == Mode::BC ? CostKind::Binary : CostKind::RectifiedLinear;
  const double lambda0 = config.mode == Mode::BC ? 1.0 : config.lambda0;
  const double lambda_p = config.mode == Mode::RLU ? config.lambda_p : 0.0;
  return FactorState(v, std::move(f), cost, PenaltyField(m, n, lambda0, lambda_p));
}

std::int64_t record_mismatches(const FactorState& state) {
  return bc_energy(state.target(), integer_product(state.factors()));
}

RunResult run(const BinaryMatrix& v, const SolverConfig& config) {
  FactorState state = init_state(v, config);
  Rng rng(derive_seed(config.seed, {1}));

  const auto& sched = config.schedule;
  double beta = sched.beta0;
  std::uint64_t accepts_since_update = 0;
  std::uint64_t stall = 0;

  RunResult result;
  result.best_factors = state.factors();
  result.best_energy = state.energy();
  result.best_mismatches = state.mismatches();
  result.mcs1 = 0;

  auto sample = [&](std::uint64_t t) {
    result.trace.push_back({t, state.energy(), state.mismatches(), beta, state.penalty().max()});
  };
  if (config.trace_every > 0) sample(0);

  const std::size_t spins = state.spin_count();
  std::vector<FlipSite> sites(spins);
  for (std::size_t s = 0; s < spins; ++s) sites[s] = state.site(s);
  std::vector<std::uint32_t> order(spins);
  std::iota(order.begin(), order.end(), 0U);
  std::uniform_int_distribution<std::size_t> any_spin(0, spins - 1);
  const std::size_t attempts_per_mcs = config.sweep == SweepKind::Spins ? spins : v.rows() * v.cols();

  if (state.mismatches() == 0) {
    result.mcs0 = 0;
    result.stopped = StopReason::Solved;
  }

  const auto started = std::chrono::steady_clock::now();
  auto out_of_time = [&] {
    if (config.wall_seconds <= 0.0) return false;
    const std::chrono::duration<double> spent = std::chrono::steady_clock::now() - started;
    return spent.count() >= config.wall_seconds;
  };

  std::uint64_t t = 0;
  while (!result.solved() && t < config.max_mcs) {
    ++t;
    std::uint64_t accepted_this_mcs = 0;
    if (config.sweep == SweepKind::Spins) std::shuffle(order.begin(), order.end(), rng);

    for (std::size_t a = 0; a < attempts_per_mcs; ++a) {
      const std::size_t spin = config.sweep == SweepKind::Spins ? order[a] : any_spin(rng);
      const FlipDelta d = state.flip_delta(sites[spin]);
      ++result.attempts;
      if (d.energy > 0.0) {
        const double x = beta * d.energy;
        // exp(-x) < 2^-53 lies below the smallest nonzero uniform01 draw.
        if (x > kNegligibleExponent || uniform01(rng) >= std::exp(-x)) continue;
      }

      state.apply(d);
      ++accepted_this_mcs;
      if (++accepts_since_update == sched.accepts_per_update) {
        beta *= 1.0 + sched.beta_f;
        accepts_since_update = 0;
      }
      if (state.mismatches() < result.best_mismatches) {
        result.best_mismatches = state.mismatches();
        result.best_energy = state.energy();
        result.best_factors = state.factors();
        result.mcs1 = t;
      }
      if (state.mismatches() == 0) {
        result.mcs0 = t;
        result.stopped = StopReason::Solved;
        break;
      }
    }
    result.acceptances += accepted_this_mcs;
    if (result.solved()) break;

    if (config.mode == Mode::RLU) {
      state.grow_violated_penalties(config.lambda_cap);
    } else if (config.refresh_every > 0 && t % config.refresh_every == 0) {
      state.refresh_energy();
    }

    stall = accepted_this_mcs == 0 ? stall + 1 : 0;
    if (sched.stall_limit_mcs > 0 && stall >= sched.stall_limit_mcs) {
      result.stopped = StopReason::Stalled;
      if (config.trace_every > 0) sample(t);
      break;
    }
    if (config.trace_every > 0 && t % config.trace_every == 0) sample(t);
    if ((t & 63) == 0 && out_of_time()) break;
  }

  result.total_mcs = t;
  result.final_beta = beta;
  result.final_max_lambda = state.penalty().max();
  if (config.trace_every > 0 && result.trace.back().mcs != t) sample(t);
  return result;
}

void write_trace_csv(std::ostream& out, std::span<const TracePoint> trace) {
  out << "mcs,energy,mismatches,beta,max_lambda\n";
  out.precision(17);
  for (const auto& p : trace) {
    out << p.mcs << ',' << p.energy << ',' << p.mismatches << ',' << p.beta << ',' << p.max_lambda << '\n';
  }
}

}  // namespace boolmf
