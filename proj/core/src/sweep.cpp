#include "boolmf/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "boolmf/instgen.hpp"
#include "boolmf/random.hpp"
#include "number_format.hpp"

namespace boolmf {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) throw std::invalid_argument("empty list value");
  return out;
}

double to_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

std::uint64_t to_u64(const std::string& s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw std::invalid_argument("not a count: '" + s + "'");
  return v;
}

std::vector<double> to_doubles(const std::string& value) {
  std::vector<double> out;
  for (const auto& item : split_list(value)) out.push_back(to_double(item));
  return out;
}

std::string fmt(double x) { return detail::format_number(x); }

std::string fmt(const std::optional<double>& x) { return x ? fmt(*x) : std::string(); }

}  // namespace

void SweepSpec::validate() const {
  if (!matrix_file && (m < 1 || n < 1)) throw std::invalid_argument("sweep: M and N must be positive");
  if (ranks.empty() || rhos.empty() || modes.empty() || beta0s.empty() || beta_fs.empty() || lambda0s.empty() ||
      lambda_ps.empty()) {
    throw std::invalid_argument("sweep: every grid must be nonempty");
  }
  if (instances < 1 || seeds < 1) throw std::invalid_argument("sweep: instances and seeds must be positive");
  if (censor_fraction && !(*censor_fraction > 0.0 && *censor_fraction <= 1.0)) {
    throw std::invalid_argument("sweep: censor fraction must lie in (0, 1]");
  }
}

void apply_sweep_setting(SweepSpec& spec, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key == "m") {
    spec.m = to_u64(value);
  } else if (key == "n") {
    spec.n = to_u64(value);
  } else if (key == "k") {
    spec.ranks.clear();
    for (const auto& item : split_list(value)) spec.ranks.push_back(to_u64(item));
  } else if (key == "rho") {
    spec.rhos = to_doubles(value);
  } else if (key == "rho-tol") {
    spec.rho_tol = to_double(value);
  } else if (key == "miss") {
    spec.miss = to_double(value);
  } else if (key == "matrix") {
    spec.matrix_file = value;
  } else if (key == "mode") {
    spec.modes.clear();
    for (const auto& item : split_list(value)) spec.modes.push_back(parse_mode(item));
  } else if (key == "beta0") {
    spec.beta0s = to_doubles(value);
  } else if (key == "betaf") {
    spec.beta_fs = to_doubles(value);
  } else if (key == "lambda0") {
    spec.lambda0s = to_doubles(value);
  } else if (key == "lambdap") {
    spec.lambda_ps = to_doubles(value);
  } else if (key == "instances") {
    spec.instances = to_u64(value);
  } else if (key == "seeds") {
    spec.seeds = to_u64(value);
  } else if (key == "censor") {
    spec.censor_fraction = to_double(value);
  } else if (key == "max-mcs") {
    spec.max_mcs = to_u64(value);
  } else if (key == "wall-seconds") {
    spec.wall_seconds = to_double(value);
  } else if (key == "accepts-per-update") {
    spec.accepts_per_update = to_u64(value);
  } else if (key == "stall-limit") {
    spec.stall_limit_mcs = to_u64(value);
  } else if (key == "target") {
    if (value == "exact-zero" || value == "exact") {
      spec.target = Target::ExactZero;
    } else if (value == "best-within-budget" || value == "best") {
      spec.target = Target::BestWithinBudget;
    } else {
      throw std::invalid_argument("target must be exact-zero or best-within-budget");
    }
  } else if (key == "sweep") {
    if (value == "spins") {
      spec.sweep = SweepKind::Spins;
    } else if (value == "cells") {
      spec.sweep = SweepKind::Cells;
    } else {
      throw std::invalid_argument("sweep must be spins or cells");
    }
  } else if (key == "seed") {
    spec.master_seed = to_u64(value);
  } else if (key == "threads") {
    spec.threads = to_u64(value);
  } else {
    throw std::invalid_argument("unknown sweep setting '" + key + "'");
  }
}

SweepSpec parse_sweep_config(std::istream& in) {
  SweepSpec spec;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("sweep config line " + std::to_string(line_no) + ": expected key=value");
    }
    try {
      apply_sweep_setting(spec, line.substr(0, eq), line.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("sweep config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  spec.validate();
  return spec;
}

SweepSpec load_sweep_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sweep config " + path.string());
  return parse_sweep_config(in);
}

double RawRow::metric(Target target) const {
  if (target == Target::BestWithinBudget) return static_cast<double>(mcs1);
  return mcs0 ? static_cast<double>(*mcs0) : std::numeric_limits<double>::infinity();
}

std::uint64_t instance_seed(std::uint64_t master, std::size_t m, std::size_t n, std::size_t rank, double rho,
                            std::size_t instance) {
  return derive_seed(master, {1, m, n, rank, std::bit_cast<std::uint64_t>(rho), instance});
}

std::uint64_t run_seed(std::uint64_t master, std::size_t m, std::size_t n, std::size_t rank, double rho,
                       std::size_t instance, std::size_t seed_index) {
  return derive_seed(master, {2, m, n, rank, std::bit_cast<std::uint64_t>(rho), instance, seed_index});
}

namespace {

struct Job {
  RawRow row;
  const BinaryMatrix* v = nullptr;
};

}  // namespace

SweepResult sweep(const SweepSpec& spec, const ProgressFn& progress) {
  spec.validate();

  std::optional<BinaryMatrix> fixed;
  std::vector<double> rhos = spec.rhos;
  std::size_t instances = spec.instances;
  std::size_t m = spec.m;
  std::size_t n = spec.n;
  if (spec.matrix_file) {
    fixed = load_matrix(*spec.matrix_file);
    rhos = {fixed->density()};
    instances = 1;
    m = fixed->rows();
    n = fixed->cols();
  }

  // Instances are generated once and shared by every grid point.
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, BinaryMatrix> pool;
  for (std::size_t ki = 0; ki < spec.ranks.size(); ++ki) {
    for (std::size_t ri = 0; ri < rhos.size(); ++ri) {
      for (std::size_t inst = 0; inst < instances; ++inst) {
        if (fixed) {
          pool.emplace(std::tuple{ki, ri, inst}, *fixed);
          continue;
        }
        GeneratorConfig g;
        g.m = m;
        g.n = n;
        g.rank = spec.ranks[ki];
        g.rho = rhos[ri];
        g.rho_tol = spec.rho_tol;
        g.miss_ratio = spec.miss;
        g.seed = instance_seed(spec.master_seed, m, n, g.rank, g.rho, inst);
        pool.emplace(std::tuple{ki, ri, inst}, generate(g).v);
      }
    }
  }

  std::vector<Job> jobs;
  for (Mode mode : spec.modes) {
    const std::vector<std::optional<double>> l0s = [&] {
      std::vector<std::optional<double>> out;
      if (mode == Mode::BC) return std::vector<std::optional<double>>{std::nullopt};
      for (double x : spec.lambda0s) out.emplace_back(x);
      return out;
    }();
    const std::vector<std::optional<double>> lps = [&] {
      std::vector<std::optional<double>> out;
      if (mode != Mode::RLU) return std::vector<std::optional<double>>{std::nullopt};
      for (double x : spec.lambda_ps) out.emplace_back(x);
      return out;
    }();
    for (std::size_t ki = 0; ki < spec.ranks.size(); ++ki) {
      for (std::size_t ri = 0; ri < rhos.size(); ++ri) {
        for (double b0 : spec.beta0s) {
          for (double bf : spec.beta_fs) {
            for (const auto& l0 : l0s) {
              for (const auto& lp : lps) {
                for (std::size_t inst = 0; inst < instances; ++inst) {
                  for (std::size_t s = 0; s < spec.seeds; ++s) {
                    Job job;
                    job.v = &pool.at(std::tuple{ki, ri, inst});
                    RawRow& r = job.row;
                    r.mode = mode;
                    r.rank = spec.ranks[ki];
                    r.rho = rhos[ri];
                    r.beta0 = b0;
                    r.beta_f = bf;
                    r.lambda0 = l0;
                    r.lambda_p = lp;
                    r.instance = inst;
                    r.seed_index = s;
                    r.run_seed = run_seed(spec.master_seed, m, n, r.rank, r.rho, inst, s);
                    jobs.push_back(std::move(job));
                  }
                }
              }
            }
          }
        }
      }
    }
  }

  auto execute = [&spec](Job& job) {
    RawRow& r = job.row;
    SolverConfig c;
    c.mode = r.mode;
    c.rank = r.rank;
    c.schedule.beta0 = r.beta0;
    c.schedule.beta_f = r.beta_f;
    c.schedule.accepts_per_update = spec.accepts_per_update;
    c.schedule.stall_limit_mcs = spec.stall_limit_mcs;
    c.lambda0 = r.lambda0.value_or(1.0);
    c.lambda_p = r.lambda_p.value_or(0.0);
    c.max_mcs = spec.max_mcs;
    c.wall_seconds = spec.wall_seconds;
    c.seed = r.run_seed;
    c.target = spec.target;
    c.sweep = spec.sweep;
    try {
      const RunResult res = run(*job.v, c);
      r.status = std::string(to_string(res.stopped));
      r.mcs0 = res.mcs0;
      r.mcs1 = res.mcs1;
      r.total_mcs = res.total_mcs;
      r.best_mismatches = res.best_mismatches;
      r.best_energy = res.best_energy;
    } catch (const std::exception&) {
      r.status = "error";
      r.mcs0.reset();
    }
  };

  const std::size_t workers =
      std::max<std::size_t>(1, spec.threads > 0 ? spec.threads : std::thread::hardware_concurrency());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (std::size_t idx = next++; idx < jobs.size(); idx = next++) {
      execute(jobs[idx]);
      const std::size_t d = ++done;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(d, jobs.size());
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < std::min(workers, jobs.size()); ++w) threads.emplace_back(worker);
  }

  SweepResult result;
  result.raw.reserve(jobs.size());
  for (auto& job : jobs) result.raw.push_back(std::move(job.row));
  summarize(spec, result);
  return result;
}

void summarize(const SweepSpec& spec, SweepResult& result) {
  using PointKey = std::tuple<Mode, std::size_t, double, std::optional<double>, std::optional<double>, double, double>;
  std::vector<PointKey> order;
  std::map<PointKey, std::vector<const RawRow*>> groups;
  for (const auto& r : result.raw) {
    PointKey key{r.mode, r.rank, r.rho, r.lambda0, r.lambda_p, r.beta0, r.beta_f};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&r);
  }

  result.points.clear();
  result.best.clear();
  for (const auto& key : order) {
    const auto& rows = groups.at(key);
    SummaryRow s;
    std::tie(s.mode, s.rank, s.rho, s.lambda0, s.lambda_p, s.beta0, s.beta_f) = key;
    s.runs = rows.size();
    std::vector<double> values;
    std::size_t solved = 0;
    for (const auto* r : rows) {
      values.push_back(r->metric(spec.target));
      solved += r->mcs0.has_value();
    }
    s.solve_rate = static_cast<double>(solved) / static_cast<double>(rows.size());
    if (spec.censor_fraction) {
      values = censor_smallest(values, *spec.censor_fraction);
      s.censored = true;
    }
    s.kept = values.size();
    s.stats = median_iqr(values);
    result.points.push_back(s);
  }

  using BestKey = std::tuple<Mode, std::size_t, double, std::optional<double>, std::optional<double>>;
  std::vector<BestKey> best_order;
  std::map<BestKey, SummaryRow> best;
  for (const auto& s : result.points) {
    BestKey key{s.mode, s.rank, s.rho, s.lambda0, s.lambda_p};
    auto it = best.find(key);
    if (it == best.end()) {
      best.emplace(key, s);
      best_order.push_back(key);
    } else if (std::tie(s.stats.median, s.stats.q3) < std::tie(it->second.stats.median, it->second.stats.q3)) {
      it->second = s;
    }
  }
  for (const auto& key : best_order) result.best.push_back(best.at(key));
}

void write_raw_csv(std::ostream& out, std::span<const RawRow> rows) {
  out << "mode,K,rho,beta0,beta_f,lambda0,lambda_p,instance,seed_index,run_seed,status,mcs0,mcs1,total_mcs,"
         "best_mismatches,best_energy\n";
  for (const auto& r : rows) {
    out << to_string(r.mode) << ',' << r.rank << ',' << fmt(r.rho) << ',' << fmt(r.beta0) << ',' << fmt(r.beta_f)
        << ',' << fmt(r.lambda0) << ',' << fmt(r.lambda_p) << ',' << r.instance << ',' << r.seed_index << ','
        << r.run_seed << ',' << r.status << ',' << (r.mcs0 ? std::to_string(*r.mcs0) : std::string()) << ','
        << r.mcs1 << ',' << r.total_mcs << ',' << r.best_mismatches << ',' << fmt(r.best_energy) << '\n';
  }
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
  out << "mode,K,rho,lambda0,lambda_p,beta0,beta_f,runs,kept,solve_rate,median,q1,q3,censored\n";
  for (const auto& s : rows) {
    out << to_string(s.mode) << ',' << s.rank << ',' << fmt(s.rho) << ',' << fmt(s.lambda0) << ','
        << fmt(s.lambda_p) << ',' << fmt(s.beta0) << ',' << fmt(s.beta_f) << ',' << s.runs << ',' << s.kept << ','
        << fmt(s.solve_rate) << ',' << fmt(s.stats.median) << ',' << fmt(s.stats.q1) << ',' << fmt(s.stats.q3) << ','
        << (s.censored ? 1 : 0) << '\n';
  }
}

}  // namespace boolmf
