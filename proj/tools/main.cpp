// boolmf: planted instances, annealer runs, sweeps and MovieLens reports.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "boolmf/annealer.hpp"
#include "boolmf/binmat.hpp"
#include "boolmf/energy.hpp"
#include "boolmf/evaluation.hpp"
#include "boolmf/ingest.hpp"
#include "boolmf/instgen.hpp"
#include "boolmf/random.hpp"
#include "boolmf/stats.hpp"
#include "boolmf/sweep.hpp"

namespace fs = std::filesystem;
using namespace boolmf;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

// "0..50", "0..50:5" or "1,2,8".
std::vector<std::size_t> parse_range(const std::string& text) {
  std::vector<std::size_t> out;
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) out.push_back(std::stoull(item));
  } else {
    const auto colon = text.find(':', dots);
    const std::size_t lo = std::stoull(text.substr(0, dots));
    const std::size_t hi = std::stoull(text.substr(dots + 2, colon - dots - 2));
    const std::size_t step = colon == std::string::npos ? 1 : std::stoull(text.substr(colon + 1));
    if (step == 0 || hi < lo) throw std::invalid_argument("bad range '" + text + "'");
    for (std::size_t d = lo; d <= hi; d += step) out.push_back(d);
  }
  if (out.empty()) throw std::invalid_argument("empty range '" + text + "'");
  return out;
}

struct SolverFlags {
  std::string mode = "rl-u";
  std::size_t k = 8;
  double beta0 = 2.0;
  double beta_f = 0.1;
  double lambda0 = 2.0;
  double lambda_p = 0.01;
  double lambda_cap = 1e12;
  std::uint64_t max_mcs = 200000;
  std::uint64_t accepts = 1000;
  std::uint64_t stall = 1000;
  std::string target = "exact";
  std::string init = "random";
  std::string sweep = "spins";

  void add(CLI::App& app) {
    app.add_option("--mode", mode, "bc, rl-f or rl-u")->capture_default_str();
    app.add_option("--k", k, "Factor rank")->capture_default_str();
    app.add_option("--beta0", beta0, "Initial inverse temperature")->capture_default_str();
    app.add_option("--betaf", beta_f, "Inverse temperature growth per update")->capture_default_str();
    app.add_option("--lambda0", lambda0, "Initial penalty weight")->capture_default_str();
    app.add_option("--lambdap", lambda_p, "Penalty growth rate (rl-u)")->capture_default_str();
    app.add_option("--lambda-cap", lambda_cap, "Upper bound on penalty weights")->capture_default_str();
    app.add_option("--max-mcs", max_mcs, "MCS budget")->capture_default_str();
    app.add_option("--accepts-per-update", accepts, "Acceptances between temperature updates")
        ->capture_default_str();
    app.add_option("--stall-limit", stall, "Consecutive MCS without acceptance before stopping (0 = off)")
        ->capture_default_str();
    app.add_option("--target", target, "exact or best")
        ->check(CLI::IsMember({"exact", "best"}))
        ->capture_default_str();
    app.add_option("--init", init, "random or zero")->check(CLI::IsMember({"random", "zero"}))->capture_default_str();
    app.add_option("--sweep", sweep, "spins (M*K+K*N attempts per MCS) or cells (M*N)")
        ->check(CLI::IsMember({"spins", "cells"}))
        ->capture_default_str();
  }

  SolverConfig config(std::uint64_t seed) const {
    SolverConfig c;
    c.mode = parse_mode(mode);
    c.rank = k;
    c.schedule.beta0 = beta0;
    c.schedule.beta_f = beta_f;
    c.schedule.accepts_per_update = accepts;
    c.schedule.stall_limit_mcs = stall;
    c.lambda0 = lambda0;
    c.lambda_p = lambda_p;
    c.lambda_cap = lambda_cap;
    c.max_mcs = max_mcs;
    c.seed = seed;
    c.target = target == "best" ? Target::BestWithinBudget : Target::ExactZero;
    c.init = init == "zero" ? InitKind::Zero : InitKind::Random;
    c.sweep = sweep == "cells" ? SweepKind::Cells : SweepKind::Spins;
    c.validate();
    return c;
  }
};

struct GenFlags {
  std::size_t m = 30;
  std::size_t n = 30;
  std::size_t k = 8;
  double rho = 0.1;
  double rho_tol = 0.01;
  double miss = 0.0;

  void add(CLI::App& app, bool with_k = true) {
    app.add_option("--m", m, "Rows")->capture_default_str();
    app.add_option("--n", n, "Columns")->capture_default_str();
    if (with_k) app.add_option("--k", k, "Planted rank")->capture_default_str();
    app.add_option("--rho", rho, "Target density")->capture_default_str();
    app.add_option("--rho-tol", rho_tol, "Density tolerance")->capture_default_str();
    app.add_option("--miss", miss, "Fraction of cells to hide")->capture_default_str();
  }

  GeneratorConfig config(std::uint64_t seed) const {
    GeneratorConfig g;
    g.m = m;
    g.n = n;
    g.rank = k;
    g.rho = rho;
    g.rho_tol = rho_tol;
    g.miss_ratio = miss;
    g.seed = seed;
    return g;
  }
};

RawRow row_for(const SolverConfig& c, const RunResult& res) {
  RawRow r;
  r.mode = c.mode;
  r.rank = c.rank;
  r.beta0 = c.schedule.beta0;
  r.beta_f = c.schedule.beta_f;
  if (c.mode != Mode::BC) r.lambda0 = c.lambda0;
  if (c.mode == Mode::RLU) r.lambda_p = c.lambda_p;
  r.run_seed = c.seed;
  r.status = std::string(to_string(res.stopped));
  r.mcs0 = res.mcs0;
  r.mcs1 = res.mcs1;
  r.total_mcs = res.total_mcs;
  r.best_mismatches = res.best_mismatches;
  r.best_energy = res.best_energy;
  return r;
}

// --- generate ---------------------------------------------------------------

struct GenerateCmd {
  GenFlags gen;
  std::uint64_t seed = 0;
  fs::path out;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("generate", "Sample a planted instance");
    gen.add(*app);
    app->add_option("--seed", seed, "Random seed")->required();
    app->add_option("--out", out, "Output stem; writes <stem>.txt, .truth.txt, .w.txt, .h.txt, .meta")->required();
    app->callback([this] { exec(); });
  }

  void exec() {
    const GeneratorConfig g = gen.config(seed);
    const PlantedInstance inst = generate(g);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    save_instance(out, inst, g);
    std::printf("generated %zux%zu K=%zu density=%.4f missing=%zu -> %s.txt\n", g.m, g.n, g.rank,
                inst.true_v.density(), inst.v.missing_count(), out.string().c_str());
  }
};

// --- solve ------------------------------------------------------------------

struct SolveCmd {
  SolverFlags solver;
  std::optional<fs::path> matrix;
  std::optional<fs::path> instance;
  std::uint64_t seed = 0;
  std::uint64_t trace_every = 0;
  fs::path out = "solve_out";

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("solve", "Run the annealer once");
    auto* src = app->add_option("--matrix", matrix, "Target matrix file ('?' marks missing cells)");
    app->add_option("--instance", instance, "Stem written by generate")->excludes(src);
    solver.add(*app);
    app->add_option("--seed", seed, "Run seed")->required();
    app->add_option("--trace-every", trace_every, "Write trace.csv sampled every this many MCS");
    app->add_option("--out", out, "Output directory")->capture_default_str();
    app->callback([this] { exec(); });
  }

  void exec() {
    if (!matrix && !instance) throw CLI::RequiredError("--matrix or --instance");
    const BinaryMatrix v = matrix ? load_matrix(*matrix) : load_instance(*instance).v;
    SolverConfig c = solver.config(seed);
    c.trace_every = trace_every;
    const RunResult res = run(v, c);

    fs::create_directories(out);
    RawRow row = row_for(c, res);
    row.rho = v.density();
    {
      auto f = open_out(out / "raw_results.csv");
      write_raw_csv(f, std::span(&row, 1));
    }
    save_matrix(out / "w.txt", res.best_factors.w());
    save_matrix(out / "h.txt", res.best_factors.h());
    if (trace_every > 0) {
      auto f = open_out(out / "trace.csv");
      write_trace_csv(f, res.trace);
    }
    std::printf("%s K=%zu %s mcs0=%s mcs1=%llu total_mcs=%llu mismatches=%lld acceptance=%.4f\n",
                std::string(to_string(c.mode)).c_str(), c.rank, std::string(to_string(res.stopped)).c_str(),
                res.mcs0 ? std::to_string(*res.mcs0).c_str() : "-", static_cast<unsigned long long>(res.mcs1),
                static_cast<unsigned long long>(res.total_mcs), static_cast<long long>(res.best_mismatches),
                res.attempts ? static_cast<double>(res.acceptances) / static_cast<double>(res.attempts) : 0.0);
  }
};

// --- sweep ------------------------------------------------------------------

struct SweepCmd {
  std::optional<fs::path> config;
  std::vector<std::string> settings;
  fs::path out = "sweep_out";
  bool quiet = false;

  // Every config key is also a flag; flags override the file.
  static inline const std::vector<std::string> kKeys{
      "m",         "n",         "k",          "rho",          "rho-tol",            "miss",
      "matrix",    "mode",      "beta0",      "betaf",        "lambda0",            "lambdap",
      "instances", "seeds",     "censor",     "max-mcs",      "wall-seconds",       "accepts-per-update",
      "stall-limit", "target",  "sweep",      "seed",         "threads"};
  std::vector<std::string> values = std::vector<std::string>(kKeys.size());

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("sweep", "Run a grid of annealer runs and summarize MCS statistics");
    app->add_option("--config", config, "key=value file")->check(CLI::ExistingFile);
    for (std::size_t i = 0; i < kKeys.size(); ++i) {
      app->add_option("--" + kKeys[i], values[i], "Overrides config key '" + kKeys[i] + "' (lists comma-separated)");
    }
    app->add_option("--set", settings, "Extra key=value overrides");
    app->add_option("--out", out, "Output directory")->capture_default_str();
    app->add_flag("--quiet", quiet, "No progress on stderr");
    app->callback([this] { exec(); });
  }

  void exec() {
    SweepSpec spec = config ? load_sweep_config(*config) : SweepSpec{};
    for (std::size_t i = 0; i < kKeys.size(); ++i) {
      if (!values[i].empty()) apply_sweep_setting(spec, kKeys[i], values[i]);
    }
    for (const auto& s : settings) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + s + "'");
      apply_sweep_setting(spec, s.substr(0, eq), s.substr(eq + 1));
    }
    spec.validate();

    ProgressFn progress;
    if (!quiet) {
      progress = [](std::size_t done, std::size_t total) {
        if (done == total || done % 50 == 0) std::fprintf(stderr, "\r%zu/%zu runs", done, total);
        if (done == total) std::fprintf(stderr, "\n");
      };
    }
    const SweepResult result = sweep(spec, progress);

    fs::create_directories(out);
    {
      auto f = open_out(out / "raw_results.csv");
      write_raw_csv(f, result.raw);
    }
    {
      auto f = open_out(out / "summary.csv");
      write_summary_csv(f, result.best);
    }
    {
      auto f = open_out(out / "grid.csv");
      write_summary_csv(f, result.points);
    }
    std::size_t solved = 0;
    for (const auto& r : result.raw) solved += r.mcs0.has_value();
    std::printf("%zu runs, %zu solved, %zu grid points, %zu summary rows -> %s\n", result.raw.size(), solved,
                result.points.size(), result.best.size(), out.string().c_str());
  }
};

// --- landscape --------------------------------------------------------------

struct LandscapeCmd {
  GenFlags gen;
  std::optional<fs::path> instance;
  std::string distances = "0..50";
  std::size_t samples = 50;
  double lambda = 1.0;
  std::uint64_t seed = 0;
  fs::path out = "landscape.csv";

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("landscape", "Energy of random perturbations of the planted factors");
    app->add_option("--instance", instance, "Stem written by generate; otherwise one is sampled");
    gen.add(*app);
    app->add_option("--distances", distances, "Hamming distances, 'a..b[:step]' or a list")->capture_default_str();
    app->add_option("--samples", samples, "Samples per distance")->capture_default_str();
    app->add_option("--lambda", lambda, "Uniform weight of the RL energy")->capture_default_str();
    app->add_option("--seed", seed, "Random seed")->required();
    app->add_option("--out", out, "Output CSV")->capture_default_str();
    app->callback([this] { exec(); });
  }

  void exec() {
    const PlantedInstance inst = instance ? load_instance(*instance) : generate(gen.config(derive_seed(seed, {0})));
    const std::vector<std::size_t> ds = parse_range(distances);
    const auto rows = landscape_probe(inst.planted, inst.v, ds, samples, derive_seed(seed, {1}), lambda);
    {
      auto f = open_out(out);
      write_landscape_csv(f, rows);
    }
    std::vector<double> x, bc, rl;
    for (const auto& r : rows) {
      x.push_back(static_cast<double>(r.distance));
      bc.push_back(static_cast<double>(r.bc_energy));
      rl.push_back(r.rl_energy);
    }
    std::printf("%zu samples, spearman(distance, bc)=%.4f spearman(distance, rl)=%.4f -> %s\n", rows.size(),
                spearman(x, bc), spearman(x, rl), out.string().c_str());
  }
};

// --- ingest -----------------------------------------------------------------

struct IngestCmd {
  fs::path ratings;
  IngestConfig cfg;
  bool one_pass = false;
  fs::path out = "ingest_out";

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("ingest", "Build a user x movie 0/1 matrix from a ratings CSV");
    app->add_option("--ratings", ratings, "ratings.csv (userId,movieId,rating,timestamp)")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--threshold", cfg.rating_threshold, "Ratings at or above this become 1")->capture_default_str();
    app->add_option("--user-max", cfg.user_id_max, "Largest userId kept")->capture_default_str();
    app->add_option("--movie-max", cfg.movie_id_max, "Largest movieId kept")->capture_default_str();
    app->add_option("--min-ones", cfg.min_ones, "Drop rows/columns with fewer ones")->capture_default_str();
    app->add_flag("--one-pass", one_pass, "One row pass and one column pass instead of iterating to a fixed point");
    app->add_option("--out", out, "Output directory (v.txt, rows.csv, cols.csv)")->capture_default_str();
    app->callback([this] { exec(); });
  }

  void exec() {
    cfg.filter = one_pass ? FilterKind::OnePass : FilterKind::FixedPoint;
    cfg.validate();
    const RatingsTable table = RatingsTable::load_csv(ratings, cfg.window());
    const IngestResult res = build_matrix(table, cfg);
    fs::create_directories(out);
    save_matrix(out / "v.txt", res.v);
    {
      auto f = open_out(out / "rows.csv");
      write_id_map(f, "userId", res.row_users);
    }
    {
      auto f = open_out(out / "cols.csv");
      write_id_map(f, "movieId", res.col_movies);
    }
    std::printf("%zu ratings kept, matrix %zux%zu density=%.4f -> %s\n", table.size(), res.v.rows(), res.v.cols(),
                res.v.density(), (out / "v.txt").string().c_str());
  }
};

// --- eval-missing -----------------------------------------------------------

struct EvalCmd {
  SolverFlags solver;
  GenFlags gen;
  std::optional<fs::path> matrix;
  std::vector<std::string> modes{"bc", "rl-f", "rl-u"};
  std::size_t instances = 10;
  std::size_t fills = 100;
  std::uint64_t seed = 0;
  fs::path out = "report.csv";

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("eval-missing", "Hide cells, fit, and score the reconstruction at hidden cells");
    app->add_option("--matrix", matrix, "Fully observed matrix to mask; otherwise planted instances are sampled");
    gen.add(*app, false);
    solver.add(*app);
    app->add_option("--modes", modes, "Modes to evaluate")->capture_default_str();
    app->add_option("--instances", instances, "Planted instances (ignored with --matrix)")->capture_default_str();
    app->add_option("--random-fills", fills, "Bernoulli fills averaged for the random baseline")
        ->capture_default_str();
    app->add_option("--seed", seed, "Random seed")->required();
    app->add_option("--out", out, "Report CSV")->capture_default_str();
    app->callback([this] { exec(); });
  }

  void exec() {
    if (!(gen.miss > 0.0)) throw std::invalid_argument("eval-missing needs --miss > 0");
    struct Case {
      BinaryMatrix truth;
      BinaryMatrix masked;
      double rho;
      std::string id;
    };
    std::vector<Case> cases;
    if (matrix) {
      const BinaryMatrix truth = load_matrix(*matrix);
      if (truth.has_mask()) throw std::invalid_argument("eval-missing: --matrix must be fully observed");
      cases.push_back({truth, apply_mask(truth, gen.miss, derive_seed(seed, {0})), truth.density(),
                       matrix->filename().string()});
    } else {
      GenFlags g = gen;
      g.k = solver.k;
      for (std::size_t i = 0; i < instances; ++i) {
        PlantedInstance inst = generate(g.config(derive_seed(seed, {1, i})));
        cases.push_back({inst.true_v, inst.v, g.rho, "planted-" + std::to_string(i)});
      }
    }

    std::vector<ReportRow> rows;
    for (const auto& name : modes) {
      SolverFlags f = solver;
      f.mode = name;
      f.target = "best";
      std::vector<double> est;
      for (std::size_t i = 0; i < cases.size(); ++i) {
        const Case& cs = cases[i];
        const std::uint64_t run_seed = derive_seed(seed, {2, i});
        const RunResult res = best_local_search(cs.masked, f.config(run_seed), f.max_mcs);
        ReportRow row;
        row.report = evaluate_missing(cs.truth, cs.masked, res, cs.rho, derive_seed(seed, {3, i}), fills);
        row.report.method = std::string(to_string(parse_mode(name)));
        row.seed = run_seed;
        row.instance_id = cs.id;
        est.push_back(row.report.error_estimated);
        rows.push_back(std::move(row));
      }
      std::printf("%s: median error_estimated=%.2f over %zu\n", row_mode(name).c_str(), median_iqr(est).median,
                  est.size());
    }
    auto f = open_out(out);
    write_report_csv(f, rows);
    std::vector<double> zero, random;
    for (const auto& r : rows) {
      zero.push_back(r.report.error_zero);
      random.push_back(r.report.error_random);
    }
    std::printf("baselines: median error_zero=%.2f error_random=%.2f -> %s\n", median_iqr(zero).median,
                median_iqr(random).median, out.string().c_str());
  }

  static std::string row_mode(const std::string& name) { return std::string(to_string(parse_mode(name))); }
};

// --- hamming ----------------------------------------------------------------

struct HammingCmd {
  fs::path factor;
  bool columns = false;
  std::optional<std::size_t> anchor;
  std::int32_t radius = 0;
  std::optional<fs::path> matrix;
  std::optional<fs::path> cols_map;
  std::optional<fs::path> movies;
  fs::path out = "hamming_out";

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("hamming", "Row distances of a factor, plus group and column-support reports");
    app->add_option("--factor", factor, "Factor matrix file (rows are compared)")->required()->check(CLI::ExistingFile);
    app->add_flag("--columns", columns, "Compare columns instead (e.g. of H)");
    app->add_option("--anchor", anchor, "Row whose group is reported");
    app->add_option("--radius", radius, "Group radius")->capture_default_str();
    app->add_option("--matrix", matrix, "Target matrix for the column-support report")->check(CLI::ExistingFile);
    app->add_option("--cols", cols_map, "cols.csv from ingest (column -> movieId)")->check(CLI::ExistingFile);
    app->add_option("--movies", movies, "movies.csv for genre tags")->check(CLI::ExistingFile);
    app->add_option("--out", out, "Output directory")->capture_default_str();
    app->callback([this] { exec(); });
  }

  static BinaryMatrix transpose(const BinaryMatrix& a) {
    BinaryMatrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
      for (std::size_t j = 0; j < a.cols(); ++j) t.set(j, i, a(i, j) != 0);
    }
    return t;
  }

  static std::vector<std::int64_t> read_id_map(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string line;
    std::getline(in, line);
    std::vector<std::int64_t> ids;
    while (std::getline(in, line)) {
      if (line.empty() || line == "\r") continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw std::runtime_error(path.string() + ": malformed line '" + line + "'");
      ids.push_back(std::stoll(line.substr(comma + 1)));
    }
    return ids;
  }

  void exec() {
    BinaryMatrix f = load_matrix(factor);
    if (columns) f = transpose(f);
    const IntMatrix d = hamming_rows(f);
    fs::create_directories(out);
    {
      auto o = open_out(out / "hamming.csv");
      o << "row_a,row_b,distance\n";
      for (std::size_t a = 0; a < d.rows(); ++a) {
        for (std::size_t b = 0; b < d.cols(); ++b) o << a << ',' << b << ',' << d(a, b) << '\n';
      }
    }
    if (!anchor) {
      std::printf("%zu rows compared -> %s\n", d.rows(), (out / "hamming.csv").string().c_str());
      return;
    }
    const std::vector<std::size_t> group = group_members(d, *anchor, radius);
    {
      auto o = open_out(out / "group.csv");
      o << "row\n";
      for (std::size_t r : group) o << r << '\n';
    }
    if (matrix) {
      const BinaryMatrix v = load_matrix(*matrix);
      std::vector<std::int64_t> ids;
      if (cols_map) {
        ids = read_id_map(*cols_map);
      } else {
        for (std::size_t j = 0; j < v.cols(); ++j) ids.push_back(static_cast<std::int64_t>(j));
      }
      std::optional<GenreTable> genres;
      if (movies) genres = GenreTable::load_csv(*movies);
      auto o = open_out(out / "support.csv");
      write_support_csv(o, column_support(v, group), ids, genres ? &*genres : nullptr);
    }
    std::printf("%zu rows compared, group of row %zu within %d: %zu rows -> %s\n", d.rows(), *anchor, radius,
                group.size(), out.string().c_str());
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boolean matrix factorization by simulated annealing"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "boolmf 0.1.0");

  GenerateCmd generate_cmd;
  SolveCmd solve_cmd;
  SweepCmd sweep_cmd;
  LandscapeCmd landscape_cmd;
  IngestCmd ingest_cmd;
  EvalCmd eval_cmd;
  HammingCmd hamming_cmd;
  generate_cmd.add(app);
  solve_cmd.add(app);
  sweep_cmd.add(app);
  landscape_cmd.add(app);
  ingest_cmd.add(app);
  eval_cmd.add(app);
  hamming_cmd.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "boolmf: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
