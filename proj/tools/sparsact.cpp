#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "sparsact/io.hpp"
#include "sparsact/mm_solver.hpp"
#include "sparsact/problems.hpp"
#include "sparsact/selection.hpp"

namespace {

using namespace sparsact;

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

LogLevel log_level() {
  const char* env = std::getenv("SPARSACT_LOG");
  if (!env) return LogLevel::Info;
  const std::string v(env);
  if (v == "error") return LogLevel::Error;
  if (v == "debug") return LogLevel::Debug;
  return LogLevel::Info;
}

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::Info) std::cerr << "[info] " << msg << "\n";
}

void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::Debug) std::cerr << "[debug] " << msg << "\n";
}

std::vector<double> parse_gamma_grid(const std::string& spec) {
  // LO:HI:COUNT, log-spaced inclusive.
  const auto a = spec.find(':');
  const auto b = spec.find(':', a == std::string::npos ? a : a + 1);
  if (a == std::string::npos || b == std::string::npos) {
    throw std::invalid_argument("--gamma-grid expects LO:HI:COUNT");
  }
  const double lo = std::stod(spec.substr(0, a));
  const double hi = std::stod(spec.substr(a + 1, b - a - 1));
  const int count = std::stoi(spec.substr(b + 1));
  if (lo <= 0.0 || hi < lo || count < 1) {
    throw std::invalid_argument("--gamma-grid needs 0 < LO <= HI and COUNT >= 1");
  }
  std::vector<double> grid(count);
  if (count == 1) {
    grid[0] = lo;
    return grid;
  }
  const double step = (std::log(hi) - std::log(lo)) / (count - 1);
  for (int i = 0; i < count; ++i) grid[i] = std::exp(std::log(lo) + i * step);
  return grid;
}

struct CommonOpts {
  std::string problem_path;
  std::string out_dir = ".";
  double gamma = -1.0;
  std::string gamma_grid;
  double eps = 1e-4;
  double eps_p = 1e-2;
  double eps_d = 1e-2;
  int reweight = 3;
  int jobs = 1;
  std::uint64_t seed = 1;
};

std::vector<double> resolve_gammas(const CommonOpts& opts) {
  if (!opts.gamma_grid.empty()) return parse_gamma_grid(opts.gamma_grid);
  if (opts.gamma >= 0.0) return {opts.gamma};
  return parse_gamma_grid("0.01:10:20");
}

std::filesystem::path out_path(const CommonOpts& opts, const std::string& name) {
  std::filesystem::create_directories(opts.out_dir);
  return std::filesystem::path(opts.out_dir) / name;
}

int emit_sweep(const CommonOpts& opts, const PlantModel& model,
               const std::vector<double>& gammas, const char* csv_name,
               std::vector<SelectionResult>* out_results = nullptr) {
  SweepOptions sweep;
  sweep.pg.eps = opts.eps;
  sweep.reweight_steps = opts.reweight;

  std::vector<SelectionResult> results;
  if (opts.jobs <= 1 || gammas.size() <= 1) {
    results = gamma_sweep(model, gammas, sweep);
  } else {
    // Each worker takes a contiguous chunk; warm starting stays within
    // a chunk so chunks are independent.
    const int jobs = std::min<int>(opts.jobs, static_cast<int>(gammas.size()));
    std::vector<std::vector<SelectionResult>> parts(jobs);
    std::vector<std::thread> workers;
    const std::size_t per = (gammas.size() + jobs - 1) / jobs;
    for (int t = 0; t < jobs; ++t) {
      const std::size_t lo = t * per;
      const std::size_t hi = std::min(gammas.size(), lo + per);
      if (lo >= hi) break;
      workers.emplace_back([&, t, lo, hi] {
        std::vector<double> chunk(gammas.begin() + lo, gammas.begin() + hi);
        parts[t] = gamma_sweep(model, chunk, sweep);
      });
    }
    for (auto& w : workers) w.join();
    for (auto& part : parts) {
      results.insert(results.end(), part.begin(), part.end());
    }
  }

  atomic_write(out_path(opts, csv_name), sweep_csv(results));
  bool any_failed = false;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    if (!r.error.empty() || r.status != SolveStatus::Converged) {
      any_failed = true;
    }
    char name[64];
    std::snprintf(name, sizeof(name), "iterations_gamma_%02zu.csv", i);
    atomic_write(out_path(opts, name), iteration_csv(r.history));
  }
  log_info("wrote " + std::string(csv_name) + " with " +
           std::to_string(results.size()) + " rows");
  if (out_results) *out_results = std::move(results);
  return any_failed ? 2 : 0;
}

int cmd_gen(const std::string& kind, const CommonOpts& opts, int n, int m,
            int p, const ShParams& sh, const std::string& mask,
            double density, const std::string& output) {
  ProblemFile file;
  if (kind == "swift-hohenberg") {
    ShParams params = sh;
    params.n = n;
    file.kind = "actuator";
    file.model = swift_hohenberg(params);
  } else if (kind == "random") {
    file.kind = "actuator";
    file.model = random_stable_model(opts.seed, n, m, p);
  } else if (kind == "completion") {
    MaskKind mk = MaskKind::Diagonal;
    if (mask == "full") mk = MaskKind::Full;
    else if (mask == "random") mk = MaskKind::RandomSym;
    else if (mask != "diagonal") {
      throw std::invalid_argument("--mask must be diagonal, full, or random");
    }
    const CompletionInstance inst =
        synthetic_completion(opts.seed, n, mk, density);
    file.kind = "completion";
    file.model = inst.model;
    file.data = inst.data;
  } else {
    throw std::invalid_argument(
        "gen kind must be swift-hohenberg, random, or completion");
  }
  write_problem(out_path(opts, output), file);
  log_info("wrote " + output);
  return 0;
}

int cmd_actuator(const CommonOpts& opts) {
  const ProblemFile file = read_problem(opts.problem_path);
  if (file.kind != "actuator") {
    throw ProblemFormatError("expected kind=actuator, got " + file.kind);
  }
  return emit_sweep(opts, file.model, resolve_gammas(opts), "sweep.csv");
}

int cmd_complete(const CommonOpts& opts) {
  const ProblemFile file = read_problem(opts.problem_path);
  if (file.kind != "completion" || !file.data) {
    throw ProblemFormatError("expected kind=completion with E and G present");
  }
  const double gamma = opts.gamma >= 0.0 ? opts.gamma : 0.0;

  if (file.data->E.cwiseAbs().sum() == 0.0) {
    std::cerr << "[warn] mask E is all zero: constraint is vacuous, "
                 "running plain proximal gradient\n";
    PgOptions pg;
    pg.gamma = gamma;
    pg.eps = opts.eps;
    const SolveReport report = pg_solve(file.model, pg);
    atomic_write(out_path(opts, "outer.csv"), outer_csv({}));
    atomic_write(out_path(opts, "solution.json"),
                 solution_json(report.X, report.Y, report.K));
    return report.status == SolveStatus::Converged ? 0 : 2;
  }

  MmOptions options;
  options.gamma = gamma;
  options.eps_p = opts.eps_p;
  options.eps_d = opts.eps_d;
  options.inner.eps = opts.eps;

  MmReport report;
  try {
    report = mm_solve(file.model, *file.data, options);
  } catch (const SingularOperatorError& e) {
    std::cerr << "error: " << e.what()
              << "\nhint: X(Y) requires AX + XA* to be invertible; shift or "
                 "perturb A so no two eigenvalues are mirrored across the "
                 "imaginary axis\n";
    return 2;
  }
  atomic_write(out_path(opts, "outer.csv"), outer_csv(report.history));
  atomic_write(out_path(opts, "solution.json"),
               solution_json(report.X, report.Y, report.K));
  const double g_norm = file.data->G.norm();
  const double rel = g_norm > 0.0 ? report.delta_p / g_norm : report.delta_p;
  std::cout << "delta_p/||G||_F = " << rel << ", delta_d = " << report.delta_d
            << ", outer iterations = " << report.outer_iters << "\n";
  return report.status == SolveStatus::Converged ? 0 : 2;
}

int cmd_sensor(const CommonOpts& opts) {
  const ProblemFile file = read_problem(opts.problem_path);
  if (file.kind != "sensor") {
    throw ProblemFormatError("expected kind=sensor, got " + file.kind);
  }
  // Sensor files carry A_s in A, C in C, V_d in V, V_eta in R.
  const PlantModel dual =
      sensor_dual(file.model.A, file.model.C, file.model.V, file.model.R);
  std::vector<SelectionResult> results;
  const int code =
      emit_sweep(opts, dual, resolve_gammas(opts), "sweep.csv", &results);
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].error.empty()) continue;
    const CMatrix L = results[i].K.adjoint();
    char name[64];
    std::snprintf(name, sizeof(name), "observer_gamma_%02zu.json", i);
    atomic_write(out_path(opts, name),
                 solution_json(results[i].X, results[i].Y, L));
  }
  return code;
}

int cmd_greedy(const CommonOpts& opts) {
  const ProblemFile file = read_problem(opts.problem_path);
  if (file.kind != "actuator") {
    throw ProblemFormatError("expected kind=actuator, got " + file.kind);
  }
  const GreedyTrace trace = greedy_select(file.model);
  atomic_write(out_path(opts, "greedy.csv"), greedy_csv(trace));
  log_info("greedy removed " + std::to_string(trace.removal_order.size()) +
           " actuators");
  return 0;
}

int cmd_bench(const CommonOpts& opts, const std::vector<int>& sizes,
              int iters) {
  std::ostringstream os;
  os << "n,median_iteration_seconds\n";
  for (int n : sizes) {
    ShParams params;
    params.n = n;
    const PlantModel model = swift_hohenberg(params);
    PgOptions pg;
    pg.gamma = 1.0;
    pg.eps = 1e-12;  // keep iterating; the iteration cap stops the run
    pg.max_iters = iters;

    std::vector<double> times;
    auto last = std::chrono::steady_clock::now();
    const SolveReport report =
        pg_solve(model, pg, std::nullopt, [&](const IterationRecord&) {
          const auto now = std::chrono::steady_clock::now();
          times.push_back(std::chrono::duration<double>(now - last).count());
          last = now;
        });
    (void)report;
    std::sort(times.begin(), times.end());
    const double median = times.empty() ? 0.0 : times[times.size() / 2];
    os << n << ',' << median << '\n';
    log_debug("n=" + std::to_string(n) +
              " median=" + std::to_string(median) + "s");
  }
  atomic_write(out_path(opts, "bench.csv"), os.str());
  std::cout << os.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Row-sparse feedback synthesis and covariance completion"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string gen_kind, mask = "diagonal", output = "problem.json";
  int n = 32, m = 4, p = 4, bench_iters = 30;
  double density = 0.3;
  ShParams sh;
  std::vector<int> bench_sizes = {32, 64, 128};

  auto add_common = [&](CLI::App* cmd, bool needs_problem) {
    if (needs_problem) {
      cmd->add_option("problem", opts.problem_path, "problem JSON file")
          ->required();
    }
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--gamma", opts.gamma, "single regularization weight");
    cmd->add_option("--gamma-grid", opts.gamma_grid,
                    "log-spaced grid LO:HI:COUNT");
    cmd->add_option("--eps", opts.eps, "inner stopping tolerance");
    cmd->add_option("--eps-p", opts.eps_p, "primal tolerance (completion)");
    cmd->add_option("--eps-d", opts.eps_d, "dual tolerance (completion)");
    cmd->add_option("--reweight", opts.reweight, "reweighting rounds");
    cmd->add_option("--seed", opts.seed, "generator seed");
    cmd->add_option("--jobs", opts.jobs, "parallel sweep workers");
  };

  CLI::App* gen = app.add_subcommand("gen", "generate a problem file");
  gen->add_option("kind", gen_kind, "swift-hohenberg | random | completion")
      ->required();
  gen->add_option("--n", n, "state dimension / grid points");
  gen->add_option("--m", m, "inputs (random kind)");
  gen->add_option("--p", p, "outputs (random kind)");
  gen->add_option("--c", sh.c, "bifurcation parameter");
  gen->add_option("--alpha", sh.alpha, "modulation amplitude");
  gen->add_option("--omega", sh.omega, "modulation frequency");
  gen->add_option("--mask", mask, "diagonal | full | random");
  gen->add_option("--density", density, "off-diagonal mask density");
  gen->add_option("-o,--output", output, "output file name");
  add_common(gen, false);

  CLI::App* actuator = app.add_subcommand("actuator", "gamma sweep + polish");
  add_common(actuator, true);
  CLI::App* complete = app.add_subcommand("complete", "covariance completion");
  add_common(complete, true);
  CLI::App* sensor = app.add_subcommand("sensor", "sensor selection via dual");
  add_common(sensor, true);
  CLI::App* greedy = app.add_subcommand("greedy", "greedy removal baseline");
  add_common(greedy, true);
  CLI::App* bench = app.add_subcommand("bench", "per-iteration timing");
  bench->add_option("--sizes", bench_sizes, "problem sizes");
  bench->add_option("--iters", bench_iters, "iterations per size");
  add_common(bench, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      return cmd_gen(gen_kind, opts, n, m, p, sh, mask, density, output);
    }
    if (actuator->parsed()) return cmd_actuator(opts);
    if (complete->parsed()) return cmd_complete(opts);
    if (sensor->parsed()) return cmd_sensor(opts);
    if (greedy->parsed()) return cmd_greedy(opts);
    if (bench->parsed()) return cmd_bench(opts, bench_sizes, bench_iters);
  } catch (const ProblemFormatError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 3;
}
