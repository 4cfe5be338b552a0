// Command-line front end: solve the three-car example, sweep aggressiveness,
// run closed-loop races, and run the Monte Carlo study. Every invocation
// writes a manifest plus machine-readable CSV/JSON results into --out.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "gnep/io/csv.hpp"
#include "gnep/io/reports.hpp"
#include "gnep/newton.hpp"
#include "gnep/racing/config_io.hpp"
#include "gnep/racing/game.hpp"
#include "gnep/scenarios/monte_carlo.hpp"
#include "gnep/scenarios/one_d.hpp"
#include "gnep/scenarios/race.hpp"
#include "gnep/scenarios/sweep.hpp"
#include "gnep/version.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

struct CommonArgs {
  std::string out_dir = "gnep_out";
  std::uint64_t seed = 0;
  int jobs = 1;
};

class ManifestWriter {
 public:
  ManifestWriter(std::string subcommand, std::string out_dir)
      : subcommand_(std::move(subcommand)),
        out_dir_(std::move(out_dir)),
        start_(std::chrono::steady_clock::now()) {
    fs::create_directories(out_dir_);
  }

  void set_config(const std::string& path) { config_path_ = path; }
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void add_output(const std::string& rel_path) { outputs_.push_back(rel_path); }

  std::string path(const std::string& rel) {
    return (fs::path(out_dir_) / rel).string();
  }

  void finalize() {
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json j{
        {"subcommand", subcommand_},
        {"config", config_path_},
        {"seed", seed_},
        {"out_dir", out_dir_},
        {"tool_version", gnep::kVersion},
        {"duration_seconds", elapsed},
        {"outputs", outputs_},
    };
    gnep::io::write_json(j, path("manifest.json"));
  }

 private:
  std::string subcommand_;
  std::string out_dir_;
  std::string config_path_;
  std::uint64_t seed_ = 0;
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_;
};

int cmd_solve_1d(double a2, double a3, const CommonArgs& common, const std::string& trace_path) {
  if (a2 <= 0.0 || a3 <= 0.0) {
    std::fprintf(stderr, "error: scaling factors a2 and a3 must be strictly positive\n");
    return kExitUsage;
  }
  ManifestWriter manifest("solve-1d", common.out_dir);

  gnep::SolverConfig config;
  config.tol = 1e-10;
  const auto sol = gnep::scenarios::solve_1d(a2, a3, config);

  std::printf("status: %s (%d iterations)\n", gnep::to_string(sol.result.status),
              sol.result.iterations);
  std::printf("x     = (%.9g, %.9g, %.9g)\n", sol.positions[0], sol.positions[1],
              sol.positions[2]);
  std::printf("v     = (%.9g, %.9g, %.9g)\n", sol.velocities[0], sol.velocities[1],
              sol.velocities[2]);
  std::printf("sigma = %.9g\n", sol.sigma);
  std::printf("costs = (%.9g, %.9g, %.9g)\n", sol.costs[0], sol.costs[1], sol.costs[2]);

  json j{
      {"a2", a2},
      {"a3", a3},
      {"status", gnep::to_string(sol.result.status)},
      {"iterations", sol.result.iterations},
      {"x", {sol.positions[0], sol.positions[1], sol.positions[2]}},
      {"v", {sol.velocities[0], sol.velocities[1], sol.velocities[2]}},
      {"sigma", sol.sigma},
      {"costs", {sol.costs[0], sol.costs[1], sol.costs[2]}},
  };
  gnep::io::write_json(j, manifest.path("solution.json"));
  manifest.add_output("solution.json");

  if (!trace_path.empty()) {
    gnep::write_trace_csv(sol.result, manifest.path(trace_path));
    manifest.add_output(trace_path);
  }
  manifest.finalize();
  return sol.result.converged() ? kExitOk : kExitNumerical;
}

int cmd_sweep(const std::string& config_path, double alpha_min, double alpha_max, int alpha_count,
              bool linear, bool warm_start, const CommonArgs& common) {
  if (alpha_count < 1) {
    std::fprintf(stderr, "error: --alpha-count must be >= 1\n");
    return kExitUsage;
  }
  gnep::racing::ScenarioConfig sc;
  try {
    sc = gnep::racing::load_scenario_config(config_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }

  ManifestWriter manifest("sweep", common.out_dir);
  manifest.set_config(config_path);

  std::vector<double> alphas;
  if (linear) {
    alphas.resize(alpha_count);
    for (int i = 0; i < alpha_count; ++i) {
      alphas[i] = alpha_count == 1
                      ? alpha_min
                      : alpha_min + (alpha_max - alpha_min) * i / (alpha_count - 1);
    }
  } else {
    alphas = gnep::scenarios::log_spaced(alpha_min, alpha_max, alpha_count);
  }

  const auto builder =
      gnep::scenarios::make_racing_sweep_builder(sc.track, sc.cfg, sc.car1, sc.car2);
  const auto result = gnep::scenarios::alpha_sweep(builder, alphas, warm_start);

  gnep::io::CsvWriter csv({"alpha", "J1", "J2", "converged", "jump_flag"});
  int converged_count = 0;
  for (std::size_t i = 0; i < result.entries.size(); ++i) {
    const auto& e = result.entries[i];
    const bool jumped = i > 0 && std::find(result.jump_after.begin(), result.jump_after.end(),
                                           static_cast<int>(i) - 1) != result.jump_after.end();
    auto row = csv.row();
    row.add(e.alpha).add(e.costs[0]).add(e.costs[1]);
    row.add(static_cast<int>(e.converged)).add(static_cast<int>(jumped));
    csv.append(std::move(row));
    converged_count += e.converged;

    // Per-alpha planned trajectories for plotting.
    auto game = gnep::racing::build_racing_game(sc.track, sc.cfg, sc.car1, sc.car2, e.alpha);
    char name[64];
    std::snprintf(name, sizeof(name), "traj_%03zu.csv", i);
    gnep::io::trajectory_csv(game.plan(e.primal, 0), game.plan(e.primal, 1))
        .write(manifest.path(name));
    manifest.add_output(name);
  }
  csv.write(manifest.path("sweep.csv"));
  manifest.add_output("sweep.csv");
  manifest.finalize();

  std::printf("sweep: %d/%zu converged, %zu jump(s)\n", converged_count, result.entries.size(),
              result.jump_after.size());
  return converged_count > 0 ? kExitOk : kExitNumerical;
}

int cmd_race(const std::string& config_path, double ego_alpha, bool alpha_given,
             const CommonArgs& common) {
  gnep::racing::ScenarioConfig sc;
  try {
    sc = gnep::racing::load_scenario_config(config_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  ManifestWriter manifest("race", common.out_dir);
  manifest.set_config(config_path);

  gnep::scenarios::RaceScenario scenario;
  scenario.track = sc.track;
  scenario.cfg = sc.cfg;
  scenario.opponent = sc.car1;
  scenario.ego = sc.car2;
  scenario.ego_alpha = alpha_given ? ego_alpha : sc.alpha;
  scenario.duration = sc.race_duration;

  const auto outcome = gnep::scenarios::run_race(scenario);

  gnep::io::race_csv(outcome).write(manifest.path("race.csv"));
  manifest.add_output("race.csv");
  gnep::io::write_json(gnep::io::outcome_json(outcome), manifest.path("outcome.json"));
  manifest.add_output("outcome.json");
  manifest.finalize();

  std::printf("race: winner=%s collision=%d solver_failure=%d (ego %+.4f m)\n",
              gnep::io::winner_name(outcome.winner), outcome.collision, outcome.solver_failure,
              outcome.final_gap());
  return outcome.solver_failure ? kExitNumerical : kExitOk;
}

int cmd_mc(const std::string& config_path, int n, double ego_alpha, const CommonArgs& common) {
  if (n < 1) {
    std::fprintf(stderr, "error: --n must be >= 1\n");
    return kExitUsage;
  }
  gnep::racing::ScenarioConfig sc;
  try {
    sc = gnep::racing::load_scenario_config(config_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  ManifestWriter manifest("mc", common.out_dir);
  manifest.set_config(config_path);
  manifest.set_seed(common.seed);

  const auto report = gnep::scenarios::run_monte_carlo(sc.track, sc.cfg, n, common.seed,
                                                       ego_alpha, gnep::SolverConfig{},
                                                       common.jobs, sc.race_duration);

  gnep::io::write_json(gnep::io::mc_report_json(report), manifest.path("mc_report.json"));
  manifest.add_output("mc_report.json");
  gnep::io::mc_runs_csv(report).write(manifest.path("mc_runs.csv"));
  manifest.add_output("mc_runs.csv");
  manifest.finalize();

  std::printf("mc: n=%d ego_alpha=%g win%%=%.1f (wins=%d losses=%d collisions=%d failures=%d)\n",
              report.n, report.ego_alpha, report.win_percent, report.wins, report.losses,
              report.collisions, report.failures);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized Nash equilibrium solver with per-player scaling of "
               "shared-constraint multipliers"};
  app.require_subcommand(1);

  CommonArgs common;

  auto add_common = [&common](CLI::App* sub) {
    sub->add_option("--out", common.out_dir, "Output directory");
    sub->add_option("--seed", common.seed, "Random seed");
    sub->add_option("--jobs", common.jobs, "Parallel worker threads");
  };

  // solve-1d
  double a2 = 1.0, a3 = 1.0;
  std::string trace_path;
  auto* solve1d = app.add_subcommand("solve-1d", "Solve the three-car one-lane example");
  solve1d->add_option("--a2", a2, "Shared-constraint scale of car 2")->required();
  solve1d->add_option("--a3", a3, "Shared-constraint scale of car 3")->required();
  solve1d->add_option("--trace", trace_path, "Write the solver iteration trace CSV");
  add_common(solve1d);

  // sweep
  std::string config_path;
  double alpha_min = 0.05, alpha_max = 20.0;
  int alpha_count = 15;
  bool linear = false, no_warm = false;
  auto* sweep = app.add_subcommand("sweep", "Sweep the aggressiveness scale of player 2");
  sweep->add_option("--config", config_path, "Scenario config JSON")->required();
  sweep->add_option("--alpha-min", alpha_min, "Smallest alpha");
  sweep->add_option("--alpha-max", alpha_max, "Largest alpha");
  sweep->add_option("--alpha-count", alpha_count, "Number of alpha values");
  sweep->add_flag("--linear", linear, "Space alphas linearly instead of logarithmically");
  sweep->add_flag("--no-warm-start", no_warm, "Cold start every solve");
  add_common(sweep);

  // race
  double ego_alpha = 1.0;
  auto* race = app.add_subcommand("race", "Run one closed-loop race from a config");
  race->add_option("--config", config_path, "Scenario config JSON")->required();
  auto* alpha_opt = race->add_option("--ego-alpha", ego_alpha, "Ego aggressiveness scale");
  add_common(race);

  // mc
  int n = 100;
  double mc_alpha = 1.0;
  auto* mc = app.add_subcommand("mc", "Monte Carlo study of randomized races");
  mc->add_option("--config", config_path, "Scenario config JSON")->required();
  mc->add_option("--n", n, "Number of races");
  mc->add_option("--ego-alpha", mc_alpha, "Ego aggressiveness scale");
  add_common(mc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (solve1d->parsed()) return cmd_solve_1d(a2, a3, common, trace_path);
    if (sweep->parsed()) {
      return cmd_sweep(config_path, alpha_min, alpha_max, alpha_count, linear, !no_warm, common);
    }
    if (race->parsed()) return cmd_race(config_path, ego_alpha, alpha_opt->count() > 0, common);
    if (mc->parsed()) return cmd_mc(config_path, n, mc_alpha, common);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitUsage;
}
