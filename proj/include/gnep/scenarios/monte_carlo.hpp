#pragma once

#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "gnep/scenarios/race.hpp"

namespace gnep::scenarios {

struct McRunRecord {
  int index = 0;
  std::uint64_t run_seed = 0;
  // Initial conditions (echoed for reproducibility).
  double opp_s = 0, opp_t = 0, opp_v = 0;
  double ego_s = 0, ego_t = 0, ego_v = 0;
  // Outcome.
  RaceWinner winner = RaceWinner::tie;
  bool collision = false;
  bool solver_failure = false;
  double final_opp_s = 0, final_ego_s = 0;
};

/// Aggregated closed-loop study. Every run falls into exactly one bucket;
/// collision takes precedence over solver failure, and ties count as losses.
struct McReport {
  int n = 0;
  std::uint64_t seed = 0;
  double ego_alpha = 1.0;
  int wins = 0;
  int losses = 0;
  int collisions = 0;
  int failures = 0;
  double win_percent = 0.0;
  std::vector<McRunRecord> runs;
};

/// n independent races from seed-derived streams. Runs are independent given
/// their per-run seeds, so they may execute on parallel threads; aggregation
/// is by run index and does not depend on completion order.
inline McReport run_monte_carlo(std::shared_ptr<const racing::Track> track,
                                const racing::RacingConfig& cfg, int n, std::uint64_t seed,
                                double ego_alpha, const SolverConfig& config = {}, int jobs = 1,
                                double duration = 2.0) {
  if (n < 1) throw std::invalid_argument("run_monte_carlo: n must be >= 1");
  if (jobs < 1) jobs = 1;

  McReport report;
  report.n = n;
  report.seed = seed;
  report.ego_alpha = ego_alpha;
  report.runs.resize(n);

  auto run_one = [&](int i) {
    const std::uint64_t run_seed = Rng::mix(seed, static_cast<std::uint64_t>(i));
    const RaceScenario scenario =
        sample_initial_conditions(run_seed, track, cfg, ego_alpha, duration);
    const RaceOutcome outcome = run_race(scenario, config);

    McRunRecord rec;
    rec.index = i;
    rec.run_seed = run_seed;
    rec.opp_s = scenario.opponent.progress;
    rec.opp_t = scenario.opponent.lateral;
    rec.opp_v = scenario.opponent.speed;
    rec.ego_s = scenario.ego.progress;
    rec.ego_t = scenario.ego.lateral;
    rec.ego_v = scenario.ego.speed;
    rec.winner = outcome.winner;
    rec.collision = outcome.collision;
    rec.solver_failure = outcome.solver_failure;
    rec.final_opp_s = outcome.opponent_states.back().progress;
    rec.final_ego_s = outcome.ego_states.back().progress;
    report.runs[i] = rec;
  };

  if (jobs == 1) {
    for (int i = 0; i < n; ++i) run_one(i);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) {
      pool.emplace_back([&, w] {
        for (int i = w; i < n; i += jobs) run_one(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  for (const McRunRecord& rec : report.runs) {
    if (rec.collision) {
      ++report.collisions;
    } else if (rec.solver_failure) {
      ++report.failures;
    } else if (rec.winner == RaceWinner::ego) {
      ++report.wins;
    } else {
      ++report.losses;
    }
  }
  report.win_percent = 100.0 * report.wins / report.n;
  return report;
}

}  // namespace gnep::scenarios
