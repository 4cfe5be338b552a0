#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "gnep/newton.hpp"
#include "gnep/racing/game.hpp"
#include "gnep/scenarios/sweep.hpp"

namespace gnep::scenarios {

/// Sweep builder for the two-car racing game from fixed initial states.
/// Seeds each solve with the neutral rollout plus both side-biased rollouts
/// so multi-modal instances still converge.
inline SweepBuilder make_racing_sweep_builder(std::shared_ptr<const racing::Track> track,
                                              racing::RacingConfig cfg,
                                              racing::VehicleState car1,
                                              racing::VehicleState car2) {
  return [track, cfg, car1, car2](double alpha) {
    SweepProblem prob;
    auto game = racing::build_racing_game(track, cfg, car1, car2, alpha);
    prob.guesses = {
        racing::rollout_initial_guess(game, racing::GuessMode::follow_center),
        racing::rollout_initial_guess(game, racing::GuessMode::shift_left, 0.3),
        racing::rollout_initial_guess(game, racing::GuessMode::shift_right, 0.3),
    };
    prob.spec = std::move(game.spec);
    prob.factors = std::move(game.factors);
    return prob;
  };
}

/// Deterministic 64-bit stream (splitmix64); avoids any library-dependent
/// distribution behavior so runs reproduce bit-for-bit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform(double lo, double hi) {
    const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

  static std::uint64_t mix(std::uint64_t seed, std::uint64_t index) {
    Rng r(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
    return r.next();
  }

 private:
  std::uint64_t state_;
};

/// Closed-loop race setup. Player 1 is the leading opponent (always plays the
/// normalized strategy), player 2 the trailing ego car with its own
/// shared-constraint scale.
struct RaceScenario {
  std::shared_ptr<const racing::Track> track;
  racing::RacingConfig cfg;
  racing::VehicleState opponent;
  racing::VehicleState ego;
  double ego_alpha = 1.0;
  double duration = 2.0;  // [s]
};

enum class RaceWinner { ego, opponent, tie };

struct RaceOutcome {
  std::vector<racing::VehicleState> opponent_states;  // executed, length steps+1
  std::vector<racing::VehicleState> ego_states;
  std::vector<racing::VehicleInput> opponent_inputs;  // applied, length steps
  std::vector<racing::VehicleInput> ego_inputs;
  RaceWinner winner = RaceWinner::tie;
  bool collision = false;
  bool solver_failure = false;
  int steps_completed = 0;

  double final_gap() const {  // ego progress minus opponent progress
    return ego_states.back().progress - opponent_states.back().progress;
  }
};

namespace detail {

inline constexpr double kCollisionSlack = 1e-4;  // matches the planning tolerance
inline constexpr double kTieTolerance = 1e-6;

}  // namespace detail

/// Receding-horizon race: at every step each car independently solves the
/// racing game from the true current states (the opponent with equal factors,
/// the ego with its own rows scaled by ego_alpha), applies only its first
/// input, and both advance one bicycle step.
inline RaceOutcome run_race(const RaceScenario& scenario, const SolverConfig& config = {}) {
  if (!scenario.track) throw std::invalid_argument("run_race: null track");
  scenario.cfg.validate();
  if (scenario.duration < 0.0) throw std::invalid_argument("run_race: negative duration");

  const int steps = static_cast<int>(std::ceil(scenario.duration / scenario.cfg.dt - 1e-12));
  RaceOutcome out;
  out.opponent_states.push_back(scenario.opponent);
  out.ego_states.push_back(scenario.ego);

  Vec warm_opp, warm_ego;
  bool have_warm = false;

  for (int step = 0; step < steps; ++step) {
    const racing::VehicleState& opp = out.opponent_states.back();
    const racing::VehicleState& ego = out.ego_states.back();

    if (racing::distance(opp, ego) < scenario.cfg.d_safe - detail::kCollisionSlack) {
      out.collision = true;
    }

    // Each agent's own view of the game; separation is not re-enforced here
    // so a race that has already collided can still be simulated to the end.
    racing::RacingGame ego_game = racing::build_racing_game(
        scenario.track, scenario.cfg, opp, ego, scenario.ego_alpha, false);
    racing::RacingGame opp_game =
        racing::build_racing_game(scenario.track, scenario.cfg, opp, ego, 1.0, false);

    const McpProblem ego_mcp = build_mcp(ego_game.spec, ego_game.factors);
    const McpProblem opp_mcp = build_mcp(opp_game.spec, opp_game.factors);

    auto solve_with_seeds = [&config](const racing::RacingGame& game, const McpProblem& mcp,
                                      const Vec* warm) {
      std::vector<Vec> seeds;
      if (warm) seeds.push_back(racing::shift_plan(game, *warm));
      seeds.push_back(racing::rollout_initial_guess(game, racing::GuessMode::follow_center));
      seeds.push_back(racing::rollout_initial_guess(game, racing::GuessMode::shift_left, 0.3));
      seeds.push_back(racing::rollout_initial_guess(game, racing::GuessMode::shift_right, 0.3));
      SolverResult sol;
      for (const Vec& z0 : seeds) {
        sol = solve_mcp(mcp, config, z0);
        if (sol.converged()) break;
      }
      return sol;
    };

    const SolverResult ego_sol =
        solve_with_seeds(ego_game, ego_mcp, have_warm ? &warm_ego : nullptr);
    const SolverResult opp_sol =
        solve_with_seeds(opp_game, opp_mcp, have_warm ? &warm_opp : nullptr);
    if (!ego_sol.converged() || !opp_sol.converged()) {
      out.solver_failure = true;
      break;
    }
    warm_ego = ego_sol.z;
    warm_opp = opp_sol.z;
    have_warm = true;

    // Ego is player 2 in both games; each agent executes its own plan's u_0.
    const racing::PlanView ego_plan = ego_game.plan(ego_sol.z, 1);
    const racing::PlanView opp_plan = opp_game.plan(opp_sol.z, 0);
    const racing::VehicleInput u_ego = ego_plan.inputs.front();
    const racing::VehicleInput u_opp = opp_plan.inputs.front();

    out.ego_inputs.push_back(u_ego);
    out.opponent_inputs.push_back(u_opp);
    out.ego_states.push_back(racing::bicycle_step(ego, u_ego, *scenario.track, scenario.cfg));
    out.opponent_states.push_back(racing::bicycle_step(opp, u_opp, *scenario.track, scenario.cfg));
    out.steps_completed = step + 1;
  }

  if (racing::distance(out.opponent_states.back(), out.ego_states.back()) <
      scenario.cfg.d_safe - detail::kCollisionSlack) {
    out.collision = true;
  }

  const double gap = out.final_gap();
  if (std::abs(gap) <= detail::kTieTolerance) {
    out.winner = RaceWinner::tie;
  } else {
    out.winner = gap > 0.0 ? RaceWinner::ego : RaceWinner::opponent;
  }
  return out;
}

/// Randomized start per the study protocol: the opponent anywhere on the
/// track, the ego trailing by 1.5-1.75 m with a 0.25-0.75 m/s speed edge,
/// small lateral offsets, headings aligned with the centerline. Redraws on
/// initial collision; errors out after 100 consecutive rejections.
inline RaceScenario sample_initial_conditions(std::uint64_t seed,
                                              std::shared_ptr<const racing::Track> track,
                                              const racing::RacingConfig& cfg, double ego_alpha,
                                              double duration = 2.0) {
  if (!track) throw std::invalid_argument("sample_initial_conditions: null track");
  Rng rng(seed);
  const double H = track->half_width();
  const double L = track->length();

  for (int attempt = 0; attempt < 100; ++attempt) {
    const double opp_s = rng.uniform(0.0, L);
    const double ego_s = opp_s + rng.uniform(-1.75, -1.5);
    const double opp_v = rng.uniform(1.0, 2.0);
    const double ego_v = opp_v + rng.uniform(0.25, 0.75);
    const double ego_t = rng.uniform(-H / 3.0, H / 3.0);
    const double opp_t = ego_t + rng.uniform(-H / 8.0, H / 8.0);

    RaceScenario scenario;
    scenario.track = track;
    scenario.cfg = cfg;
    scenario.ego_alpha = ego_alpha;
    scenario.duration = duration;
    scenario.opponent = racing::make_state(*track, opp_s, opp_t, opp_v);
    scenario.ego = racing::make_state(*track, ego_s, ego_t, ego_v);
    if (racing::distance(scenario.opponent, scenario.ego) >= cfg.d_safe) {
      return scenario;
    }
  }
  throw std::runtime_error(
      "sample_initial_conditions: 100 consecutive draws violated the separation "
      "constraint; track geometry is misconfigured");
}

}  // namespace gnep::scenarios
