#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "gnep/io/csv.hpp"
#include "gnep/racing/game.hpp"
#include "gnep/scenarios/monte_carlo.hpp"
#include "gnep/scenarios/race.hpp"
#include "gnep/scenarios/sweep.hpp"

namespace gnep::io {

inline const char* winner_name(scenarios::RaceWinner w) {
  switch (w) {
    case scenarios::RaceWinner::ego: return "ego";
    case scenarios::RaceWinner::opponent: return "opponent";
    case scenarios::RaceWinner::tie: return "tie";
  }
  return "unknown";
}

inline void write_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(2) << "\n";
}

/// Trajectory table, one row per (player, step): columns
/// player,k,v,psi,s,t,X,Y,u_a,u_delta. Input cells are empty at the terminal
/// step, which has no input.
inline CsvWriter trajectory_csv(const racing::PlanView& p1, const racing::PlanView& p2) {
  CsvWriter csv({"player", "k", "v", "psi", "s", "t", "X", "Y", "u_a", "u_delta"});
  const racing::PlanView* plans[2] = {&p1, &p2};
  for (int player = 0; player < 2; ++player) {
    const auto& plan = *plans[player];
    for (std::size_t k = 0; k < plan.states.size(); ++k) {
      const auto& st = plan.states[k];
      auto row = csv.row();
      row.add(player + 1).add(static_cast<int>(k));
      row.add(st.speed).add(st.heading).add(st.progress).add(st.lateral).add(st.X).add(st.Y);
      if (k < plan.inputs.size()) {
        row.add(plan.inputs[k].accel).add(plan.inputs[k].steer);
      } else {
        row.add(std::string()).add(std::string());
      }
      csv.append(std::move(row));
    }
  }
  return csv;
}

/// Executed closed-loop trajectories in the same schema (player 1 = opponent,
/// player 2 = ego).
inline CsvWriter race_csv(const scenarios::RaceOutcome& outcome) {
  racing::PlanView p1{outcome.opponent_states, outcome.opponent_inputs};
  racing::PlanView p2{outcome.ego_states, outcome.ego_inputs};
  return trajectory_csv(p1, p2);
}

inline nlohmann::json outcome_json(const scenarios::RaceOutcome& outcome) {
  return {
      {"winner", winner_name(outcome.winner)},
      {"collision", outcome.collision},
      {"solver_failure", outcome.solver_failure},
      {"steps_completed", outcome.steps_completed},
      {"final_progress",
       {{"opponent", outcome.opponent_states.back().progress},
        {"ego", outcome.ego_states.back().progress}}},
  };
}

inline nlohmann::json mc_report_json(const scenarios::McReport& report) {
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : report.runs) {
    runs.push_back({
        {"index", r.index},
        {"run_seed", r.run_seed},
        {"initial",
         {{"opponent", {{"s", r.opp_s}, {"t", r.opp_t}, {"v", r.opp_v}}},
          {"ego", {{"s", r.ego_s}, {"t", r.ego_t}, {"v", r.ego_v}}}}},
        {"winner", winner_name(r.winner)},
        {"collision", r.collision},
        {"solver_failure", r.solver_failure},
        {"final", {{"opponent_s", r.final_opp_s}, {"ego_s", r.final_ego_s}}},
    });
  }
  return {
      {"n", report.n},
      {"seed", report.seed},
      {"ego_alpha", report.ego_alpha},
      {"wins", report.wins},
      {"losses", report.losses},
      {"collisions", report.collisions},
      {"failures", report.failures},
      {"win_percent", report.win_percent},
      {"runs", runs},
  };
}

inline CsvWriter mc_runs_csv(const scenarios::McReport& report) {
  CsvWriter csv({"index", "run_seed", "opp_s", "opp_t", "opp_v", "ego_s", "ego_t", "ego_v",
                 "winner", "collision", "solver_failure", "final_opp_s", "final_ego_s"});
  for (const auto& r : report.runs) {
    auto row = csv.row();
    row.add(r.index).add(std::to_string(r.run_seed));
    row.add(r.opp_s).add(r.opp_t).add(r.opp_v).add(r.ego_s).add(r.ego_t).add(r.ego_v);
    row.add(std::string(winner_name(r.winner)));
    row.add(static_cast<int>(r.collision)).add(static_cast<int>(r.solver_failure));
    row.add(r.final_opp_s).add(r.final_ego_s);
    csv.append(std::move(row));
  }
  return csv;
}

}  // namespace gnep::io
