#pragma once

#include <stdexcept>
#include <vector>

#include "gnep/game.hpp"
#include "gnep/mcp.hpp"
#include "gnep/newton.hpp"

namespace gnep::scenarios {

/// Three cars on two lanes, one step of length 1 s. Car 1 races car 2; car 3
/// shares car 2's lane (ordering constraint x2 <= x3) and wants car 1 to win.
/// Decision variables are the velocities; positions are eliminated through
/// x_i = x_i(0) + v_i * dt.
struct OneDGame {
  static constexpr double kDt = 1.0;
  static constexpr double kInitial[3] = {0.0, 0.5, 0.75};

  GameSpec spec;
  ScalingFactors factors;

  static double position(int player, double velocity) {
    return kInitial[player] + velocity * kDt;
  }
};

/// The velocity-only encoding: n_i = 1 per player, no private constraints,
/// one shared ordering row.
inline OneDGame build_1d_game(double a2, double a3) {
  if (a2 <= 0.0 || a3 <= 0.0) {
    throw std::invalid_argument("build_1d_game: scaling factors must be positive");
  }
  OneDGame game;
  game.spec.layout = VariableLayout({1, 1, 1});
  game.spec.eq_dims = {0, 0, 0};
  game.spec.ineq_dims = {0, 0, 0};

  auto pos = [](int i, const Vec& v) { return OneDGame::position(i, v[i]); };

  // J1 = -x1 + x2 + v1^2/2, J2 = -x2 + x1 + v2^2/2, J3 = -x1 + x2 + v3^2/2.
  PlayerFunctions p1, p2, p3;
  p1.cost = [pos](const Vec& v) { return -pos(0, v) + pos(1, v) + 0.5 * v[0] * v[0]; };
  p2.cost = [pos](const Vec& v) { return -pos(1, v) + pos(0, v) + 0.5 * v[1] * v[1]; };
  p3.cost = [pos](const Vec& v) { return -pos(0, v) + pos(1, v) + 0.5 * v[2] * v[2]; };

  p1.cost_grad = [](const Vec& v) { return Vec::Constant(1, v[0] - OneDGame::kDt); };
  p2.cost_grad = [](const Vec& v) { return Vec::Constant(1, v[1] - OneDGame::kDt); };
  p3.cost_grad = [](const Vec& v) { return Vec::Constant(1, v[2]); };

  auto unit_hess = [](int col) {
    return [col](const Vec& v) {
      Mat h = Mat::Zero(1, v.size());
      h(0, col) = 1.0;
      return h;
    };
  };
  p1.cost_hess = unit_hess(0);
  p2.cost_hess = unit_hess(1);
  p3.cost_hess = unit_hess(2);

  game.spec.players = {p1, p2, p3};

  // Lane-sharing order: x2 <= x3, i.e. s(v) = x2 - x3 <= 0.
  game.spec.shared.dim = 1;
  game.spec.shared.value = [pos](const Vec& v) {
    return Vec::Constant(1, pos(1, v) - pos(2, v));
  };
  game.spec.shared.jac = [](const Vec& v) {
    Mat j = Mat::Zero(1, v.size());
    j(0, 1) = OneDGame::kDt;
    j(0, 2) = -OneDGame::kDt;
    return j;
  };
  game.spec.shared.hess = [](const Vec& v, const Vec&) {
    return Mat::Zero(v.size(), v.size());
  };

  game.factors = ScalingFactors::uniform({1.0, a2, a3}, 1);
  game.spec.validate();
  return game;
}

/// Variant that keeps positions as decision variables, tied to velocities by
/// per-player equality rows. Same solutions; exercises the equality path and
/// pins the larger MCP layout.
inline OneDGame build_1d_game_full(double a2, double a3) {
  if (a2 <= 0.0 || a3 <= 0.0) {
    throw std::invalid_argument("build_1d_game_full: scaling factors must be positive");
  }
  OneDGame game;
  // Per-player block: [x_i, v_i].
  game.spec.layout = VariableLayout({2, 2, 2});
  game.spec.eq_dims = {1, 1, 1};
  game.spec.ineq_dims = {0, 0, 0};

  const int xi[3] = {0, 2, 4};
  // Every cost has the pattern -x_a + x_b + v_i^2/2.
  auto make_player = [&](int i, int target_a, int target_b) {
    PlayerFunctions p;
    p.cost = [=](const Vec& z) {
      return -z[xi[target_a]] + z[xi[target_b]] + 0.5 * z[xi[i] + 1] * z[xi[i] + 1];
    };
    p.cost_grad = [=](const Vec& z) {
      Vec g = Vec::Zero(2);
      if (target_a == i) g[0] -= 1.0;
      if (target_b == i) g[0] += 1.0;
      g[1] = z[xi[i] + 1];
      return g;
    };
    p.cost_hess = [=](const Vec& z) {
      Mat h = Mat::Zero(2, z.size());
      h(1, xi[i] + 1) = 1.0;
      return h;
    };
    p.eq = [=](const Vec& z) {
      return Vec::Constant(1, z[xi[i]] - OneDGame::kInitial[i] - z[xi[i] + 1] * OneDGame::kDt);
    };
    p.eq_jac = [](const Vec&) {
      Mat j(1, 2);
      j << 1.0, -OneDGame::kDt;
      return j;
    };
    p.eq_hess = [](const Vec&, const Vec&) { return Mat::Zero(2, 2); };
    return p;
  };

  game.spec.players = {make_player(0, 0, 1), make_player(1, 1, 0), make_player(2, 0, 1)};

  game.spec.shared.dim = 1;
  game.spec.shared.value = [=](const Vec& z) { return Vec::Constant(1, z[xi[1]] - z[xi[2]]); };
  game.spec.shared.jac = [=](const Vec& z) {
    Mat j = Mat::Zero(1, z.size());
    j(0, xi[1]) = 1.0;
    j(0, xi[2]) = -1.0;
    return j;
  };
  game.spec.shared.hess = [](const Vec& z, const Vec&) { return Mat::Zero(z.size(), z.size()); };

  game.factors = ScalingFactors::uniform({1.0, a2, a3}, 1);
  game.spec.validate();
  return game;
}

/// Solved 1D game packaged for reporting.
struct OneDSolution {
  Vec velocities;      // v1, v2, v3
  Vec positions;       // x1, x2, x3
  double sigma = 0.0;  // fictitious shared multiplier
  Vec costs;           // J1, J2, J3 at the solution
  SolverResult result;
};

inline OneDSolution solve_1d(double a2, double a3, const SolverConfig& config = {}) {
  const OneDGame game = build_1d_game(a2, a3);
  const McpProblem mcp = build_mcp(game.spec, game.factors);
  OneDSolution sol;
  sol.result = solve_mcp(mcp, config, Vec::Zero(mcp.size));
  sol.velocities = mcp.layout.primal_part(sol.result.z);
  sol.positions = Vec(3);
  sol.costs = Vec(3);
  for (int i = 0; i < 3; ++i) {
    sol.positions[i] = OneDGame::position(i, sol.velocities[i]);
    sol.costs[i] = game.spec.players[i].cost(sol.velocities);
  }
  sol.sigma = mcp.layout.sigma_part(sol.result.z)[0];
  return sol;
}

}  // namespace gnep::scenarios
