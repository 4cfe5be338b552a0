#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gnep/derivatives.hpp"
#include "gnep/game.hpp"

namespace gnep {

enum class EquilibriumVerdict { certified, refuted, inconclusive };

inline const char* to_string(EquilibriumVerdict v) {
  switch (v) {
    case EquilibriumVerdict::certified: return "certified";
    case EquilibriumVerdict::refuted: return "refuted";
    case EquilibriumVerdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

struct EquilibriumReport {
  std::vector<double> improvement;       // best cost decrease found, per player
  std::vector<Vec> best_deviation;       // deviating block achieving it
  EquilibriumVerdict verdict = EquilibriumVerdict::inconclusive;
  double eps = 0.0;
  std::string note;

  double max_improvement() const {
    double m = 0.0;
    for (double v : improvement) m = std::max(m, v);
    return m;
  }
};

struct EquilibriumOptions {
  double box_halfwidth = 1.5;   // grid search box around the candidate, per coordinate
  double feas_tol = 1e-6;       // constraint tolerance for candidate and deviations
  int max_grid_dim = 4;         // grid scan above this falls back to local descent
  std::vector<double> penalty_stages = {1e2, 1e3, 1e4};
  int descent_iters = 150;
  int restore_iters = 40;
};

namespace detail {

// Max constraint violation of the profile with player i's block replaced.
// Returns {violation, description of worst row}.
inline std::pair<double, std::string> violation(const GameSpec& spec, const Vec& x) {
  double worst = 0.0;
  std::string what = "none";
  for (int i = 0; i < spec.num_players(); ++i) {
    if (spec.eq_dims[i] > 0) {
      const Vec h = eq_value(spec, i, x);
      for (int j = 0; j < h.size(); ++j) {
        if (std::abs(h[j]) > worst) {
          worst = std::abs(h[j]);
          what = "player " + std::to_string(i + 1) + " equality row " + std::to_string(j);
        }
      }
    }
    if (spec.ineq_dims[i] > 0) {
      const Vec g = ineq_value(spec, i, x);
      for (int j = 0; j < g.size(); ++j) {
        if (g[j] > worst) {
          worst = g[j];
          what = "player " + std::to_string(i + 1) + " inequality row " + std::to_string(j);
        }
      }
    }
  }
  if (spec.shared.dim > 0) {
    const Vec s = shared_value(spec, x);
    for (int j = 0; j < s.size(); ++j) {
      if (s[j] > worst) {
        worst = s[j];
        what = "shared constraint row " + std::to_string(j);
      }
    }
  }
  return {worst, what};
}

// Constraint violation restricted to rows player i can influence.
inline double player_violation(const GameSpec& spec, int i, const Vec& x) {
  double worst = 0.0;
  if (spec.eq_dims[i] > 0) worst = eq_value(spec, i, x).lpNorm<Eigen::Infinity>();
  if (spec.ineq_dims[i] > 0) worst = std::max(worst, ineq_value(spec, i, x).maxCoeff());
  if (spec.shared.dim > 0) worst = std::max(worst, shared_value(spec, x).maxCoeff());
  return std::max(worst, 0.0);
}

struct DeviationSearch {
  double improvement = 0.0;
  Vec best_block;
};

// Exhaustive scan of player i's deviations over a centered grid, one
// refinement pass at 10x resolution around the incumbent.
inline DeviationSearch grid_search(const GameSpec& spec, int i, const Vec& x0, double base_cost,
                                   int grid_per_dim, const EquilibriumOptions& opt) {
  const int ni = spec.layout.dims[i];
  const int off = spec.layout.offsets[i];
  DeviationSearch out;
  out.best_block = x0.segment(off, ni);

  Vec center = out.best_block;
  double halfwidth = opt.box_halfwidth;
  Vec x = x0;
  double best_cost = base_cost;

  for (int pass = 0; pass < 2; ++pass) {
    const double spacing = 2.0 * halfwidth / (grid_per_dim - 1);
    std::vector<int> idx(ni, 0);
    while (true) {
      for (int d = 0; d < ni; ++d) {
        x[off + d] = center[d] - halfwidth + spacing * idx[d];
      }
      if (player_violation(spec, i, x) <= opt.feas_tol) {
        const double c = spec.players[i].cost(x);
        if (c < best_cost) {
          best_cost = c;
          out.best_block = x.segment(off, ni);
        }
      }
      int d = 0;
      while (d < ni && ++idx[d] == grid_per_dim) idx[d++] = 0;
      if (d == ni) break;
    }
    // Refine around the incumbent at 10x resolution.
    center = out.best_block;
    halfwidth = 2.0 * spacing;
  }
  out.improvement = std::max(0.0, base_cost - best_cost);
  return out;
}

// Local best-response improvement search for players too large to grid:
// quadratic-penalty descent with finite-difference gradients, followed by a
// feasibility-restoration pass. Only feasible points count as improvements.
// Purely primal; shares nothing with the KKT/MCP solve path.
inline DeviationSearch penalty_descent(const GameSpec& spec, int i, const Vec& x0,
                                       double base_cost, const EquilibriumOptions& opt) {
  const int ni = spec.layout.dims[i];
  const int off = spec.layout.offsets[i];

  DeviationSearch out;
  out.best_block = x0.segment(off, ni);
  double best_cost = base_cost;

  auto record_if_better = [&](const Vec& x) {
    if (player_violation(spec, i, x) <= opt.feas_tol) {
      const double c = spec.players[i].cost(x);
      if (c < best_cost) {
        best_cost = c;
        out.best_block = x.segment(off, ni);
      }
    }
  };

  auto infeasibility = [&](const Vec& x) -> double {
    double v = 0.0;
    if (spec.eq_dims[i] > 0) v += eq_value(spec, i, x).squaredNorm();
    if (spec.ineq_dims[i] > 0) v += ineq_value(spec, i, x).cwiseMax(0.0).squaredNorm();
    if (spec.shared.dim > 0) v += shared_value(spec, x).cwiseMax(0.0).squaredNorm();
    return v;
  };

  Vec x = x0;
  for (double rho : opt.penalty_stages) {
    ScalarFn penalized = [&](const Vec& z) { return spec.players[i].cost(z) + rho * infeasibility(z); };
    for (int iter = 0; iter < opt.descent_iters; ++iter) {
      const Vec g = fd_gradient(penalized, x, off, ni);
      const double gnorm = g.lpNorm<Eigen::Infinity>();
      if (gnorm < 1e-9) break;
      double t = std::min(1.0, 1.0 / gnorm);
      const double p0 = penalized(x);
      bool moved = false;
      while (t > 1e-14) {
        Vec x_try = x;
        x_try.segment(off, ni) -= t * g;
        if (penalized(x_try) <= p0 - 1e-4 * t * g.squaredNorm()) {
          x = x_try;
          moved = true;
          break;
        }
        t *= 0.5;
      }
      if (!moved) break;
      record_if_better(x);
    }
  }

  // Pull the penalty minimizer back onto the feasible set (descent on the
  // squared violation alone), then score the restored point.
  for (int iter = 0; iter < opt.restore_iters; ++iter) {
    const double v0 = infeasibility(x);
    if (v0 <= opt.feas_tol * opt.feas_tol) break;
    ScalarFn viol = [&](const Vec& z) { return infeasibility(z); };
    const Vec g = fd_gradient(viol, x, off, ni);
    const double gnorm = g.lpNorm<Eigen::Infinity>();
    if (gnorm < 1e-14) break;
    double t = std::min(1.0, 1.0 / gnorm);
    bool moved = false;
    while (t > 1e-14) {
      Vec x_try = x;
      x_try.segment(off, ni) -= t * g;
      if (infeasibility(x_try) < v0) {
        x = x_try;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
  }
  record_if_better(x);

  out.improvement = std::max(0.0, base_cost - best_cost);
  return out;
}

}  // namespace detail

/// Throws unless the profile satisfies every constraint within tol; the error
/// message names the most violated constraint.
inline void require_feasible(const GameSpec& spec, const Vec& x, double tol) {
  const auto [worst, what] = detail::violation(spec, x);
  if (worst > tol) {
    throw std::domain_error("infeasible profile: " + what + " violated by " +
                            std::to_string(worst) + " (tolerance " + std::to_string(tol) + ")");
  }
}

/// Independent equilibrium certification: scans each player's unilateral
/// deviations (others held fixed) for a cost improvement. Never touches
/// multipliers. Small unconstrained-block players get an exhaustive grid with
/// one 10x refinement; larger or equality-constrained players get a local
/// penalty-descent best-response search, so for those the certificate is
/// local rather than global.
inline EquilibriumReport check_equilibrium(const GameSpec& spec, const StrategyProfile& profile,
                                           int grid_per_dim = 41, double eps = 1e-4,
                                           const EquilibriumOptions& opt = {}) {
  const Vec& x = profile.x;
  require_feasible(spec, x, opt.feas_tol);

  EquilibriumReport report;
  report.eps = eps;
  try {
    for (int i = 0; i < spec.num_players(); ++i) {
      const double base_cost = spec.players[i].cost(x);
      const bool small_block = spec.layout.dims[i] <= opt.max_grid_dim && spec.eq_dims[i] == 0;
      const auto found = small_block
                             ? detail::grid_search(spec, i, x, base_cost, grid_per_dim, opt)
                             : detail::penalty_descent(spec, i, x, base_cost, opt);
      report.improvement.push_back(found.improvement);
      report.best_deviation.push_back(found.best_block);
    }
  } catch (const std::exception& e) {
    report.verdict = EquilibriumVerdict::inconclusive;
    report.note = e.what();
    return report;
  }
  report.verdict = report.max_improvement() <= eps ? EquilibriumVerdict::certified
                                                   : EquilibriumVerdict::refuted;
  return report;
}

}  // namespace gnep
