#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "gnep/mcp.hpp"
#include "gnep/newton.hpp"

namespace gnep::scenarios {

/// One parametric problem instance handed to the sweep driver. Guesses are
/// tried in order until one solve converges (structured seeding for
/// multi-modal games); warm starts from the previous solution are prepended.
struct SweepProblem {
  GameSpec spec;
  ScalingFactors factors;
  std::vector<Vec> guesses;
};

using SweepBuilder = std::function<SweepProblem(double alpha)>;

struct SweepEntry {
  double alpha = 0.0;
  Vec z;                       // full MCP point
  Vec primal;                  // joint strategy
  std::vector<double> costs;   // per-player cost at the solution
  bool converged = false;
};

struct SweepResult {
  std::vector<SweepEntry> entries;
  // Indices i where the solution jumped between entries[i] and entries[i+1].
  std::vector<int> jump_after;
  double jump_threshold = 0.0;

  bool has_jumps() const { return !jump_after.empty(); }
};

inline std::vector<double> log_spaced(double lo, double hi, int count) {
  if (count < 1 || lo <= 0.0 || hi <= 0.0) {
    throw std::invalid_argument("log_spaced: needs positive bounds and count >= 1");
  }
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double la = std::log(lo), lb = std::log(hi);
  for (int i = 0; i < count; ++i) {
    out[i] = std::exp(la + (lb - la) * i / (count - 1));
  }
  return out;
}

/// Solves the family of games over the given aggressiveness values, optionally
/// warm-starting each solve from the previous solution, and flags parameter
/// intervals where consecutive converged solutions differ by more than the
/// threshold in primal infinity norm.
inline SweepResult alpha_sweep(const SweepBuilder& builder, const std::vector<double>& alphas,
                               bool warm_start, const SolverConfig& config = {},
                               double jump_threshold = 0.1) {
  if (alphas.empty()) throw std::invalid_argument("alpha_sweep: empty alpha list");
  for (std::size_t i = 0; i + 1 < alphas.size(); ++i) {
    if (!(alphas[i] > 0.0) || alphas[i] > alphas[i + 1]) {
      throw std::invalid_argument("alpha_sweep: alphas must be positive and sorted");
    }
  }

  SweepResult result;
  result.jump_threshold = jump_threshold;
  Vec z_prev;
  bool have_prev = false;

  for (double alpha : alphas) {
    SweepProblem prob = builder(alpha);
    const McpProblem mcp = build_mcp(prob.spec, prob.factors);
    if (prob.guesses.empty()) throw std::invalid_argument("alpha_sweep: builder gave no guess");

    std::vector<Vec> guesses;
    if (warm_start && have_prev) guesses.push_back(z_prev);
    for (Vec& g : prob.guesses) guesses.push_back(std::move(g));

    SweepEntry entry;
    entry.alpha = alpha;
    for (const Vec& z0 : guesses) {
      if (z0.size() != mcp.size) throw std::invalid_argument("alpha_sweep: bad guess size");
      const SolverResult sol = solve_mcp(mcp, config, z0);
      entry.converged = sol.converged();
      entry.z = sol.z;
      if (entry.converged) break;
    }
    entry.primal = mcp.layout.primal_part(entry.z);
    for (int i = 0; i < prob.spec.num_players(); ++i) {
      entry.costs.push_back(prob.spec.players[i].cost(entry.primal));
    }
    if (entry.converged) {
      z_prev = entry.z;
      have_prev = true;
    }
    result.entries.push_back(std::move(entry));
  }

  for (std::size_t i = 0; i + 1 < result.entries.size(); ++i) {
    const auto& a = result.entries[i];
    const auto& b = result.entries[i + 1];
    if (!a.converged || !b.converged) continue;
    if ((a.primal - b.primal).lpNorm<Eigen::Infinity>() > jump_threshold) {
      result.jump_after.push_back(static_cast<int>(i));
    }
  }
  return result;
}

}  // namespace gnep::scenarios
