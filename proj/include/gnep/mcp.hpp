#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <vector>

#include "gnep/derivatives.hpp"
#include "gnep/game.hpp"
#include "gnep/lagrangian.hpp"

namespace gnep {

/// Index map of the stacked MCP variable z = [x, mu_1..mu_M, lambda_1..lambda_M, sigma].
struct McpLayout {
  VariableLayout primal;           // x blocks
  std::vector<int> mu_offsets;     // start of each mu_i
  std::vector<int> mu_dims;
  std::vector<int> lambda_offsets; // start of each lambda_i
  std::vector<int> lambda_dims;
  int sigma_offset = 0;
  int sigma_dim = 0;
  int total = 0;

  static McpLayout from_game(const GameSpec& spec) {
    McpLayout lay;
    lay.primal = spec.layout;
    int off = spec.dim();
    for (int i = 0; i < spec.num_players(); ++i) {
      lay.mu_offsets.push_back(off);
      lay.mu_dims.push_back(spec.eq_dims[i]);
      off += spec.eq_dims[i];
    }
    for (int i = 0; i < spec.num_players(); ++i) {
      lay.lambda_offsets.push_back(off);
      lay.lambda_dims.push_back(spec.ineq_dims[i]);
      off += spec.ineq_dims[i];
    }
    lay.sigma_offset = off;
    lay.sigma_dim = spec.shared.dim;
    lay.total = off + spec.shared.dim;
    return lay;
  }

  Vec primal_part(const Vec& z) const { return z.head(primal.total); }
  Vec sigma_part(const Vec& z) const { return z.segment(sigma_offset, sigma_dim); }
  Vec mu_part(const Vec& z, int i) const { return z.segment(mu_offsets[i], mu_dims[i]); }
  Vec lambda_part(const Vec& z, int i) const { return z.segment(lambda_offsets[i], lambda_dims[i]); }

  MultiplierSet multipliers(const Vec& z) const {
    MultiplierSet m;
    for (std::size_t i = 0; i < mu_offsets.size(); ++i) m.eq.push_back(mu_part(z, static_cast<int>(i)));
    for (std::size_t i = 0; i < lambda_offsets.size(); ++i) m.ineq.push_back(lambda_part(z, static_cast<int>(i)));
    m.shared = sigma_part(z);
    return m;
  }
};

/// Mixed complementarity problem over box-bounded z:
///   l <= z <= u,  F(z) complementary to the bounds.
/// Here every row is either free (l = -inf) or lower-bounded at 0; u = +inf.
struct McpProblem {
  int size = 0;
  Vec lower;                     // -inf on free rows, 0 on cone rows
  std::function<Vec(const Vec&)> residual;
  std::function<Mat(const Vec&)> jacobian;
  McpLayout layout;

  bool bounded(int row) const { return std::isfinite(lower[row]); }
};

/// Assembles the scaled-multiplier KKT system of the game into an MCP:
///   rows paired with x:      grad_{x^i} L_i (free)
///   rows paired with mu_i:   h_i(x)         (free)
///   rows paired with lambda: -g_i(x)        (lambda >= 0)
///   rows paired with sigma:  -s(x)          (sigma >= 0, single shared block)
inline McpProblem build_mcp(const GameSpec& spec, const ScalingFactors& factors) {
  spec.validate();
  if (spec.shared.dim > 0) {
    if (factors.num_players() != spec.num_players()) {
      throw std::invalid_argument("build_mcp: factors must cover every player");
    }
    if (factors.shared_dim() != spec.shared.dim) {
      throw std::invalid_argument("build_mcp: factor length does not match shared dimension");
    }
  }

  McpProblem p;
  p.layout = McpLayout::from_game(spec);
  p.size = p.layout.total;
  p.lower = Vec::Constant(p.size, -std::numeric_limits<double>::infinity());
  for (int i = 0; i < spec.num_players(); ++i) {
    p.lower.segment(p.layout.lambda_offsets[i], p.layout.lambda_dims[i]).setZero();
  }
  p.lower.segment(p.layout.sigma_offset, p.layout.sigma_dim).setZero();

  auto game = std::make_shared<const GameSpec>(spec);
  auto fac = std::make_shared<const ScalingFactors>(factors);
  const McpLayout lay = p.layout;

  p.residual = [game, fac, lay](const Vec& z) -> Vec {
    if (z.size() != lay.total) throw std::invalid_argument("McpProblem: z length mismatch");
    const Vec x = lay.primal_part(z);
    const StrategyProfile prof(lay.primal, x);
    const MultiplierSet mult = lay.multipliers(z);
    Vec F(lay.total);
    F.head(lay.primal.total) = lagrangian_gradient(*game, *fac, prof, mult);
    for (int i = 0; i < game->num_players(); ++i) {
      if (lay.mu_dims[i] > 0) F.segment(lay.mu_offsets[i], lay.mu_dims[i]) = eq_value(*game, i, x);
      if (lay.lambda_dims[i] > 0) {
        F.segment(lay.lambda_offsets[i], lay.lambda_dims[i]) = -ineq_value(*game, i, x);
      }
    }
    if (lay.sigma_dim > 0) F.segment(lay.sigma_offset, lay.sigma_dim) = -shared_value(*game, x);
    return F;
  };

  p.jacobian = [game, fac, lay](const Vec& z) -> Mat {
    if (z.size() != lay.total) throw std::invalid_argument("McpProblem: z length mismatch");
    const GameSpec& g = *game;
    const Vec x = lay.primal_part(z);
    const int n = g.dim();
    Mat J = Mat::Zero(lay.total, lay.total);

    Mat s_jac;
    std::vector<Vec> sigma_i;
    if (g.shared.dim > 0) {
      s_jac = shared_jacobian(g, x);
      sigma_i = actual_multipliers(*fac, lay.sigma_part(z));
    }

    for (int i = 0; i < g.num_players(); ++i) {
      const int off = g.layout.offsets[i];
      const int ni = g.layout.dims[i];

      // Stationarity rows of player i.
      J.block(off, 0, ni, n) = cost_cross_hessian(g, i, x);
      if (g.eq_dims[i] > 0) {
        const Mat Jh = eq_jacobian(g, i, x);
        J.block(off, off, ni, ni) += eq_hessian(g, i, x, lay.mu_part(z, i));
        J.block(off, lay.mu_offsets[i], ni, lay.mu_dims[i]) = Jh.transpose();
        J.block(lay.mu_offsets[i], off, lay.mu_dims[i], ni) = Jh;
      }
      if (g.ineq_dims[i] > 0) {
        const Mat Jg = ineq_jacobian(g, i, x);
        J.block(off, off, ni, ni) += ineq_hessian(g, i, x, lay.lambda_part(z, i));
        J.block(off, lay.lambda_offsets[i], ni, lay.lambda_dims[i]) = Jg.transpose();
        J.block(lay.lambda_offsets[i], off, lay.lambda_dims[i], ni) = -Jg;
      }
      if (g.shared.dim > 0) {
        J.block(off, 0, ni, n) += shared_hessian(g, x, sigma_i[i]).middleRows(off, ni);
        // d(stationarity_i)/d(sigma) = (ds/dx^i)^T diag(a_i)
        J.block(off, lay.sigma_offset, ni, lay.sigma_dim) =
            s_jac.middleCols(off, ni).transpose() * fac->weights[i].asDiagonal();
      }
    }
    if (g.shared.dim > 0) {
      J.block(lay.sigma_offset, 0, lay.sigma_dim, n) = -s_jac;
    }
    return J;
  };

  return p;
}

/// Norms measuring how far a stacked point z is from a KKT point of the game.
struct KktResidual {
  double stationarity = 0.0;    // inf-norm of the stacked Lagrangian gradients
  double feasibility = 0.0;     // inf-norm of h and of positive parts of g, s
  double complementarity = 0.0; // inf-norm of min(lambda, -g) and min(sigma, -s)

  bool within(double tol) const {
    return stationarity <= tol && feasibility <= tol && complementarity <= tol;
  }
};

inline KktResidual kkt_residual(const GameSpec& spec, const ScalingFactors& factors, const Vec& z) {
  const McpLayout lay = McpLayout::from_game(spec);
  if (z.size() != lay.total) throw std::invalid_argument("kkt_residual: z length mismatch");
  const Vec x = lay.primal_part(z);
  const StrategyProfile prof(lay.primal, x);
  const MultiplierSet mult = lay.multipliers(z);

  KktResidual r;
  r.stationarity = lagrangian_gradient(spec, factors, prof, mult).lpNorm<Eigen::Infinity>();
  for (int i = 0; i < spec.num_players(); ++i) {
    if (spec.eq_dims[i] > 0) {
      r.feasibility = std::max(r.feasibility, eq_value(spec, i, x).lpNorm<Eigen::Infinity>());
    }
    if (spec.ineq_dims[i] > 0) {
      const Vec g = ineq_value(spec, i, x);
      const Vec lam = mult.ineq[i];
      for (int j = 0; j < g.size(); ++j) {
        r.feasibility = std::max(r.feasibility, std::max(0.0, g[j]));
        r.complementarity = std::max(r.complementarity, std::abs(std::min(lam[j], -g[j])));
      }
    }
  }
  if (spec.shared.dim > 0) {
    const Vec s = shared_value(spec, x);
    for (int j = 0; j < s.size(); ++j) {
      r.feasibility = std::max(r.feasibility, std::max(0.0, s[j]));
      r.complementarity = std::max(r.complementarity, std::abs(std::min(mult.shared[j], -s[j])));
    }
  }
  return r;
}

}  // namespace gnep
