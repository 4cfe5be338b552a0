#pragma once

#include <stdexcept>
#include <string>

#include "gnep/derivatives.hpp"
#include "gnep/game.hpp"

namespace gnep {

/// Stacked per-player gradients of the scaled Lagrangians
///   L_i = J_i + mu_i'h_i + lambda_i'g_i + (a_i (.) sigma)'s,
/// each block differentiated with respect to that player's own variables.
inline Vec lagrangian_gradient(const GameSpec& spec, const ScalingFactors& factors,
                               const StrategyProfile& profile, const MultiplierSet& mult) {
  const Vec& x = profile.x;
  if (x.size() != spec.dim()) {
    throw std::invalid_argument("lagrangian_gradient: profile length mismatch");
  }
  if (spec.shared.dim > 0 && (factors.num_players() != spec.num_players() ||
                              factors.shared_dim() != spec.shared.dim)) {
    throw std::invalid_argument("lagrangian_gradient: factors do not match shared dimension");
  }
  Vec out(spec.dim());
  const std::vector<Vec> sigma_i =
      spec.shared.dim > 0 ? actual_multipliers(factors, mult.shared) : std::vector<Vec>();
  Mat shared_jac;
  if (spec.shared.dim > 0) shared_jac = shared_jacobian(spec, x);

  for (int i = 0; i < spec.num_players(); ++i) {
    const int off = spec.layout.offsets[i];
    const int ni = spec.layout.dims[i];
    try {
      Vec block = cost_gradient(spec, i, x);
      if (spec.eq_dims[i] > 0) {
        if (mult.eq[i].size() != spec.eq_dims[i]) {
          throw std::runtime_error("equality multiplier length mismatch");
        }
        block += eq_jacobian(spec, i, x).transpose() * mult.eq[i];
      }
      if (spec.ineq_dims[i] > 0) {
        if (mult.ineq[i].size() != spec.ineq_dims[i]) {
          throw std::runtime_error("inequality multiplier length mismatch");
        }
        block += ineq_jacobian(spec, i, x).transpose() * mult.ineq[i];
      }
      if (spec.shared.dim > 0) {
        block += shared_jac.middleCols(off, ni).transpose() * sigma_i[i];
      }
      out.segment(off, ni) = block;
    } catch (const std::exception& e) {
      throw std::runtime_error("lagrangian_gradient: player " + std::to_string(i + 1) + ": " +
                               e.what());
    }
  }
  return out;
}

}  // namespace gnep
