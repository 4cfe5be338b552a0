#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gnep/types.hpp"

namespace gnep {

using ScalarFn = std::function<double(const Vec&)>;
using VectorFn = std::function<Vec(const Vec&)>;
using MatrixFn = std::function<Mat(const Vec&)>;
// Weighted Hessian contraction: (x, w) -> sum_j w_j * Hess(c_j)(x).
using ContractionFn = std::function<Mat(const Vec&, const Vec&)>;

/// Per-player evaluators. All callables take the full stacked decision vector.
/// First/second-order members are optional; finite differences fill the gaps.
struct PlayerFunctions {
  ScalarFn cost;    // J_i(x)
  VectorFn eq;      // h_i(x), length k_i, depends on player i's block only
  VectorFn ineq;    // g_i(x), length m_i, "<= 0 feasible", own block only

  VectorFn cost_grad;        // d J_i / d x^i, length n_i
  MatrixFn cost_hess;        // d(cost_grad)/dx, n_i x n
  MatrixFn eq_jac;           // d h_i / d x^i, k_i x n_i
  MatrixFn ineq_jac;         // d g_i / d x^i, m_i x n_i
  ContractionFn eq_hess;     // (x, w) -> sum_j w_j Hess_{x^i}(h_ij), n_i x n_i
  ContractionFn ineq_hess;   // (x, w) -> sum_j w_j Hess_{x^i}(g_ij), n_i x n_i
};

/// Shared constraint s(x) <= 0 coupling all players.
struct SharedConstraint {
  int dim = 0;          // m_0
  VectorFn value;       // s(x), length m_0
  MatrixFn jac;         // d s / d x, m_0 x n
  ContractionFn hess;   // (x, w) -> sum_j w_j Hess_x(s_j), n x n
};

/// A generalized Nash game: M players, per-player costs and private
/// constraints, one block of shared inequality constraints.
struct GameSpec {
  VariableLayout layout;
  std::vector<PlayerFunctions> players;
  std::vector<int> eq_dims;    // k_i
  std::vector<int> ineq_dims;  // m_i
  SharedConstraint shared;     // shared.dim == 0 means no coupling

  int num_players() const { return layout.num_players(); }
  int dim() const { return layout.total; }
  int total_eq() const { int s = 0; for (int k : eq_dims) s += k; return s; }
  int total_ineq() const { int s = 0; for (int m : ineq_dims) s += m; return s; }

  void validate() const {
    const int M = num_players();
    if (M < 1) throw std::invalid_argument("GameSpec: needs at least one player");
    if (static_cast<int>(players.size()) != M || static_cast<int>(eq_dims.size()) != M ||
        static_cast<int>(ineq_dims.size()) != M) {
      throw std::invalid_argument("GameSpec: per-player containers disagree on player count");
    }
    for (int i = 0; i < M; ++i) {
      if (!players[i].cost) {
        throw std::invalid_argument("GameSpec: player " + std::to_string(i + 1) + " has no cost");
      }
      if (eq_dims[i] < 0 || ineq_dims[i] < 0) {
        throw std::invalid_argument("GameSpec: negative constraint count for player " +
                                    std::to_string(i + 1));
      }
      if (eq_dims[i] > 0 && !players[i].eq) {
        throw std::invalid_argument("GameSpec: player " + std::to_string(i + 1) +
                                    " declares equalities but has no evaluator");
      }
      if (ineq_dims[i] > 0 && !players[i].ineq) {
        throw std::invalid_argument("GameSpec: player " + std::to_string(i + 1) +
                                    " declares inequalities but has no evaluator");
      }
    }
    if (shared.dim < 0) throw std::invalid_argument("GameSpec: negative shared dimension");
    if (shared.dim > 0 && !shared.value) {
      throw std::invalid_argument("GameSpec: shared constraints declared but no evaluator");
    }
  }
};

/// Positive diagonal weights applied per player to the shared fictitious
/// multiplier. Convention: player 1 carries all-ones weights.
struct ScalingFactors {
  std::vector<Vec> weights;  // one length-m0 positive vector per player

  ScalingFactors() = default;

  explicit ScalingFactors(std::vector<Vec> w) : weights(std::move(w)) { validate(); }

  /// All-ones factors for every player (the normalized setting).
  static ScalingFactors identity(int num_players, int m0) {
    std::vector<Vec> w(num_players, Vec::Ones(m0));
    return ScalingFactors(std::move(w));
  }

  /// Uniform per-player scalars: weights[i] = scale_i * ones(m0).
  static ScalingFactors uniform(const std::vector<double>& scales, int m0) {
    std::vector<Vec> w;
    w.reserve(scales.size());
    for (double a : scales) w.push_back(Vec::Constant(m0, a));
    return ScalingFactors(std::move(w));
  }

  int num_players() const { return static_cast<int>(weights.size()); }
  int shared_dim() const { return weights.empty() ? 0 : static_cast<int>(weights[0].size()); }

  void validate() const {
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i].size() != shared_dim()) {
        throw std::invalid_argument("ScalingFactors: player " + std::to_string(i + 1) +
                                    " weight length mismatch");
      }
      if ((weights[i].array() <= 0.0).any()) {
        throw std::invalid_argument("ScalingFactors: player " + std::to_string(i + 1) +
                                    " has non-positive entries");
      }
    }
  }
};

/// Multipliers attached to one strategy profile: per-player equality (free
/// sign) and inequality (>= 0) vectors, plus the single shared fictitious
/// vector sigma (>= 0). Per-player shared multipliers are derived, see
/// actual_multipliers().
struct MultiplierSet {
  std::vector<Vec> eq;    // mu_i, length k_i
  std::vector<Vec> ineq;  // lambda_i, length m_i
  Vec shared;             // sigma, length m0

  static MultiplierSet zeros(const GameSpec& spec) {
    MultiplierSet m;
    for (int i = 0; i < spec.num_players(); ++i) {
      m.eq.push_back(Vec::Zero(spec.eq_dims[i]));
      m.ineq.push_back(Vec::Zero(spec.ineq_dims[i]));
    }
    m.shared = Vec::Zero(spec.shared.dim);
    return m;
  }
};

/// sigma_i = a_i (.) sigma, the actual shared-constraint multipliers each
/// player sees after scaling the fictitious vector.
inline std::vector<Vec> actual_multipliers(const ScalingFactors& factors, const Vec& sigma) {
  if (sigma.size() != factors.shared_dim()) {
    throw std::invalid_argument("actual_multipliers: sigma length " +
                                std::to_string(sigma.size()) + " does not match factor length " +
                                std::to_string(factors.shared_dim()));
  }
  std::vector<Vec> out;
  out.reserve(factors.weights.size());
  for (const Vec& a : factors.weights) out.push_back((a.array() * sigma.array()).matrix());
  return out;
}

}  // namespace gnep
