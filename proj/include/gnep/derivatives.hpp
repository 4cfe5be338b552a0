#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "gnep/game.hpp"

namespace gnep {

// Central finite-difference step for first-order quantities. Second-order
// fallbacks of already-differenced quantities use a coarser step so that the
// inner difference noise is not amplified past usefulness.
inline constexpr double kFdStep = 1e-6;
inline constexpr double kFdStepSecondOfFd = 1e-4;

namespace detail {

inline void check_len(const Vec& v, int expect, const std::string& what, int player) {
  if (v.size() != expect) {
    throw std::runtime_error("player " + std::to_string(player + 1) + " " + what +
                             " evaluator returned length " + std::to_string(v.size()) +
                             ", declared " + std::to_string(expect));
  }
}

// d f / d x over the columns in [off, off+cols), central differences.
inline Mat fd_jacobian(const VectorFn& f, const Vec& x, int off, int cols, int rows,
                       double step = kFdStep) {
  Mat J(rows, cols);
  Vec xp = x;
  for (int j = 0; j < cols; ++j) {
    const double x0 = x[off + j];
    xp[off + j] = x0 + step;
    const Vec fp = f(xp);
    xp[off + j] = x0 - step;
    const Vec fm = f(xp);
    xp[off + j] = x0;
    J.col(j) = (fp - fm) / (2.0 * step);
  }
  return J;
}

inline Vec fd_gradient(const ScalarFn& f, const Vec& x, int off, int cols, double step = kFdStep) {
  Vec g(cols);
  Vec xp = x;
  for (int j = 0; j < cols; ++j) {
    const double x0 = x[off + j];
    xp[off + j] = x0 + step;
    const double fp = f(xp);
    xp[off + j] = x0 - step;
    const double fm = f(xp);
    xp[off + j] = x0;
    g[j] = (fp - fm) / (2.0 * step);
  }
  return g;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Resolved derivative accessors: analytic when supplied, finite differences
// otherwise. All first-order fallbacks use central differences at kFdStep.
// ---------------------------------------------------------------------------

inline Vec cost_gradient(const GameSpec& spec, int i, const Vec& x) {
  const auto& p = spec.players[i];
  const int ni = spec.layout.dims[i];
  if (p.cost_grad) {
    Vec g = p.cost_grad(x);
    detail::check_len(g, ni, "cost gradient", i);
    return g;
  }
  return detail::fd_gradient(p.cost, x, spec.layout.offsets[i], ni);
}

inline Mat cost_cross_hessian(const GameSpec& spec, int i, const Vec& x) {
  const auto& p = spec.players[i];
  const int ni = spec.layout.dims[i];
  if (p.cost_hess) return p.cost_hess(x);
  // FD of the (analytic or FD) own-block gradient with respect to all of x.
  const double step = p.cost_grad ? kFdStep : kFdStepSecondOfFd;
  VectorFn grad = [&spec, i](const Vec& z) { return cost_gradient(spec, i, z); };
  return detail::fd_jacobian(grad, x, 0, spec.dim(), ni, step);
}

inline Vec eq_value(const GameSpec& spec, int i, const Vec& x) {
  if (spec.eq_dims[i] == 0) return Vec(0);
  Vec h = spec.players[i].eq(x);
  detail::check_len(h, spec.eq_dims[i], "equality", i);
  return h;
}

inline Vec ineq_value(const GameSpec& spec, int i, const Vec& x) {
  if (spec.ineq_dims[i] == 0) return Vec(0);
  Vec g = spec.players[i].ineq(x);
  detail::check_len(g, spec.ineq_dims[i], "inequality", i);
  return g;
}

inline Vec shared_value(const GameSpec& spec, const Vec& x) {
  if (spec.shared.dim == 0) return Vec(0);
  Vec s = spec.shared.value(x);
  if (s.size() != spec.shared.dim) {
    throw std::runtime_error("shared constraint evaluator returned length " +
                             std::to_string(s.size()) + ", declared " +
                             std::to_string(spec.shared.dim));
  }
  return s;
}

inline Mat eq_jacobian(const GameSpec& spec, int i, const Vec& x) {
  const int ki = spec.eq_dims[i];
  const int ni = spec.layout.dims[i];
  if (ki == 0) return Mat(0, ni);
  if (spec.players[i].eq_jac) return spec.players[i].eq_jac(x);
  return detail::fd_jacobian(spec.players[i].eq, x, spec.layout.offsets[i], ni, ki);
}

inline Mat ineq_jacobian(const GameSpec& spec, int i, const Vec& x) {
  const int mi = spec.ineq_dims[i];
  const int ni = spec.layout.dims[i];
  if (mi == 0) return Mat(0, ni);
  if (spec.players[i].ineq_jac) return spec.players[i].ineq_jac(x);
  return detail::fd_jacobian(spec.players[i].ineq, x, spec.layout.offsets[i], ni, mi);
}

inline Mat shared_jacobian(const GameSpec& spec, const Vec& x) {
  if (spec.shared.dim == 0) return Mat(0, spec.dim());
  if (spec.shared.jac) return spec.shared.jac(x);
  return detail::fd_jacobian(spec.shared.value, x, 0, spec.dim(), spec.shared.dim);
}

// Weighted Hessian contractions sum_j w_j Hess(c_j). Fallback differentiates
// the transposed Jacobian contraction J(x)^T w.
inline Mat eq_hessian(const GameSpec& spec, int i, const Vec& x, const Vec& w) {
  const int ni = spec.layout.dims[i];
  if (spec.eq_dims[i] == 0 || w.size() == 0) return Mat::Zero(ni, ni);
  if (spec.players[i].eq_hess) return spec.players[i].eq_hess(x, w);
  const double step = spec.players[i].eq_jac ? kFdStep : kFdStepSecondOfFd;
  VectorFn jtw = [&spec, i, &w](const Vec& z) -> Vec { return eq_jacobian(spec, i, z).transpose() * w; };
  return detail::fd_jacobian(jtw, x, spec.layout.offsets[i], ni, ni, step);
}

inline Mat ineq_hessian(const GameSpec& spec, int i, const Vec& x, const Vec& w) {
  const int ni = spec.layout.dims[i];
  if (spec.ineq_dims[i] == 0 || w.size() == 0) return Mat::Zero(ni, ni);
  if (spec.players[i].ineq_hess) return spec.players[i].ineq_hess(x, w);
  const double step = spec.players[i].ineq_jac ? kFdStep : kFdStepSecondOfFd;
  VectorFn jtw = [&spec, i, &w](const Vec& z) -> Vec { return ineq_jacobian(spec, i, z).transpose() * w; };
  return detail::fd_jacobian(jtw, x, spec.layout.offsets[i], ni, ni, step);
}

inline Mat shared_hessian(const GameSpec& spec, const Vec& x, const Vec& w) {
  const int n = spec.dim();
  if (spec.shared.dim == 0 || w.size() == 0) return Mat::Zero(n, n);
  if (spec.shared.hess) return spec.shared.hess(x, w);
  const double step = spec.shared.jac ? kFdStep : kFdStepSecondOfFd;
  VectorFn jtw = [&spec, &w](const Vec& z) -> Vec { return shared_jacobian(spec, z).transpose() * w; };
  return detail::fd_jacobian(jtw, x, 0, n, n, step);
}

// ---------------------------------------------------------------------------
// Derivative self-check: analytic first-order evaluators against central
// finite differences of the value evaluators.
// ---------------------------------------------------------------------------

struct FiniteDiffReport {
  struct Entry {
    int player;              // -1 for the shared constraint
    std::string evaluator;   // "cost_grad", "eq_jac", "ineq_jac", "shared_jac"
    double max_rel_dev;      // max over entries of |analytic - fd| / max(1, |fd|)
  };
  std::vector<Entry> entries;

  double worst() const {
    double w = 0.0;
    for (const auto& e : entries) w = std::max(w, e.max_rel_dev);
    return w;
  }
};

namespace detail {

inline double rel_dev(const Mat& analytic, const Mat& fd) {
  double worst = 0.0;
  for (int r = 0; r < fd.rows(); ++r) {
    for (int c = 0; c < fd.cols(); ++c) {
      const double dev = std::abs(analytic(r, c) - fd(r, c)) / std::max(1.0, std::abs(fd(r, c)));
      worst = std::max(worst, dev);
    }
  }
  return worst;
}

}  // namespace detail

/// Compares every analytic first-order evaluator in the game against a
/// central-difference estimate at the given profile. Players without analytic
/// derivatives are skipped (there is nothing to cross-check).
inline FiniteDiffReport finite_diff_check(const GameSpec& spec, const StrategyProfile& profile) {
  const Vec& x = profile.x;
  FiniteDiffReport report;
  for (int i = 0; i < spec.num_players(); ++i) {
    const auto& p = spec.players[i];
    const int off = spec.layout.offsets[i];
    const int ni = spec.layout.dims[i];
    if (p.cost_grad) {
      const Vec fd = detail::fd_gradient(p.cost, x, off, ni);
      report.entries.push_back({i, "cost_grad", detail::rel_dev(p.cost_grad(x), fd)});
    }
    if (p.eq_jac && spec.eq_dims[i] > 0) {
      const Mat fd = detail::fd_jacobian(p.eq, x, off, ni, spec.eq_dims[i]);
      report.entries.push_back({i, "eq_jac", detail::rel_dev(p.eq_jac(x), fd)});
    }
    if (p.ineq_jac && spec.ineq_dims[i] > 0) {
      const Mat fd = detail::fd_jacobian(p.ineq, x, off, ni, spec.ineq_dims[i]);
      report.entries.push_back({i, "ineq_jac", detail::rel_dev(p.ineq_jac(x), fd)});
    }
  }
  if (spec.shared.jac && spec.shared.dim > 0) {
    const Mat fd = detail::fd_jacobian(spec.shared.value, x, 0, spec.dim(), spec.shared.dim);
    report.entries.push_back({-1, "shared_jac", detail::rel_dev(spec.shared.jac(x), fd)});
  }
  return report;
}

}  // namespace gnep
