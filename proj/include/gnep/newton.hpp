#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "gnep/mcp.hpp"

namespace gnep {

struct SolverConfig {
  double tol = 1e-6;             // convergence threshold on ||Phi||_inf
  int max_iter = 200;
  double armijo_slope = 1e-4;
  double backtrack = 0.5;
  double min_step = 1e-12;
  double levenberg_init = 1e-8;  // regularization seed when the solve degenerates
  double levenberg_growth = 10.0;
  double fb_smoothing = 1e-10;   // mu_s inside the Fischer-Burmeister square root
};

enum class SolveStatus { converged, max_iter, line_search_failure, singular };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::line_search_failure: return "line_search_failure";
    case SolveStatus::singular: return "singular";
  }
  return "unknown";
}

struct IterationRecord {
  int iteration;
  double residual_inf;  // ||Phi||_inf before the step
  double step_length;   // accepted step (0 for the final record)
  double merit;         // 1/2 ||Phi||^2 before the step
};

struct SolverResult {
  Vec z;
  SolveStatus status = SolveStatus::max_iter;
  double residual_inf = 0.0;
  int iterations = 0;
  std::vector<IterationRecord> trace;

  bool converged() const { return status == SolveStatus::converged; }
};

/// Smoothed Fischer-Burmeister function: a + b - sqrt(a^2 + b^2 + mu_s).
/// Zero (up to mu_s) exactly when a >= 0, b >= 0 and a*b = 0.
inline double fischer_burmeister(double a, double b, double mu_s = 1e-10) {
  return a + b - std::sqrt(a * a + b * b + mu_s);
}

/// Componentwise semismooth residual: free rows copy F, lower-bounded rows
/// apply fischer_burmeister(z_j - l_j, F_j).
inline Vec fb_residual(const McpProblem& problem, const Vec& z, double mu_s = 1e-10) {
  const Vec F = problem.residual(z);
  Vec phi(problem.size);
  for (int j = 0; j < problem.size; ++j) {
    phi[j] = problem.bounded(j) ? fischer_burmeister(z[j] - problem.lower[j], F[j], mu_s) : F[j];
  }
  return phi;
}

namespace detail {

// Jacobian of the FB residual from F and J_F at z.
inline Mat fb_jacobian(const McpProblem& problem, const Vec& z, const Vec& F, const Mat& JF,
                       double mu_s) {
  Mat J = JF;
  for (int j = 0; j < problem.size; ++j) {
    if (!problem.bounded(j)) continue;
    const double a = z[j] - problem.lower[j];
    const double b = F[j];
    const double r = std::sqrt(a * a + b * b + mu_s);
    const double da = 1.0 - a / r;
    const double db = 1.0 - b / r;
    J.row(j) = db * JF.row(j);
    J(j, j) += da;
  }
  return J;
}

}  // namespace detail

/// Damped semismooth Newton on the Fischer-Burmeister reformulation, with
/// Armijo backtracking on the merit 1/2 ||Phi||^2 and a Levenberg fallback
/// when the Newton system degenerates.
inline SolverResult solve_mcp(const McpProblem& problem, const SolverConfig& config, Vec z0) {
  if (z0.size() != problem.size) throw std::invalid_argument("solve_mcp: z0 length mismatch");
  for (int j = 0; j < problem.size; ++j) {
    if (problem.bounded(j)) z0[j] = std::max(z0[j], problem.lower[j]);
  }

  SolverResult res;
  res.z = std::move(z0);
  const double mu_s = config.fb_smoothing;

  Vec phi = fb_residual(problem, res.z, mu_s);
  double merit = 0.5 * phi.squaredNorm();

  for (int iter = 0; iter < config.max_iter; ++iter) {
    res.residual_inf = phi.lpNorm<Eigen::Infinity>();
    if (res.residual_inf <= config.tol) {
      res.status = SolveStatus::converged;
      res.iterations = iter;
      res.trace.push_back({iter, res.residual_inf, 0.0, merit});
      return res;
    }

    const Vec F = problem.residual(res.z);
    const Mat JF = problem.jacobian(res.z);
    const Mat J = detail::fb_jacobian(problem, res.z, F, JF, mu_s);
    const Vec grad_merit = J.transpose() * phi;

    // Armijo backtracking along d; returns the accepted step or 0.
    auto line_search = [&](const Vec& d, double slope) -> double {
      double t = 1.0;
      while (t >= config.min_step) {
        const Vec z_try = res.z + t * d;
        const Vec phi_try = fb_residual(problem, z_try, mu_s);
        const double merit_try = 0.5 * phi_try.squaredNorm();
        if (merit_try <= merit + config.armijo_slope * t * slope) {
          res.trace.push_back({iter, res.residual_inf, t, merit});
          res.z = z_try;
          phi = phi_try;
          merit = merit_try;
          return t;
        }
        t *= config.backtrack;
      }
      return 0.0;
    };

    // Levenberg-regularized Gauss-Newton direction on the merit; always a
    // descent direction away from merit-stationary points.
    auto levenberg_direction = [&](Vec& d) -> bool {
      double nu = config.levenberg_init;
      const Mat JtJ = J.transpose() * J;
      for (int attempt = 0; attempt < 60; ++attempt) {
        Mat H = JtJ;
        H.diagonal().array() += nu;
        Eigen::LLT<Mat> llt(H);
        if (llt.info() == Eigen::Success) {
          d = llt.solve(-grad_merit);
          if (d.allFinite() && grad_merit.dot(d) < 0.0) return true;
        }
        nu *= config.levenberg_growth;
      }
      return false;
    };

    // Prefer the Newton direction; fall back to the Levenberg direction when
    // the factorization degenerates or the Newton step makes no progress.
    Vec d = Eigen::PartialPivLU<Mat>(J).solve(-phi);
    bool newton_usable = d.allFinite() && (J * d + phi).lpNorm<Eigen::Infinity>() <=
                                              1e-8 * std::max(1.0, phi.lpNorm<Eigen::Infinity>());
    if (newton_usable && grad_merit.dot(d) >= 0.0) newton_usable = false;

    bool accepted = newton_usable && line_search(d, grad_merit.dot(d)) > 0.0;
    if (!accepted) {
      Vec d_lm;
      if (!levenberg_direction(d_lm)) {
        res.status = SolveStatus::singular;
        res.iterations = iter;
        res.trace.push_back({iter, res.residual_inf, 0.0, merit});
        return res;
      }
      accepted = line_search(d_lm, grad_merit.dot(d_lm)) > 0.0;
    }
    if (!accepted) {
      res.status = SolveStatus::line_search_failure;
      res.iterations = iter;
      return res;
    }
  }

  res.residual_inf = phi.lpNorm<Eigen::Infinity>();
  res.iterations = config.max_iter;
  if (res.residual_inf <= config.tol) {
    res.status = SolveStatus::converged;
  } else {
    res.status = SolveStatus::max_iter;
  }
  res.trace.push_back({res.iterations, res.residual_inf, 0.0, merit});
  return res;
}

/// Writes the iteration trace as CSV: iteration, residual inf-norm, step length.
inline void write_trace_csv(const SolverResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_trace_csv: cannot open " + path);
  out << "iteration,residual_inf,step_length\n";
  char buf[96];
  for (const auto& rec : result.trace) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", rec.iteration, rec.residual_inf,
                  rec.step_length);
    out << buf;
  }
}

}  // namespace gnep
