#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "gnep/game.hpp"
#include "gnep/racing/track.hpp"
#include "gnep/racing/vehicle.hpp"

namespace gnep::racing {

/// Index bookkeeping for one player's decision block:
/// [x_1 .. x_N (6 each), u_0 .. u_{N-1} (2 each)].
struct RacingVars {
  int N = 0;

  int block() const { return 8 * N; }
  int state_off(int k) const { return 6 * (k - 1); }     // k in 1..N
  int input_off(int k) const { return 6 * N + 2 * k; }   // k in 0..N-1
  int eq_count() const { return 6 * N; }
  int ineq_count() const { return 8 * N; }
  int shared_count() const { return N - 1; }             // collision rows k = 1..N-1
};

namespace detail {

// Keeps the curvilinear denominator away from the Frenet singularity so that
// infeasible solver iterates cannot blow up the residual map. Solutions live
// far from the clamp (|t| is box-constrained well inside 1/|kappa|).
inline constexpr double kFrenetClampDenom = 0.05;

struct StepEval {
  Vec value;                 // f(q, u), 6 entries
  Mat jac;                   // 6 x 8 over [v, psi, s, t, X, Y, u_a, u_delta]
  std::array<Mat, 6> hess;   // 8 x 8 per component
};

// Explicit-Euler bicycle step and its derivatives. Track curvature is
// piecewise constant, so d(kappa)/ds = 0 wherever defined.
inline StepEval eval_step(const Track& track, const RacingConfig& cfg,
                          const Eigen::Ref<const Vec>& q, const Eigen::Ref<const Vec>& u,
                          int order) {
  const double dt = cfg.dt;
  const double wheelbase = cfg.wheelbase;
  const double v = q[0], psi = q[1], s = q[2], t = q[3];
  const double ua = u[0], ud = u[1];

  const double c = std::cos(psi), sn = std::sin(psi);
  const double kappa = track.curvature_at(s);
  const double denom_raw = 1.0 - kappa * t;
  const bool clamped = denom_raw <= kFrenetClampDenom;
  const double D = clamped ? kFrenetClampDenom : denom_raw;
  // Derivative of D with respect to t vanishes in the clamped regime.
  const double dD_dt = clamped ? 0.0 : -kappa;

  const double r = v * c / D;
  const double tau = std::tan(ud);
  const double sec2 = 1.0 + tau * tau;

  StepEval out;
  out.value.resize(6);
  const double s_next = s + dt * r;
  const double t_next = t + dt * v * sn;
  out.value[0] = v + dt * ua;
  out.value[1] = psi + dt * (v * tau / wheelbase - kappa * r);
  out.value[2] = s_next;
  out.value[3] = t_next;

  const Pose pose = track.centerline_pose(s_next);
  const double Tx = std::cos(pose.heading), Ty = std::sin(pose.heading);
  const double Nx = -Ty, Ny = Tx;
  out.value[4] = pose.x + t_next * Nx;
  out.value[5] = pose.y + t_next * Ny;

  if (order < 1) return out;

  const double r_v = c / D;
  const double r_psi = -v * sn / D;
  const double r_t = -r * dD_dt / D;  // = r*kappa/D when unclamped

  out.jac = Mat::Zero(6, 8);
  out.jac(0, 0) = 1.0;
  out.jac(0, 6) = dt;

  out.jac(1, 0) = dt * (tau / wheelbase - kappa * r_v);
  out.jac(1, 1) = 1.0 - dt * kappa * r_psi;
  out.jac(1, 3) = -dt * kappa * r_t;
  out.jac(1, 7) = dt * v * sec2 / wheelbase;

  out.jac(2, 0) = dt * r_v;
  out.jac(2, 1) = dt * r_psi;
  out.jac(2, 2) = 1.0;
  out.jac(2, 3) = dt * r_t;

  out.jac(3, 0) = dt * sn;
  out.jac(3, 1) = dt * v * c;
  out.jac(3, 3) = 1.0;

  // Frenet map partials at (s_next, t_next).
  const double kap2 = track.curvature_at(s_next);
  const double D2 = 1.0 - kap2 * t_next;
  const double Phi_s[2] = {D2 * Tx, D2 * Ty};
  const double Phi_t[2] = {Nx, Ny};
  for (int comp = 0; comp < 2; ++comp) {
    out.jac.row(4 + comp) =
        Phi_s[comp] * out.jac.row(2) + Phi_t[comp] * out.jac.row(3);
  }

  if (order < 2) return out;

  const double r_vpsi = -sn / D;
  const double r_vt = -(c / D) * dD_dt / D;          // = c*kappa/D^2 unclamped
  const double r_psipsi = -v * c / D;
  const double r_psit = (v * sn / D) * dD_dt / D;    // = -v*sn*kappa/D^2 unclamped
  const double r_tt = 2.0 * r * dD_dt * dD_dt / (D * D);

  for (auto& H : out.hess) H = Mat::Zero(8, 8);

  auto sym_set = [](Mat& H, int a, int b, double val) {
    H(a, b) += val;
    if (a != b) H(b, a) += val;
  };

  // f2 = psi + dt*(v*tau/l - kappa*r)
  sym_set(out.hess[1], 0, 1, -dt * kappa * r_vpsi);
  sym_set(out.hess[1], 0, 3, -dt * kappa * r_vt);
  sym_set(out.hess[1], 0, 7, dt * sec2 / wheelbase);
  sym_set(out.hess[1], 1, 1, -dt * kappa * r_psipsi);
  sym_set(out.hess[1], 1, 3, -dt * kappa * r_psit);
  sym_set(out.hess[1], 3, 3, -dt * kappa * r_tt);
  sym_set(out.hess[1], 7, 7, dt * v * 2.0 * tau * sec2 / wheelbase);

  // f3 = s + dt*r
  sym_set(out.hess[2], 0, 1, dt * r_vpsi);
  sym_set(out.hess[2], 0, 3, dt * r_vt);
  sym_set(out.hess[2], 1, 1, dt * r_psipsi);
  sym_set(out.hess[2], 1, 3, dt * r_psit);
  sym_set(out.hess[2], 3, 3, dt * r_tt);

  // f4 = t + dt*v*sin(psi)
  sym_set(out.hess[3], 0, 1, dt * c);
  sym_set(out.hess[3], 1, 1, -dt * v * sn);

  // f5, f6 = Frenet map composed with (f3, f4).
  const double Phi_ss[2] = {D2 * kap2 * Nx, D2 * kap2 * Ny};
  const double Phi_st[2] = {-kap2 * Tx, -kap2 * Ty};
  const Vec g3 = out.jac.row(2).transpose();
  const Vec g4 = out.jac.row(3).transpose();
  for (int comp = 0; comp < 2; ++comp) {
    out.hess[4 + comp] = Phi_ss[comp] * (g3 * g3.transpose()) +
                         Phi_st[comp] * (g3 * g4.transpose() + g4 * g3.transpose()) +
                         Phi_s[comp] * out.hess[2] + Phi_t[comp] * out.hess[3];
  }
  return out;
}

inline Vec state_to_vec(const VehicleState& st) {
  Vec q(6);
  q << st.speed, st.heading, st.progress, st.lateral, st.X, st.Y;
  return q;
}

inline VehicleState vec_to_state(const Eigen::Ref<const Vec>& q) {
  VehicleState st;
  st.speed = q[0];
  st.heading = q[1];
  st.progress = q[2];
  st.lateral = q[3];
  st.X = q[4];
  st.Y = q[5];
  return st;
}

}  // namespace detail

/// One player's decoded plan: states x_0..x_N and inputs u_0..u_{N-1}.
struct PlanView {
  std::vector<VehicleState> states;
  std::vector<VehicleInput> inputs;
};

/// The two-car racing dynamic game in stacked-decision form, together with
/// the per-player shared-constraint scaling (player 1 at ones, player 2 at
/// alpha).
struct RacingGame {
  GameSpec spec;
  ScalingFactors factors;
  RacingVars vars;
  std::shared_ptr<const Track> track;
  RacingConfig cfg;
  std::array<VehicleState, 2> initial;
  double alpha = 1.0;

  int mcp_size() const {
    return 2 * vars.block() + 2 * vars.eq_count() + 2 * vars.ineq_count() + vars.shared_count();
  }

  PlanView plan(const Vec& primal_or_z, int player) const {
    const int off = spec.layout.offsets[player];
    PlanView view;
    view.states.push_back(initial[player]);
    for (int k = 1; k <= vars.N; ++k) {
      view.states.push_back(
          detail::vec_to_state(primal_or_z.segment(off + vars.state_off(k), 6)));
    }
    for (int k = 0; k < vars.N; ++k) {
      const int io = off + vars.input_off(k);
      view.inputs.push_back({primal_or_z[io], primal_or_z[io + 1]});
    }
    return view;
  }

  double cost(const Vec& primal, int player) const { return spec.players[player].cost(primal); }
};

/// Builds the shared-constraint racing game from the two cars' current
/// states. Decision variables are the full state/input trajectories of both
/// players; dynamics enter as per-player equality constraints; collision
/// avoidance (squared-distance form) couples the players at steps 1..N-1.
inline RacingGame build_racing_game(std::shared_ptr<const Track> track, const RacingConfig& cfg,
                                    const VehicleState& car1, const VehicleState& car2,
                                    double alpha, bool require_separation = true) {
  cfg.validate();
  if (!track) throw std::invalid_argument("build_racing_game: null track");
  if (alpha <= 0.0) throw std::invalid_argument("build_racing_game: alpha must be positive");
  const double H = track->half_width();
  for (const VehicleState* st : {&car1, &car2}) {
    if (std::abs(st->lateral) > H + 1e-9) {
      throw std::invalid_argument("build_racing_game: initial state off the track band");
    }
  }
  if (require_separation && distance(car1, car2) < cfg.d_safe - 1e-9) {
    throw std::invalid_argument("build_racing_game: initial states are in collision");
  }

  RacingGame game;
  game.track = std::move(track);
  game.cfg = cfg;
  game.initial = {car1, car2};
  game.alpha = alpha;
  game.vars = RacingVars{cfg.horizon};

  const RacingVars vars = game.vars;
  const int N = vars.N;
  const int ni = vars.block();
  game.spec.layout = VariableLayout({ni, ni});
  game.spec.eq_dims = {vars.eq_count(), vars.eq_count()};
  game.spec.ineq_dims = {vars.ineq_count(), vars.ineq_count()};

  const auto trk = game.track;
  const std::array<Vec, 2> q0 = {detail::state_to_vec(car1), detail::state_to_vec(car2)};
  const double t_lim = H - cfg.lateral_margin;

  for (int i = 0; i < 2; ++i) {
    const int off = game.spec.layout.offsets[i];
    const int off_other = game.spec.layout.offsets[1 - i];
    PlayerFunctions p;

    p.cost = [off, off_other, vars, cfg](const Vec& x) {
      double effort = 0.0;
      for (int k = 0; k < vars.N; ++k) {
        const int io = off + vars.input_off(k);
        effort += x[io] * x[io] + x[io + 1] * x[io + 1];
      }
      const double own_sN = x[off + vars.state_off(vars.N) + 2];
      const double other_sN = x[off_other + vars.state_off(vars.N) + 2];
      return -own_sN + other_sN + 0.5 * cfg.effort_weight * effort;
    };
    p.cost_grad = [off, vars, cfg](const Vec& x) {
      Vec g = Vec::Zero(vars.block());
      g[vars.state_off(vars.N) + 2] = -1.0;
      for (int k = 0; k < vars.N; ++k) {
        const int io = vars.input_off(k);
        g[io] = cfg.effort_weight * x[off + io];
        g[io + 1] = cfg.effort_weight * x[off + io + 1];
      }
      return g;
    };
    p.cost_hess = [off, vars, cfg](const Vec& x) {
      Mat h = Mat::Zero(vars.block(), static_cast<int>(x.size()));
      for (int k = 0; k < vars.N; ++k) {
        const int io = vars.input_off(k);
        h(io, off + io) = cfg.effort_weight;
        h(io + 1, off + io + 1) = cfg.effort_weight;
      }
      return h;
    };

    // Dynamics defects x_{k+1} - f(x_k, u_k); x_0 is the fixed current state.
    const Vec q_init = q0[i];
    p.eq = [off, vars, cfg, trk, q_init](const Vec& x) {
      Vec h(vars.eq_count());
      for (int k = 0; k < vars.N; ++k) {
        const Vec q = k == 0 ? q_init : Vec(x.segment(off + vars.state_off(k), 6));
        const Vec u = x.segment(off + vars.input_off(k), 2);
        const auto step = detail::eval_step(*trk, cfg, q, u, 0);
        h.segment(6 * k, 6) = x.segment(off + vars.state_off(k + 1), 6) - step.value;
      }
      return h;
    };
    p.eq_jac = [off, vars, cfg, trk, q_init](const Vec& x) {
      Mat J = Mat::Zero(vars.eq_count(), vars.block());
      for (int k = 0; k < vars.N; ++k) {
        const Vec q = k == 0 ? q_init : Vec(x.segment(off + vars.state_off(k), 6));
        const Vec u = x.segment(off + vars.input_off(k), 2);
        const auto step = detail::eval_step(*trk, cfg, q, u, 1);
        J.block(6 * k, vars.state_off(k + 1), 6, 6).setIdentity();
        if (k > 0) J.block(6 * k, vars.state_off(k), 6, 6) = -step.jac.leftCols(6);
        J.block(6 * k, vars.input_off(k), 6, 2) = -step.jac.rightCols(2);
      }
      return J;
    };
    p.eq_hess = [off, vars, cfg, trk, q_init](const Vec& x, const Vec& w) {
      Mat H = Mat::Zero(vars.block(), vars.block());
      for (int k = 0; k < vars.N; ++k) {
        const Vec q = k == 0 ? q_init : Vec(x.segment(off + vars.state_off(k), 6));
        const Vec u = x.segment(off + vars.input_off(k), 2);
        const auto step = detail::eval_step(*trk, cfg, q, u, 2);
        Mat Hk = Mat::Zero(8, 8);
        for (int c = 0; c < 6; ++c) Hk -= w[6 * k + c] * step.hess[c];
        // Map local rows/cols [q(0..5), u(6..7)] into the decision block.
        int map[8];
        for (int a = 0; a < 6; ++a) map[a] = k == 0 ? -1 : vars.state_off(k) + a;
        map[6] = vars.input_off(k);
        map[7] = vars.input_off(k) + 1;
        for (int a = 0; a < 8; ++a) {
          if (map[a] < 0) continue;
          for (int b = 0; b < 8; ++b) {
            if (map[b] < 0) continue;
            H(map[a], map[b]) += Hk(a, b);
          }
        }
      }
      return H;
    };

    // Box constraints as "<= 0" rows: speed and lateral bands on x_1..x_N,
    // input boxes on u_0..u_{N-1}.
    const double v_hi = cfg.v_max[i];
    const double v_lo = cfg.v_min;
    p.ineq = [off, vars, cfg, v_hi, v_lo, t_lim](const Vec& x) {
      Vec g(vars.ineq_count());
      for (int k = 1; k <= vars.N; ++k) {
        const int so = off + vars.state_off(k);
        const int row = 4 * (k - 1);
        g[row + 0] = x[so + 0] - v_hi;
        g[row + 1] = v_lo - x[so + 0];
        g[row + 2] = x[so + 3] - t_lim;
        g[row + 3] = -x[so + 3] - t_lim;
      }
      for (int k = 0; k < vars.N; ++k) {
        const int io = off + vars.input_off(k);
        const int row = 4 * vars.N + 4 * k;
        g[row + 0] = x[io + 0] - cfg.accel_limit;
        g[row + 1] = -x[io + 0] - cfg.accel_limit;
        g[row + 2] = x[io + 1] - cfg.steer_limit;
        g[row + 3] = -x[io + 1] - cfg.steer_limit;
      }
      return g;
    };
    Mat ineq_jac = Mat::Zero(vars.ineq_count(), ni);
    for (int k = 1; k <= N; ++k) {
      const int so = vars.state_off(k);
      const int row = 4 * (k - 1);
      ineq_jac(row + 0, so + 0) = 1.0;
      ineq_jac(row + 1, so + 0) = -1.0;
      ineq_jac(row + 2, so + 3) = 1.0;
      ineq_jac(row + 3, so + 3) = -1.0;
    }
    for (int k = 0; k < N; ++k) {
      const int io = vars.input_off(k);
      const int row = 4 * N + 4 * k;
      ineq_jac(row + 0, io + 0) = 1.0;
      ineq_jac(row + 1, io + 0) = -1.0;
      ineq_jac(row + 2, io + 1) = 1.0;
      ineq_jac(row + 3, io + 1) = -1.0;
    }
    p.ineq_jac = [ineq_jac](const Vec&) { return ineq_jac; };
    p.ineq_hess = [ni](const Vec&, const Vec&) { return Mat::Zero(ni, ni); };

    game.spec.players.push_back(std::move(p));
  }

  // Shared collision-avoidance rows: d_safe^2 - |p1_k - p2_k|^2 <= 0.
  const int n = game.spec.layout.total;
  const int off1 = game.spec.layout.offsets[0];
  const int off2 = game.spec.layout.offsets[1];
  game.spec.shared.dim = vars.shared_count();
  game.spec.shared.value = [off1, off2, vars, cfg](const Vec& x) {
    Vec s(vars.shared_count());
    for (int k = 1; k < vars.N; ++k) {
      const int a = off1 + vars.state_off(k);
      const int b = off2 + vars.state_off(k);
      const double dx = x[a + 4] - x[b + 4];
      const double dy = x[a + 5] - x[b + 5];
      s[k - 1] = cfg.d_safe * cfg.d_safe - dx * dx - dy * dy;
    }
    return s;
  };
  game.spec.shared.jac = [off1, off2, vars, n](const Vec& x) {
    Mat J = Mat::Zero(vars.shared_count(), n);
    for (int k = 1; k < vars.N; ++k) {
      const int a = off1 + vars.state_off(k);
      const int b = off2 + vars.state_off(k);
      const double dx = x[a + 4] - x[b + 4];
      const double dy = x[a + 5] - x[b + 5];
      J(k - 1, a + 4) = -2.0 * dx;
      J(k - 1, a + 5) = -2.0 * dy;
      J(k - 1, b + 4) = 2.0 * dx;
      J(k - 1, b + 5) = 2.0 * dy;
    }
    return J;
  };
  game.spec.shared.hess = [off1, off2, vars, n](const Vec&, const Vec& w) {
    Mat H = Mat::Zero(n, n);
    for (int k = 1; k < vars.N; ++k) {
      const int a = off1 + vars.state_off(k);
      const int b = off2 + vars.state_off(k);
      for (int c = 4; c <= 5; ++c) {
        H(a + c, a + c) += -2.0 * w[k - 1];
        H(b + c, b + c) += -2.0 * w[k - 1];
        H(a + c, b + c) += 2.0 * w[k - 1];
        H(b + c, a + c) += 2.0 * w[k - 1];
      }
    }
    return H;
  };

  game.factors = ScalingFactors({Vec::Ones(vars.shared_count()),
                                 Vec::Constant(vars.shared_count(), alpha)});
  game.spec.validate();
  return game;
}

enum class GuessMode { follow_center, shift_left, shift_right };

/// Structured initial guess for the racing MCP: constant-speed rollout with
/// curvature-matched steering (exact dynamics defects). The shift modes bias
/// player 2's lane to seed a particular passing side; player 1 stays on its
/// line. Multipliers start at zero.
inline Vec rollout_initial_guess(const RacingGame& game, GuessMode mode, double shift = 0.2) {
  const RacingVars vars = game.vars;
  Vec z0 = Vec::Zero(game.mcp_size());

  for (int i = 0; i < 2; ++i) {
    const int off = game.spec.layout.offsets[i];
    Vec q = detail::state_to_vec(game.initial[i]);
    const bool biased = i == 1 && mode != GuessMode::follow_center;
    const double t_goal =
        !biased ? q[3]
                : std::clamp(q[3] + (mode == GuessMode::shift_left ? shift : -shift),
                             -(game.track->half_width() - game.cfg.lateral_margin - 0.02),
                             game.track->half_width() - game.cfg.lateral_margin - 0.02);

    for (int k = 0; k < vars.N; ++k) {
      Vec u(2);
      u[0] = 0.0;
      if (!biased) {
        const double kappa = game.track->curvature_at(q[2]);
        const double denom = std::max(1.0 - kappa * q[3], detail::kFrenetClampDenom);
        u[1] = std::clamp(std::atan(game.cfg.wheelbase * kappa * std::cos(q[1]) / denom),
                          -game.cfg.steer_limit, game.cfg.steer_limit);
        q = detail::eval_step(*game.track, game.cfg, q, u, 0).value;
      } else {
        // Kinematic lateral ramp toward the biased lane; defects stay small
        // but need not vanish.
        const double speed = std::max(q[0], 0.1);
        const double t_next = q[3] + std::clamp(t_goal - q[3], -0.3 * speed * game.cfg.dt,
                                                0.3 * speed * game.cfg.dt);
        const double kappa = game.track->curvature_at(q[2]);
        const double denom = std::max(1.0 - kappa * q[3], detail::kFrenetClampDenom);
        q[2] += speed * std::cos(q[1]) / denom * game.cfg.dt;
        q[1] = std::asin(std::clamp((t_next - q[3]) / (speed * game.cfg.dt), -0.99, 0.99));
        q[3] = t_next;
        double X, Y;
        game.track->frenet_to_inertial(q[2], q[3], X, Y);
        q[4] = X;
        q[5] = Y;
      }
      z0.segment(off + vars.state_off(k + 1), 6) = q;
      z0.segment(off + vars.input_off(k), 2) = u;
    }
  }
  return z0;
}

/// Receding-horizon warm start: previous solution with each player's plan
/// shifted forward one step (tail duplicated); multipliers carried over.
inline Vec shift_plan(const RacingGame& game, const Vec& z_prev) {
  Vec z = z_prev;
  const RacingVars vars = game.vars;
  for (int i = 0; i < 2; ++i) {
    const int off = game.spec.layout.offsets[i];
    for (int k = 1; k < vars.N; ++k) {
      z.segment(off + vars.state_off(k), 6) = z_prev.segment(off + vars.state_off(k + 1), 6);
    }
    for (int k = 0; k + 1 < vars.N; ++k) {
      z.segment(off + vars.input_off(k), 2) = z_prev.segment(off + vars.input_off(k + 1), 2);
    }
  }
  return z;
}

}  // namespace gnep::racing
