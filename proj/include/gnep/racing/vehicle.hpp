#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "gnep/racing/track.hpp"

namespace gnep::racing {

/// Curvilinear kinematic-bicycle state: speed, heading error to the
/// centerline, arc-length progress, lateral deviation, and inertial position.
struct VehicleState {
  double speed = 0.0;    // v [m/s]
  double heading = 0.0;  // psi, relative to centerline tangent [rad]
  double progress = 0.0; // s [m]
  double lateral = 0.0;  // t [m]
  double X = 0.0;
  double Y = 0.0;
};

struct VehicleInput {
  double accel = 0.0;  // u_a [m/s^2]
  double steer = 0.0;  // u_delta [rad]
};

struct RacingConfig {
  int horizon = 10;            // N
  double dt = 0.1;             // [s]
  double effort_weight = 0.1;  // beta
  double d_safe = 0.4;         // minimum inter-car distance [m]
  double v_max[2] = {3.0, 2.85};
  double v_min = 0.0;
  double wheelbase = 0.3;      // l [m]
  double accel_limit = 3.0;    // |u_a| bound
  double steer_limit = 0.4;    // |u_delta| bound
  double lateral_margin = 0.1; // drivable band is |t| <= H - margin

  void validate() const {
    if (horizon < 2) throw std::invalid_argument("RacingConfig: horizon must be >= 2");
    if (dt <= 0 || effort_weight <= 0 || d_safe <= 0 || wheelbase <= 0 || accel_limit <= 0 ||
        steer_limit <= 0 || lateral_margin <= 0 || v_max[0] <= 0 || v_max[1] <= 0) {
      throw std::invalid_argument("RacingConfig: all parameters must be positive");
    }
    if (v_min < 0) throw std::invalid_argument("RacingConfig: v_min must be >= 0");
  }
};

/// State with inertial position filled in from the track mapping.
inline VehicleState make_state(const Track& track, double s, double t, double v,
                               double psi = 0.0) {
  VehicleState st;
  st.speed = v;
  st.heading = psi;
  st.progress = s;
  st.lateral = t;
  track.frenet_to_inertial(s, t, st.X, st.Y);
  return st;
}

inline double distance(const VehicleState& a, const VehicleState& b) {
  return std::hypot(a.X - b.X, a.Y - b.Y);
}

/// Explicit-Euler curvilinear bicycle update. Throws on the Frenet
/// singularity 1 - kappa*t <= 0.
inline VehicleState bicycle_step(const VehicleState& state, const VehicleInput& input,
                                 const Track& track, const RacingConfig& cfg) {
  const double kappa = track.curvature_at(state.progress);
  const double denom = 1.0 - kappa * state.lateral;
  if (denom <= 0.0) {
    std::ostringstream msg;
    msg << "bicycle_step: Frenet singularity (1 - kappa*t = " << denom << ") at s=" << state.progress
        << " t=" << state.lateral;
    throw std::domain_error(msg.str());
  }
  const double s_rate = state.speed * std::cos(state.heading) / denom;
  VehicleState next;
  next.speed = state.speed + input.accel * cfg.dt;
  next.heading = state.heading +
                 (state.speed / cfg.wheelbase * std::tan(input.steer) - kappa * s_rate) * cfg.dt;
  next.progress = state.progress + s_rate * cfg.dt;
  next.lateral = state.lateral + state.speed * std::sin(state.heading) * cfg.dt;
  track.frenet_to_inertial(next.progress, next.lateral, next.X, next.Y);
  return next;
}

}  // namespace gnep::racing
