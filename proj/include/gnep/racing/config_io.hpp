#pragma once

#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "gnep/racing/track.hpp"
#include "gnep/racing/vehicle.hpp"

namespace gnep::racing {

/// A self-contained racing setup parsed from JSON (track geometry, vehicle
/// parameters, and one scenario: two cars plus the aggressiveness scale).
struct ScenarioConfig {
  std::shared_ptr<const Track> track;
  RacingConfig cfg;
  VehicleState car1;  // leader / opponent
  VehicleState car2;  // chaser / ego
  double alpha = 1.0;
  double race_duration = 2.0;
};

inline Track parse_track(const nlohmann::json& j) {
  Pose start;
  if (j.contains("start")) {
    start.x = j["start"].value("x", 0.0);
    start.y = j["start"].value("y", 0.0);
    start.heading = j["start"].value("heading", 0.0);
  }
  std::vector<SegmentSpec> segments;
  for (const auto& js : j.at("segments")) {
    SegmentSpec seg;
    const std::string kind = js.at("kind").get<std::string>();
    seg.length = js.at("length").get<double>();
    if (kind == "line") {
      seg.kind = SegmentKind::line;
    } else if (kind == "arc") {
      seg.kind = SegmentKind::arc;
      if (js.contains("curvature")) {
        seg.curvature = js["curvature"].get<double>();
      } else {
        const double radius = js.at("radius").get<double>();
        const std::string dir = js.value("direction", "left");
        if (radius <= 0.0) throw std::invalid_argument("track config: radius must be positive");
        seg.curvature = (dir == "right" ? -1.0 : 1.0) / radius;
      }
    } else {
      throw std::invalid_argument("track config: unknown segment kind '" + kind + "'");
    }
    segments.push_back(seg);
  }
  return Track(start, segments, j.at("half_width").get<double>(), j.value("loop", false));
}

inline RacingConfig parse_vehicles(const nlohmann::json& j) {
  RacingConfig cfg;
  cfg.horizon = j.value("horizon", cfg.horizon);
  cfg.dt = j.value("dt", cfg.dt);
  cfg.effort_weight = j.value("effort_weight", cfg.effort_weight);
  cfg.d_safe = j.value("d_safe", cfg.d_safe);
  if (j.contains("v_max")) {
    const auto& vm = j["v_max"];
    if (!vm.is_array() || vm.size() != 2) {
      throw std::invalid_argument("vehicle config: v_max must be a 2-element array");
    }
    cfg.v_max[0] = vm[0].get<double>();
    cfg.v_max[1] = vm[1].get<double>();
  }
  cfg.v_min = j.value("v_min", cfg.v_min);
  cfg.wheelbase = j.value("wheelbase", cfg.wheelbase);
  cfg.accel_limit = j.value("accel_limit", cfg.accel_limit);
  cfg.steer_limit = j.value("steer_limit", cfg.steer_limit);
  cfg.lateral_margin = j.value("lateral_margin", cfg.lateral_margin);
  cfg.validate();
  return cfg;
}

inline ScenarioConfig load_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  in >> j;

  ScenarioConfig sc;
  sc.track = std::make_shared<const Track>(parse_track(j.at("track")));
  sc.cfg = j.contains("vehicles") ? parse_vehicles(j["vehicles"]) : RacingConfig{};

  if (j.contains("scenario")) {
    const auto& js = j["scenario"];
    const auto& players = js.at("players");
    if (!players.is_array() || players.size() != 2) {
      throw std::invalid_argument("scenario config: players must be a 2-element array");
    }
    auto parse_state = [&](const nlohmann::json& jp) {
      return make_state(*sc.track, jp.at("s").get<double>(), jp.value("t", 0.0),
                        jp.at("v").get<double>(), jp.value("psi", 0.0));
    };
    sc.car1 = parse_state(players[0]);
    sc.car2 = parse_state(players[1]);
    sc.alpha = js.value("alpha", 1.0);
    sc.race_duration = js.value("race_duration", 2.0);
  }
  return sc;
}

}  // namespace gnep::racing
