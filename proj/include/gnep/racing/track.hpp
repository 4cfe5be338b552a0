#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "gnep/types.hpp"

namespace gnep::racing {

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
};

enum class SegmentKind { line, arc };

struct SegmentSpec {
  SegmentKind kind = SegmentKind::line;
  double length = 0.0;
  double curvature = 0.0;  // 0 for lines, +-1/R for arcs (positive turns left)
};

/// Piecewise line/arc centerline with a constant half width. Segments are
/// chained so positions and tangents match at every joint. Arc-length
/// coordinates beyond the ends continue the boundary segment's geometry,
/// which keeps the mapping smooth for solvers; loop tracks wrap instead.
///
/// The curvature profile kappa(s) used by the vehicle dynamics is blended
/// linearly over a short band at each joint so that it is continuous in s
/// (a discontinuous profile would put jumps into the dynamics residual and
/// stall Newton-type solvers whenever a knot crosses a joint). The geometry
/// itself stays exactly piecewise line/arc.
class Track {
 public:
  Track() = default;

  Track(Pose start, std::vector<SegmentSpec> specs, double half_width, bool loop = false,
        double curvature_blend = 0.15)
      : half_width_(half_width), blend_(curvature_blend), loop_(loop) {
    if (specs.empty()) throw std::invalid_argument("Track: needs at least one segment");
    if (half_width <= 0.0) throw std::invalid_argument("Track: half width must be positive");
    if (curvature_blend < 0.0) throw std::invalid_argument("Track: negative curvature blend");
    Pose pose = start;
    double s0 = 0.0;
    for (const auto& spec : specs) {
      if (spec.length <= 0.0) throw std::invalid_argument("Track: segment length must be positive");
      if (spec.kind == SegmentKind::line && spec.curvature != 0.0) {
        throw std::invalid_argument("Track: line segment with nonzero curvature");
      }
      if (spec.kind == SegmentKind::arc && spec.curvature == 0.0) {
        throw std::invalid_argument("Track: arc segment with zero curvature");
      }
      if (curvature_blend > 0.5 * spec.length) {
        throw std::invalid_argument("Track: curvature blend wider than half a segment");
      }
      segments_.push_back({spec.kind, spec.length, spec.curvature, pose, s0});
      pose = local_pose(segments_.back(), spec.length);
      s0 += spec.length;
    }
    length_ = s0;
    if (loop_) {
      const Pose& a = segments_.front().start;
      const double dh = std::remainder(pose.heading - a.heading, 2.0 * M_PI);
      if (std::hypot(pose.x - a.x, pose.y - a.y) > 1e-6 || std::abs(dh) > 1e-6) {
        throw std::invalid_argument("Track: loop does not close smoothly");
      }
    }
  }

  static Track straight(double length, double half_width, Pose start = {}) {
    return Track(start, {{SegmentKind::line, length, 0.0}}, half_width);
  }

  double length() const { return length_; }
  double half_width() const { return half_width_; }
  bool is_loop() const { return loop_; }
  int num_segments() const { return static_cast<int>(segments_.size()); }
  double segment_start(int i) const { return segments_[i].s0; }
  double segment_curvature(int i) const { return segments_[i].curvature; }

  /// Continuous curvature profile (joint-blended) driving the dynamics.
  double curvature_at(double s) const { return curvature_profile(s).first; }

  /// d(kappa)/ds of the blended profile; nonzero only inside blend bands.
  double curvature_slope_at(double s) const { return curvature_profile(s).second; }

  /// Exact curvature of the segment containing s (the geometric value behind
  /// the Frenet map derivatives).
  double geometric_curvature_at(double s) const { return locate(s).seg->curvature; }

  /// Centerline point plus lateral offset along the left-of-travel normal.
  void frenet_to_inertial(double s, double t, double& X, double& Y) const {
    const Location loc = locate(s);
    const Pose p = local_pose(*loc.seg, loc.u);
    X = p.x - t * std::sin(p.heading);
    Y = p.y + t * std::cos(p.heading);
  }

  /// Centerline pose (point and tangent heading) at arc length s.
  Pose centerline_pose(double s) const {
    const Location loc = locate(s);
    return local_pose(*loc.seg, loc.u);
  }

 private:
  struct Segment {
    SegmentKind kind;
    double length;
    double curvature;
    Pose start;
    double s0;  // arc length at segment start
  };

  struct Location {
    const Segment* seg;
    double u;  // arc length within the segment (may exceed [0, length] at the ends)
  };

  static Pose local_pose(const Segment& seg, double u) {
    Pose p;
    const double h = seg.start.heading;
    if (seg.kind == SegmentKind::line) {
      p.x = seg.start.x + u * std::cos(h);
      p.y = seg.start.y + u * std::sin(h);
      p.heading = h;
    } else {
      const double k = seg.curvature;
      p.x = seg.start.x + (std::sin(h + k * u) - std::sin(h)) / k;
      p.y = seg.start.y - (std::cos(h + k * u) - std::cos(h)) / k;
      p.heading = h + k * u;
    }
    return p;
  }

  Location locate(double s) const {
    if (loop_) {
      s = std::fmod(s, length_);
      if (s < 0.0) s += length_;
    }
    if (s <= 0.0) return {&segments_.front(), s};
    if (s >= length_) return {&segments_.back(), s - segments_.back().s0};
    int lo = 0, hi = static_cast<int>(segments_.size()) - 1;
    while (lo < hi) {
      const int mid = (lo + hi + 1) / 2;
      if (segments_[mid].s0 <= s) lo = mid; else hi = mid - 1;
    }
    return {&segments_[lo], s - segments_[lo].s0};
  }

  // Blended curvature and its slope at s: linear interpolation between the
  // adjoining segments' curvatures over [joint - blend, joint + blend].
  std::pair<double, double> curvature_profile(double s) const {
    if (loop_) {
      s = std::fmod(s, length_);
      if (s < 0.0) s += length_;
    }
    const int n = static_cast<int>(segments_.size());
    const Location loc = locate(s);
    const int idx = static_cast<int>(loc.seg - segments_.data());
    const double kappa = loc.seg->curvature;
    if (blend_ <= 0.0) return {kappa, 0.0};

    // Joint behind s (start of this segment).
    if (loc.u < blend_ && (idx > 0 || loop_)) {
      const int prev = idx > 0 ? idx - 1 : n - 1;
      const double k_prev = segments_[prev].curvature;
      const double slope = (kappa - k_prev) / (2.0 * blend_);
      return {0.5 * (kappa + k_prev) + slope * loc.u, slope};
    }
    // Joint ahead of s (end of this segment).
    const double remain = loc.seg->length - loc.u;
    if (remain < blend_ && (idx + 1 < n || loop_)) {
      const int next = idx + 1 < n ? idx + 1 : 0;
      const double k_next = segments_[next].curvature;
      const double slope = (k_next - kappa) / (2.0 * blend_);
      return {0.5 * (kappa + k_next) - slope * remain, slope};
    }
    return {kappa, 0.0};
  }

  std::vector<Segment> segments_;
  double half_width_ = 0.0;
  double length_ = 0.0;
  double blend_ = 0.15;
  bool loop_ = false;
};

}  // namespace gnep::racing
