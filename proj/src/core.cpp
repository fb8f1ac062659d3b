#include "stparse/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace stparse {
namespace {

constexpr Scalar kTimeEps = 1e-9;

int find_name(const std::vector<std::string>& names, const std::string& name) {
  for (size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

void check_duplicates(const std::vector<std::string>& names, const std::string& what,
                      std::vector<std::string>* violations) {
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (!seen.insert(n).second) violations->push_back(what + " contains duplicate '" + n + "'");
  }
}

}  // namespace

const std::string& LabelVocabulary::role_name(int index) const {
  if (index < 0 || index >= role_count()) fail("unknown-symbol", "role index out of range");
  size_t i = static_cast<size_t>(index);
  return i < roles.size() ? roles[i] : portables[i - roles.size()];
}

int LabelVocabulary::role_index(const std::string& name) const {
  int i = find_name(roles, name);
  if (i >= 0) return i;
  int o = find_name(portables, name);
  return o >= 0 ? static_cast<int>(roles.size()) + o : -1;
}

int LabelVocabulary::event_index(const std::string& name) const {
  return find_name(events, name);
}

int LabelVocabulary::scene_class_index(const std::string& name) const {
  return find_name(scene_classes, name);
}

std::vector<std::string> LabelVocabulary::validate() const {
  std::vector<std::string> violations;
  if (events.empty()) violations.push_back("events is empty");
  if (roles.empty()) violations.push_back("roles is empty");
  if (portables.empty()) violations.push_back("portables is empty");
  if (scene_classes.empty()) violations.push_back("sceneClasses is empty");
  check_duplicates(events, "events", &violations);
  check_duplicates(roles, "roles", &violations);
  check_duplicates(portables, "portables", &violations);
  check_duplicates(scene_classes, "sceneClasses", &violations);
  // Roles and portables share one index space, so names must not collide
  // across the two sets either.
  for (const auto& p : portables) {
    if (find_name(roles, p) >= 0)
      violations.push_back("name '" + p + "' appears in both roles and portables");
  }
  return violations;
}

Vec2 Trajectory::position_at(Scalar t) const {
  if (t <= samples.front().t) return samples.front().pos;
  if (t >= samples.back().t) return samples.back().pos;
  size_t hi = 1;
  while (samples[hi].t < t) ++hi;
  const TrackSample& a = samples[hi - 1];
  const TrackSample& b = samples[hi];
  Scalar w = (t - a.t) / (b.t - a.t);
  return a.pos + w * (b.pos - a.pos);
}

std::string Trajectory::check() const {
  if (samples.size() < 2) return "fewer than 2 samples";
  for (size_t i = 0; i < samples.size(); ++i) {
    const TrackSample& s = samples[i];
    if (!std::isfinite(s.t) || !std::isfinite(s.pos.x()) || !std::isfinite(s.pos.y()))
      return "non-finite sample at index " + std::to_string(i);
    if (i > 0 && s.t <= samples[i - 1].t)
      return "t not strictly increasing at index " + std::to_string(i);
  }
  return "";
}

Scalar TrajectorySegment::mean_speed() const {
  Scalar elapsed = times.back() - times.front();
  if (elapsed <= 0) return 0;
  Scalar path = 0;
  for (size_t i = 1; i < points.size(); ++i) path += (points[i] - points[i - 1]).norm();
  return path / elapsed;
}

Trajectory resample(const Trajectory& trajectory, Scalar tick) {
  std::string defect = trajectory.check();
  if (!defect.empty()) fail("invalid-trajectory", trajectory.id + ": " + defect);
  if (!(tick > 0)) fail("invalid-argument", "tick must be positive");
  Trajectory out;
  out.id = trajectory.id;
  out.truth_role = trajectory.truth_role;
  Scalar t0 = trajectory.start_time();
  Scalar t1 = trajectory.end_time();
  for (int i = 0;; ++i) {
    Scalar t = t0 + i * tick;
    if (t >= t1 - kTimeEps) break;
    out.samples.push_back({t, trajectory.position_at(t)});
  }
  out.samples.push_back({t1, trajectory.samples.back().pos});
  if (out.samples.size() < 2) out.samples.insert(out.samples.begin(), trajectory.samples.front());
  return out;
}

std::vector<TrajectorySegment> segment(const Trajectory& trajectory, Scalar unit, Scalar tick) {
  if (!(unit > 0)) fail("invalid-argument", "unit must be positive");
  Trajectory curve = resample(trajectory, tick);
  Scalar t0 = curve.start_time();
  Scalar t1 = curve.end_time();

  std::vector<Interval> pieces;
  for (int k = 0;; ++k) {
    Scalar a = t0 + k * unit;
    if (a >= t1 - kTimeEps) break;
    pieces.push_back({a, std::min(a + unit, t1)});
  }
  pieces.back().t1 = t1;
  if (pieces.size() > 1 && pieces.back().length() < unit / 2 - kTimeEps) {
    pieces[pieces.size() - 2].t1 = t1;
    pieces.pop_back();
  }

  std::vector<TrajectorySegment> out;
  for (const Interval& piece : pieces) {
    TrajectorySegment seg;
    seg.trajectory = -1;
    seg.interval = piece;
    for (const TrackSample& s : curve.samples) {
      if (s.t >= piece.t0 - kTimeEps && s.t <= piece.t1 + kTimeEps) {
        seg.times.push_back(s.t);
        seg.points.push_back(s.pos);
      }
    }
    out.push_back(std::move(seg));
  }
  return out;
}

TrajectorySegment slice_on_grid(const Trajectory& trajectory, int trajectory_index,
                                const Interval& interval, Scalar tick) {
  if (!(tick > 0)) fail("invalid-argument", "tick must be positive");
  if (!(interval.length() > 0)) fail("invalid-argument", "interval must have positive length");
  int steps = static_cast<int>(std::round(interval.length() / tick));
  if (std::abs(interval.length() - steps * tick) > 1e-6)
    fail("invalid-argument", "interval length must be a multiple of the tick");
  TrajectorySegment seg;
  seg.trajectory = trajectory_index;
  seg.interval = interval;
  for (int i = 0; i <= steps; ++i) {
    Scalar t = interval.t0 + i * tick;
    seg.times.push_back(t);
    seg.points.push_back(trajectory.position_at(t));
  }
  return seg;
}

Scalar point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  Vec2 ab = b - a;
  Scalar len2 = ab.squaredNorm();
  if (len2 <= 0) return (p - a).norm();
  Scalar w = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + w * ab)).norm();
}

bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& vertices) {
  bool inside = false;
  size_t n = vertices.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = vertices[i];
    const Vec2& b = vertices[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      Scalar x = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

namespace {

int orientation_sign(const Vec2& a, const Vec2& b, const Vec2& c) {
  Scalar v = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
  return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  int o1 = orientation_sign(a, b, c);
  int o2 = orientation_sign(a, b, d);
  int o3 = orientation_sign(c, d, a);
  int o4 = orientation_sign(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

}  // namespace

bool polygon_is_simple(const std::vector<Vec2>& vertices) {
  size_t n = vertices.size();
  if (n < 3) return false;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      // Skip edges sharing an endpoint (adjacent, including the wrap-around).
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_cross(vertices[i], vertices[(i + 1) % n], vertices[j],
                         vertices[(j + 1) % n]))
        return false;
    }
  }
  return true;
}

Scalar SceneModel::distance(const Vec2& p, int scene_class) const {
  Scalar best = kInf;
  for (const SceneObject& obj : objects) {
    if (obj.scene_class != scene_class) continue;
    if (obj.is_point()) {
      best = std::min(best, (p - obj.coords[0]).norm());
      continue;
    }
    if (point_in_polygon(p, obj.coords)) return 0;
    size_t n = obj.coords.size();
    for (size_t i = 0; i < n; ++i)
      best = std::min(best, point_segment_distance(p, obj.coords[i], obj.coords[(i + 1) % n]));
  }
  return best;
}

int Dataset::trajectory_index(const std::string& id) const {
  for (size_t i = 0; i < trajectories.size(); ++i) {
    if (trajectories[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace stparse
