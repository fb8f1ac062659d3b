#pragma once
// Scene-level data model: label vocabulary, trajectories, scene geometry,
// datasets with optional ground-truth groups, and parse/solution containers.
#include <optional>
#include <string>
#include <vector>

#include "stparse/types.hpp"

namespace stparse {

// Label sets. Human roles and portable object classes share one index space:
// index i < roles.size() names roles[i], otherwise portables[i - roles.size()].
struct LabelVocabulary {
  std::vector<std::string> events;
  std::vector<std::string> roles;
  std::vector<std::string> portables;
  std::vector<std::string> scene_classes;

  int role_count() const { return static_cast<int>(roles.size() + portables.size()); }
  const std::string& role_name(int index) const;
  // Each lookup returns -1 when the name is unknown.
  int role_index(const std::string& name) const;
  int event_index(const std::string& name) const;
  int scene_class_index(const std::string& name) const;
  std::vector<std::string> validate() const;
};

struct TrackSample {
  Scalar t = 0;
  Vec2 pos = Vec2::Zero();
};

struct Trajectory {
  std::string id;
  std::vector<TrackSample> samples;
  std::optional<int> truth_role;

  Scalar start_time() const { return samples.front().t; }
  Scalar end_time() const { return samples.back().t; }
  Scalar duration() const { return end_time() - start_time(); }
  Interval span() const { return {start_time(), end_time()}; }
  // Linear interpolation between recorded samples; clamps outside the span.
  Vec2 position_at(Scalar t) const;
  // Empty string when valid, otherwise a description of the first defect.
  std::string check() const;
};

// A slice of one trajectory over a time interval, sampled on a uniform tick
// grid (the final gap may be shorter when the interval is not a tick multiple).
struct TrajectorySegment {
  int trajectory = -1;  // index into the owning dataset
  Interval interval;
  std::vector<Scalar> times;
  std::vector<Vec2> points;

  Vec2 net_displacement() const { return points.back() - points.front(); }
  // Path length divided by elapsed time; zero for single-instant segments.
  Scalar mean_speed() const;
};

// Resamples onto the grid start, start+tick, ... keeping the exact endpoint.
Trajectory resample(const Trajectory& trajectory, Scalar tick);

// Partitions the trajectory span into unit-length segments. A final partial
// segment shorter than unit/2 is merged into its predecessor. Segment points
// are contiguous slices of the resampled curve (boundary points shared).
std::vector<TrajectorySegment> segment(const Trajectory& trajectory, Scalar unit,
                                       Scalar tick = 0.5);

// Samples the trajectory over [interval.t0, interval.t1] at the given tick,
// clamping to the trajectory span where the interval extends beyond it.
TrajectorySegment slice_on_grid(const Trajectory& trajectory, int trajectory_index,
                                const Interval& interval, Scalar tick);

struct SceneObject {
  int scene_class = -1;
  std::vector<Vec2> coords;  // one point, or >= 3 polygon vertices
  bool is_point() const { return coords.size() == 1; }
};

struct SceneModel {
  std::vector<SceneObject> objects;
  // Distance from p to the nearest object of the class; +inf when none exists.
  // Points inside a polygon are at distance zero.
  Scalar distance(const Vec2& p, int scene_class) const;
};

Scalar point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);
bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& vertices);
bool polygon_is_simple(const std::vector<Vec2>& vertices);

struct TruthGroup {
  std::vector<int> members;  // trajectory indices, ascending
  int event = -1;
  Interval interval;
};

struct Dataset {
  LabelVocabulary vocabulary;
  SceneModel scene;
  std::vector<Trajectory> trajectories;
  std::vector<TruthGroup> truth_groups;  // empty when the dataset is unlabeled

  bool has_truth() const { return !truth_groups.empty(); }
  int trajectory_index(const std::string& id) const;  // -1 when unknown
};

struct SegmentAssignment {
  int template_id = -1;
  Interval interval;
};

// Parse of a single group: event label, sub-event segmentation of the group
// extent, and one role per member (aligned with the group's member list).
// Inference ops keep `energy` equal to the group's energy under this parse.
struct ParseGraph {
  int event = -1;
  Interval extent;
  std::vector<SegmentAssignment> segmentation;
  std::vector<int> roles;
  Scalar energy = 0;
};

// A grouping of all foreground trajectories together with per-group parses.
struct Solution {
  std::vector<std::vector<int>> groups;
  std::vector<ParseGraph> parses;
  Scalar energy = 0;
};

}  // namespace stparse
