#pragma once
// Scripted multi-agent scenario generation: events with role casts, ordered
// motion phases, portable objects, scene geometry, and a tracklet noise model
// (position jitter, id switches, breaks). Produces fully truth-annotated
// datasets plus the scripted phase boundaries for boundary-recovery checks.
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stparse/core.hpp"

namespace stparse {

// Where the members of one cast stand around a formation center.
//   ring: radius `spacing`, member i at angle 2*pi*i/count
//   line: along y, `spacing` apart, centered
//   point (or one member): exactly at the center
Vec2 formation_slot(const Vec2& center, const std::string& arrange, Scalar spacing, int count,
                    int index);

struct MotionDirective {
  enum class Kind { Hold, Goto, Orbit } kind = Kind::Hold;
  Vec2 target = Vec2::Zero();  // goto: destination; orbit: center (anchor-relative)
  Scalar turns = 0;            // orbit: signed revolutions over the phase
  std::string arrange;         // goto formation at the destination ("" = point)
  Scalar spacing = 0;
};

struct PhaseScript {
  std::string name;
  Scalar duration = 0;  // seconds
  std::map<std::string, MotionDirective> moves;  // role -> directive; absent role holds
};

struct CastEntry {
  std::string role;
  int count = 1;
  Vec2 start = Vec2::Zero();  // formation center, anchor-relative
  std::string arrange = "point";
  Scalar spacing = 0;
  // Presence window relative to the event start; absent = the whole event.
  std::optional<Interval> span;
};

struct EventScript {
  std::string event;
  Scalar start = 0;  // scene time of the first phase
  Vec2 anchor = Vec2::Zero();
  Scalar anchor_jitter = 0;  // uniform square half-width applied to the anchor
  std::vector<CastEntry> cast;
  std::vector<PhaseScript> phases;

  Scalar duration() const;
};

struct SceneObjectScript {
  std::string scene_class;
  int attach = -1;  // event index whose (jittered) anchor offsets coords; -1 = absolute
  std::vector<Vec2> coords;  // one point or >= 3 polygon vertices
};

struct NoiseModel {
  Scalar position_jitter = 0;  // Gaussian sigma per coordinate per sample
  Scalar break_prob = 0;       // per trajectory per interior unit boundary
  Scalar id_switch_prob = 0;   // per unit boundary, swaps the tails of two tracks
};

struct ScenarioScript {
  std::string name;
  LabelVocabulary vocabulary;
  Scalar sample_dt = 0.5;
  Scalar unit = 2.0;  // noise events snap to this grid
  NoiseModel noise;
  std::vector<EventScript> events;
  std::vector<SceneObjectScript> scene_objects;

  // Empty when valid, else a description of the first defect.
  std::string check() const;
};

struct SynthResult {
  Dataset dataset;
  // Per scripted event: absolute phase boundary times, including the event
  // start and end (so an event with p phases lists p + 1 times).
  std::vector<std::vector<Scalar>> phase_boundaries;
};

// Simulates the script: closed-form piecewise kinematics per member, sampled
// every sample_dt; then position jitter, id switches, and tracklet breaks in
// that order. Truth groups, roles, and intervals are emitted alongside.
SynthResult generate(const ScenarioScript& script, std::uint64_t seed);

// Fixed scenario library: five single-event scripts with minimal
// vocabularies, then three multi-event compositions (12 human actors each)
// sharing one full vocabulary.
std::vector<ScenarioScript> scenario_suite();

// The suite script with the given name; unknown-symbol error otherwise.
ScenarioScript suite_script(const std::string& name);

// Concatenates scenes into one dataset, offsetting scene s by (1000*s, 0) and
// prefixing trajectory ids with "s<s>:". Vocabularies must match exactly.
Dataset merge_datasets(const std::vector<Dataset>& scenes);

}  // namespace stparse
