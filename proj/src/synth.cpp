#include "stparse/synth.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>

#include "stparse/rng.hpp"

namespace stparse {
namespace {

constexpr Scalar kEps = 1e-9;

bool known_arrange(const std::string& arrange) {
  return arrange.empty() || arrange == "point" || arrange == "ring" || arrange == "line";
}

std::string member_id(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "t%02d", index);
  return buf;
}

Vec2 rotate(const Vec2& v, Scalar angle) {
  Scalar c = std::cos(angle), s = std::sin(angle);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

// Position of one cast member at local phase progress u in [0, 1].
Vec2 phase_position(const MotionDirective& move, const Vec2& anchor, const Vec2& start,
                    int cast_count, int index, Scalar u) {
  switch (move.kind) {
    case MotionDirective::Kind::Hold:
      return start;
    case MotionDirective::Kind::Goto: {
      Vec2 slot =
          formation_slot(anchor + move.target, move.arrange, move.spacing, cast_count, index);
      return start + u * (slot - start);
    }
    case MotionDirective::Kind::Orbit: {
      Vec2 center = anchor + move.target;
      return center + rotate(start - center, 2 * kPi * move.turns * u);
    }
  }
  return start;
}

const MotionDirective& directive_for(const PhaseScript& phase, const std::string& role) {
  static const MotionDirective hold{};
  auto it = phase.moves.find(role);
  return it == phase.moves.end() ? hold : it->second;
}

}  // namespace

Vec2 formation_slot(const Vec2& center, const std::string& arrange, Scalar spacing, int count,
                    int index) {
  if (count <= 1 || arrange.empty() || arrange == "point") return center;
  if (arrange == "ring") {
    Scalar angle = 2 * kPi * index / count;
    return center + spacing * Vec2(std::cos(angle), std::sin(angle));
  }
  // line: centered along y
  return center + spacing * (index - (count - 1) / 2.0) * Vec2(0, 1);
}

Scalar EventScript::duration() const {
  Scalar total = 0;
  for (const PhaseScript& phase : phases) total += phase.duration;
  return total;
}

std::string ScenarioScript::check() const {
  std::vector<std::string> vocab_defects = vocabulary.validate();
  if (!vocab_defects.empty()) return "vocabulary: " + vocab_defects.front();
  if (sample_dt <= 0) return "sample_dt must be positive";
  if (unit <= 0) return "unit must be positive";
  if (noise.position_jitter < 0) return "positionJitter must be non-negative";
  if (noise.break_prob < 0 || noise.break_prob > 1) return "breakProb must lie in [0,1]";
  if (noise.id_switch_prob < 0 || noise.id_switch_prob > 1)
    return "idSwitchProb must lie in [0,1]";
  if (events.empty()) return "script has no events";

  for (size_t e = 0; e < events.size(); ++e) {
    const EventScript& ev = events[e];
    std::string where = "events[" + std::to_string(e) + "]";
    if (vocabulary.event_index(ev.event) < 0) return where + ": unknown event " + ev.event;
    if (ev.anchor_jitter < 0) return where + ": anchorJitter must be non-negative";
    if (ev.cast.empty()) return where + ": empty cast";
    if (ev.phases.empty()) return where + ": no phases";
    for (const CastEntry& cast : ev.cast) {
      if (vocabulary.role_index(cast.role) < 0) return where + ": unknown role " + cast.role;
      if (cast.count < 1) return where + ": role count must be >= 1";
      if (cast.spacing < 0) return where + ": negative spacing";
      if (!known_arrange(cast.arrange)) return where + ": unknown arrangement " + cast.arrange;
      if (cast.span) {
        if (cast.span->t0 < -kEps || cast.span->t1 > ev.duration() + kEps ||
            cast.span->length() <= 0)
          return where + ": cast span outside the event";
      }
    }
    for (const PhaseScript& phase : ev.phases) {
      if (phase.duration <= 0) return where + ": phase duration must be positive";
      for (const auto& [role, move] : phase.moves) {
        if (vocabulary.role_index(role) < 0) return where + ": move for unknown role " + role;
        if (move.spacing < 0) return where + ": negative spacing";
        if (!known_arrange(move.arrange)) return where + ": unknown arrangement " + move.arrange;
      }
    }
  }
  for (size_t o = 0; o < scene_objects.size(); ++o) {
    const SceneObjectScript& object = scene_objects[o];
    std::string where = "scene[" + std::to_string(o) + "]";
    if (vocabulary.scene_class_index(object.scene_class) < 0)
      return where + ": unknown scene class " + object.scene_class;
    if (object.attach < -1 || object.attach >= static_cast<int>(events.size()))
      return where + ": attach index out of range";
    if (object.coords.size() != 1 && object.coords.size() < 3)
      return where + ": geometry needs one point or >= 3 vertices";
  }
  return {};
}

SynthResult generate(const ScenarioScript& script, std::uint64_t seed) {
  std::string defect = script.check();
  if (!defect.empty()) fail("invalid-script", defect);

  Rng rng(seed);
  SynthResult result;
  Dataset& dataset = result.dataset;
  dataset.vocabulary = script.vocabulary;

  // Jittered anchors, drawn in event order. The jitter is quantized to
  // quarter units — an exactly representable binary fraction — so translating
  // an event never perturbs its internal geometry through rounding.
  std::vector<Vec2> anchors;
  for (const EventScript& ev : script.events) {
    Vec2 anchor = ev.anchor;
    if (ev.anchor_jitter > 0) {
      Vec2 jitter = ev.anchor_jitter * Vec2(rng.uniform(-1, 1), rng.uniform(-1, 1));
      anchor += (jitter * 4).array().round().matrix() / 4;
    }
    anchors.push_back(anchor);
  }

  for (const SceneObjectScript& object : script.scene_objects) {
    SceneObject scene_object;
    scene_object.scene_class = script.vocabulary.scene_class_index(object.scene_class);
    Vec2 offset = object.attach >= 0 ? anchors[static_cast<size_t>(object.attach)] : Vec2::Zero();
    for (const Vec2& p : object.coords) scene_object.coords.push_back(p + offset);
    dataset.scene.objects.push_back(std::move(scene_object));
  }

  // Clean trajectories: piecewise closed-form kinematics sampled on the
  // event's dt grid, restricted to the member's presence window.
  for (size_t e = 0; e < script.events.size(); ++e) {
    const EventScript& ev = script.events[e];
    const Vec2& anchor = anchors[e];
    Scalar duration = ev.duration();

    std::vector<Scalar> boundaries{ev.start};
    for (const PhaseScript& phase : ev.phases)
      boundaries.push_back(boundaries.back() + phase.duration);
    result.phase_boundaries.push_back(boundaries);

    TruthGroup group;
    group.event = script.vocabulary.event_index(ev.event);
    group.interval = {ev.start, ev.start + duration};

    for (const CastEntry& cast : ev.cast) {
      int role = script.vocabulary.role_index(cast.role);
      for (int m = 0; m < cast.count; ++m) {
        // Phase start positions, chained through the phase endpoints.
        std::vector<Vec2> starts{
            formation_slot(anchor + cast.start, cast.arrange, cast.spacing, cast.count, m)};
        for (const PhaseScript& phase : ev.phases)
          starts.push_back(phase_position(directive_for(phase, cast.role), anchor, starts.back(),
                                          cast.count, m, 1.0));

        auto position_at = [&](Scalar t) {
          Scalar local = t - ev.start;
          for (size_t p = 0; p < ev.phases.size(); ++p) {
            bool last = p + 1 == ev.phases.size();
            Scalar length = ev.phases[p].duration;
            if (local <= length + kEps || last) {
              Scalar u = std::clamp(local / length, 0.0, 1.0);
              return phase_position(directive_for(ev.phases[p], cast.role), anchor, starts[p],
                                    cast.count, m, u);
            }
            local -= length;
          }
          return starts.back();
        };

        Interval window{ev.start, ev.start + duration};
        if (cast.span) window = {ev.start + cast.span->t0, ev.start + cast.span->t1};

        Trajectory traj;
        traj.id = member_id(static_cast<int>(dataset.trajectories.size()));
        traj.truth_role = role;
        int first = static_cast<int>(std::ceil((window.t0 - ev.start) / script.sample_dt - kEps));
        for (Scalar t = ev.start + first * script.sample_dt; t < window.t1 - kEps;
             t += script.sample_dt)
          traj.samples.push_back({t, position_at(t)});
        traj.samples.push_back({window.t1, position_at(window.t1)});

        group.members.push_back(static_cast<int>(dataset.trajectories.size()));
        dataset.trajectories.push_back(std::move(traj));
      }
    }
    dataset.truth_groups.push_back(std::move(group));
  }

  // Noise pass 1: Gaussian position jitter (truth annotations unchanged).
  if (script.noise.position_jitter > 0) {
    for (Trajectory& traj : dataset.trajectories)
      for (TrackSample& sample : traj.samples)
        sample.pos += script.noise.position_jitter * Vec2(rng.normal(), rng.normal());
  }

  // Noise pass 2: id switches. At each global unit boundary, with the given
  // probability, two tracks alive across the boundary exchange their tails;
  // truth stays with the original identity, so the motion is mislabeled.
  if (script.noise.id_switch_prob > 0 && dataset.trajectories.size() >= 2) {
    Scalar t_min = kInf, t_max = -kInf;
    for (const Trajectory& traj : dataset.trajectories) {
      t_min = std::min(t_min, traj.start_time());
      t_max = std::max(t_max, traj.end_time());
    }
    for (Scalar b = std::floor(t_min / script.unit + 1) * script.unit; b < t_max - kEps;
         b += script.unit) {
      if (rng.uniform() >= script.noise.id_switch_prob) continue;
      std::vector<int> alive;
      for (size_t j = 0; j < dataset.trajectories.size(); ++j) {
        const Trajectory& traj = dataset.trajectories[j];
        if (traj.start_time() < b - kEps && traj.end_time() > b + kEps)
          alive.push_back(static_cast<int>(j));
      }
      if (alive.size() < 2) continue;
      int i = rng.uniform_int(static_cast<int>(alive.size()));
      int j = rng.uniform_int(static_cast<int>(alive.size()) - 1);
      if (j >= i) ++j;
      Trajectory& a = dataset.trajectories[static_cast<size_t>(alive[static_cast<size_t>(i)])];
      Trajectory& c = dataset.trajectories[static_cast<size_t>(alive[static_cast<size_t>(j)])];
      auto tail = [&](Trajectory& traj) {
        auto it = std::find_if(traj.samples.begin(), traj.samples.end(),
                               [&](const TrackSample& s) { return s.t >= b - kEps; });
        std::vector<TrackSample> out(it, traj.samples.end());
        traj.samples.erase(it, traj.samples.end());
        return out;
      };
      std::vector<TrackSample> tail_a = tail(a), tail_c = tail(c);
      a.samples.insert(a.samples.end(), tail_c.begin(), tail_c.end());
      c.samples.insert(c.samples.end(), tail_a.begin(), tail_a.end());
    }
  }

  // Noise pass 3: tracklet breaks. Each interior unit boundary of each track
  // is a cut point with the given probability; the boundary sample is
  // duplicated so fragments cover the full span. Fragments inherit truth.
  if (script.noise.break_prob > 0) {
    std::vector<Trajectory> fragments;
    std::vector<std::vector<int>> fragment_ids(dataset.trajectories.size());
    for (size_t j = 0; j < dataset.trajectories.size(); ++j) {
      Trajectory& traj = dataset.trajectories[j];
      std::vector<size_t> cuts;
      for (Scalar b = std::floor(traj.start_time() / script.unit + 1) * script.unit;
           b < traj.end_time() - kEps; b += script.unit) {
        if (rng.uniform() >= script.noise.break_prob) continue;
        for (size_t s = 1; s + 1 < traj.samples.size(); ++s) {
          if (std::abs(traj.samples[s].t - b) < kEps) {
            cuts.push_back(s);
            break;
          }
        }
      }
      std::vector<Trajectory> pieces;
      if (cuts.empty()) {
        pieces.push_back(std::move(traj));
      } else {
        size_t begin = 0;
        cuts.push_back(traj.samples.size() - 1);
        for (size_t c = 0; c < cuts.size(); ++c) {
          Trajectory piece;
          piece.id = traj.id + "#" + std::to_string(c);
          piece.truth_role = traj.truth_role;
          piece.samples.assign(traj.samples.begin() + static_cast<long>(begin),
                               traj.samples.begin() + static_cast<long>(cuts[c]) + 1);
          pieces.push_back(std::move(piece));
          begin = cuts[c];
        }
      }
      for (Trajectory& piece : pieces) {
        fragment_ids[j].push_back(static_cast<int>(fragments.size()));
        fragments.push_back(std::move(piece));
      }
    }
    for (TruthGroup& group : dataset.truth_groups) {
      std::vector<int> members;
      for (int j : group.members)
        for (int f : fragment_ids[static_cast<size_t>(j)]) members.push_back(f);
      std::sort(members.begin(), members.end());
      group.members = std::move(members);
    }
    dataset.trajectories = std::move(fragments);
  }

  return result;
}

namespace {

ScenarioScript base_script(const std::string& name, LabelVocabulary vocabulary) {
  ScenarioScript script;
  script.name = name;
  script.vocabulary = std::move(vocabulary);
  return script;
}

MotionDirective goto_to(Vec2 target, const std::string& arrange = "point", Scalar spacing = 0) {
  MotionDirective move;
  move.kind = MotionDirective::Kind::Goto;
  move.target = target;
  move.arrange = arrange;
  move.spacing = spacing;
  return move;
}

CastEntry cast_of(const std::string& role, int count, Vec2 start, const std::string& arrange,
                  Scalar spacing) {
  CastEntry cast;
  cast.role = role;
  cast.count = count;
  cast.start = start;
  cast.arrange = arrange;
  cast.spacing = spacing;
  return cast;
}

// Every suite event is a six-member rigid formation (five humans plus one
// carried object) on a shared ring of radius 25, alternating between drifting
// and standing legs on a grid of four-second blocks. Pure translation of a
// shared ring keeps pairwise distances, velocity alignment, and the radial
// spread identical across all events and legs, so the unbounded summed
// relations (mean distance, displacement angle) carry no signal anywhere;
// identity lives in the bounded blocks — who takes part (role counts and
// role pairs), whether the formation is underway (movement counts and speed
// compatibilities), where it is heading (orientation histogram), and which
// landmark it surrounds (scene-closeness indicators). The temporal
// segmentation has to recover the still/moving alternation.
//
// Deliberate geometric choices:
//  - All formations use one slot ring, so every summed pair-distance is the
//    same constant across events, legs, and scenes: the distance dimension is
//    variance-free in training and cannot reward or punish any regrouping.
//  - Drift speed is 2.5 with headings at orientation-bin centers; the ring
//    radius (25) is large against the within-unit drift (5), so a drifting
//    formation's histogram is one-hot in orientation and outer-band radius.
//  - Out-and-back events return to their anchor and one-leg events drift at
//    most 10, so every member stays within the closeness threshold (70) of
//    the event's own landmarks and far outside every other landmark's: the
//    closeness indicators identify the event no matter what roles a parse
//    claims.
//  - Each event site carries ELEVEN distinct landmark classes, not one. Role
//    indicators and landmark indicators are perfectly correlated within the
//    training scenes, so the regularized fits spread each event's identity
//    weight evenly across both blocks; widening the landmark block shifts
//    most of that weight onto columns whose value is pinned by geometry.
//    Landmark closeness cannot be claimed by relabeling: a merged group can
//    stack duplicate roles to inflate role-pair columns, but its members are
//    physically near only their own site's landmarks, so the bulk of the
//    event evidence stays truthful and regroupings lose energy.
//  - Each cast takes six globally unique roles, every cast member appears
//    exactly once, and co-scheduled events move on complementary schedules.
//    Role sets pin events through the role blocks; uniqueness means merged
//    or relabeled groups can only reproduce another event's role statistics
//    by stacking duplicate roles, which lands those counts far outside their
//    training values.
//  - Every scene uses full casts only — concurrent events multiply the
//    actor count rather than thin the formations — so group size is never a
//    clue and no partially-cast formation exists for a parse to imitate
//    cheaply.
constexpr Scalar kBlock = 4.0;  // scheduling granularity in seconds
constexpr Scalar kRingRadius = 25.0;
constexpr Scalar kDriftSpeed = 2.5;

// Ring slot angles in degrees, interleaved so any prefix stays
// centroid-balanced.
constexpr std::array<Scalar, 6> kSlotAngles = {0, 60, 180, 240, 120, 300};

Vec2 polar(Scalar degrees, Scalar radius) {
  Scalar rad = degrees * kPi / 180.0;
  return {radius * std::cos(rad), radius * std::sin(rad)};
}

struct LegPlan {
  const char* phase;
  int blocks;
  int direction;  // 0 = stand, +1 = drift along heading, -1 = drift back
};

// One suite event: five humans and a carried object, a drift heading at an
// orientation-bin center, a leg schedule, and eleven landmark classes that
// mark the event's site.
struct SuiteEvent {
  const char* name;
  std::array<const char*, 5> humans;
  const char* portable;
  std::array<const char*, 11> landmarks;
  Scalar heading;  // degrees
  std::vector<LegPlan> legs;
};

// Out-and-back schedule: drift 8s, stand 4s, drift 8s back to the anchor.
std::vector<LegPlan> out_and_back(const char* out, const char* pause, const char* back) {
  return {{out, 2, 1}, {pause, 1, 0}, {back, 2, -1}};
}

// Stand-drift-stand schedule: stand 8s, drift 4s, stand 8s. Complementary to
// the out-and-back schedule: exactly one of the two is underway at any time.
std::vector<LegPlan> stand_drift_stand(const char* before, const char* drift, const char* after) {
  return {{before, 2, 0}, {drift, 1, 1}, {after, 2, 0}};
}

const std::vector<SuiteEvent>& suite_events() {
  static const std::vector<SuiteEvent> events = {
      {"ExchangeBox",
       {"Deliverer", "Receiver", "Escort", "Courier", "Inspector"},
       "Box",
       {"DropPoint", "ParcelRack", "ScaleStand", "LabelKiosk", "CourierSign", "SortingBin",
        "TapeTable", "CrateStack", "ManifestBoard", "SealStation", "FreightScale"},
       30,
       out_and_back("approach", "handoff", "depart")},
      {"GroupTour",
       {"Tourist", "Guide", "Photographer", "Interpreter", "Visitor"},
       "Map",
       {"TourSign", "InfoBoard", "MapStand", "TicketBooth", "ExhibitCase", "AudioPost",
        "BrochureRack", "GuideFlag", "PhotoSpot", "RopeLine", "PlaqueWall"},
       90,
       out_and_back("walkout", "viewpoint", "walkback")},
      {"Jogging",
       {"Jogger", "Pacer", "Trainer", "Sprinter", "Runner"},
       "Bottle",
       {"WaterFountain", "StretchBar", "TrackMark", "PaceClock", "GearRack", "StartArch",
        "LapCounter", "CoolDownMat", "TowelRail", "EnergyStand", "FinishPost"},
       150,
       out_and_back("outbound", "breather", "inbound")},
      {"Meeting",
       {"Chair", "Secretary", "Speaker", "Delegate", "Observer"},
       "Agenda",
       {"Lectern", "WhiteBoard", "ProjectorCart", "NamePlate", "MinuteDesk", "AgendaBoard",
        "ChairRow", "MicStand", "HandoutTray", "WaterCarafe", "ClockPanel"},
       30,
       stand_drift_stand("convene", "mingle", "session")},
      {"Patrol",
       {"Officer", "Sentry", "Scout", "Warden", "Ranger"},
       "Radio",
       {"GuardPost", "WatchTower", "BeaconPole", "LogStand", "BarrierGate", "FloodLight",
        "SirenBox", "CheckpointHut", "RadioMast", "FenceLine", "AlarmPanel"},
       210,
       out_and_back("sweepout", "checkpoint", "sweepback")},
      {"Picnic",
       {"Picnicker", "Host", "Caterer", "Server", "Guest"},
       "Basket",
       {"PicnicTable", "GrillPit", "CoolerBox", "SunShade", "TrashBin", "BlanketSpot",
        "BasketStand", "CondimentCart", "NapkinPost", "JuiceCooler", "FruitCrate"},
       90,
       stand_drift_stand("setup", "stroll", "feast")},
      {"PlayFrisbee",
       {"Player", "Umpire", "Coach", "Catcher", "Thrower"},
       "Frisbee",
       {"GoalMarker", "FieldCone", "ScoreBoard", "BenchSeat", "NetFrame", "LineFlag",
        "DiscRack", "WhistlePost", "TeamBanner", "WaterJug", "ShadeTent"},
       270,
       out_and_back("rallyout", "rest", "rallyback")},
      {"QueueVending",
       {"Customer", "Cashier", "Stocker", "Shopper", "Clerk"},
       "Bag",
       {"VendingMachine", "ChangeKiosk", "SnackShelf", "RailPost", "ReceiptBin", "CoinSlotSign",
        "MenuBoard", "NumberDispenser", "WaitLine", "CupHolder", "StrawBox"},
       150,
       stand_drift_stand("gather", "advance", "settle")},
      {"WalkDog",
       {"Owner", "Companion", "Neighbor", "Stroller", "Friend"},
       "Leash",
       {"Lamppost", "HydrantPost", "WasteStation", "BenchPlank", "TreeGuard", "LeashHook",
        "PawSign", "GravelPatch", "DogFountain", "BallBasket", "GateArch"},
       210,
       stand_drift_stand("meetup", "walk", "linger")},
  };
  return events;
}

const SuiteEvent& suite_event_named(const std::string& event) {
  for (const SuiteEvent& e : suite_events())
    if (event == e.name) return e;
  fail("unknown-symbol", "no suite event named " + event);
}

// Builds the scripted event: the full cast on its six ring slots.
EventScript suite_event_script(const SuiteEvent& spec) {
  EventScript ev;
  ev.event = spec.name;
  ev.start = 0;
  ev.anchor = Vec2::Zero();
  std::vector<std::string> roles(spec.humans.begin(), spec.humans.end());
  roles.push_back(spec.portable);
  const int members = static_cast<int>(roles.size());
  Vec2 velocity = polar(spec.heading, kDriftSpeed);
  for (int m = 0; m < members; ++m)
    ev.cast.push_back(cast_of(roles[static_cast<size_t>(m)], 1,
                              polar(kSlotAngles[static_cast<size_t>(m)], kRingRadius), "point", 0));
  Vec2 offset(0, 0);
  for (const LegPlan& leg : spec.legs) {
    Scalar duration = kBlock * leg.blocks;
    offset += duration * static_cast<Scalar>(leg.direction) * velocity;
    PhaseScript phase{leg.phase, duration, {}};
    for (int m = 0; m < members; ++m)
      phase.moves[roles[static_cast<size_t>(m)]] =
          goto_to(offset + polar(kSlotAngles[static_cast<size_t>(m)], kRingRadius));
    ev.phases.push_back(std::move(phase));
  }
  return ev;
}

// The event's eleven landmarks, on a small ring around its (jittered) anchor,
// close enough that the whole formation stays inside the closeness radius of
// every one throughout each leg.
std::vector<SceneObjectScript> landmarks_at(const std::string& event, int attach) {
  std::vector<SceneObjectScript> objects;
  const SuiteEvent& spec = suite_event_named(event);
  int l = 0;
  for (const char* landmark : spec.landmarks) {
    SceneObjectScript object;
    object.scene_class = landmark;
    object.attach = attach;
    object.coords = {polar(360.0 / 11.0 * static_cast<Scalar>(l++), 3.0)};
    objects.push_back(std::move(object));
  }
  return objects;
}

LabelVocabulary full_vocabulary() {
  LabelVocabulary vocab;
  for (const SuiteEvent& e : suite_events()) {
    vocab.events.push_back(e.name);
    for (const char* role : e.humans) vocab.roles.push_back(role);
    vocab.portables.push_back(e.portable);
    for (const char* landmark : e.landmarks) vocab.scene_classes.push_back(landmark);
  }
  std::sort(vocab.roles.begin(), vocab.roles.end());
  std::sort(vocab.portables.begin(), vocab.portables.end());
  std::sort(vocab.scene_classes.begin(), vocab.scene_classes.end());
  return vocab;
}

// All suite scripts share the full vocabulary, so a model trained on any
// subset of scenes applies to every suite scene unchanged. Each event brings
// its landmarks; anchors sit far enough apart that formations never leave
// their own landmark's closeness radius nor enter another's.
ScenarioScript composition(const std::string& name, const std::vector<std::string>& events,
                           const std::vector<Vec2>& anchors) {
  ScenarioScript script = base_script(name, full_vocabulary());
  for (size_t e = 0; e < events.size(); ++e) {
    EventScript ev = suite_event_script(suite_event_named(events[e]));
    ev.anchor = anchors[e];
    ev.anchor_jitter = 10;
    script.events.push_back(std::move(ev));
    for (SceneObjectScript& object : landmarks_at(events[e], static_cast<int>(e)))
      script.scene_objects.push_back(std::move(object));
  }
  return script;
}

const Vec2 kAnchor0(0, 0), kAnchor1(160, 0), kAnchor2(0, 160);

ScenarioScript solo(const std::string& event) {
  std::string name = event;
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return composition("solo-" + name, {event}, {kAnchor0});
}

ScenarioScript duo(const std::string& name, const std::string& a, const std::string& b) {
  return composition(name, {a, b}, {kAnchor0, kAnchor1});
}

ScenarioScript trio(const std::string& name, const std::string& a, const std::string& b,
                    const std::string& c) {
  return composition(name, {a, b, c}, {kAnchor0, kAnchor1, kAnchor2});
}

}  // namespace

std::vector<ScenarioScript> scenario_suite() {
  std::vector<ScenarioScript> suite;
  // Single-event scenes, one per event.
  for (const SuiteEvent& e : suite_events()) suite.push_back(solo(e.name));

  // Twelve-actor scenes with two concurrent events: an out-and-back event
  // paired with a stand-drift-stand event on complementary schedules.
  suite.push_back(duo("duo-exchange-picnic", "ExchangeBox", "Picnic"));
  suite.push_back(duo("duo-tour-queue", "GroupTour", "QueueVending"));
  suite.push_back(duo("duo-jogging-meeting", "Jogging", "Meeting"));
  suite.push_back(duo("duo-patrol-walkdog", "Patrol", "WalkDog"));
  suite.push_back(duo("duo-frisbee-picnic", "PlayFrisbee", "Picnic"));
  suite.push_back(duo("duo-exchange-queue", "ExchangeBox", "QueueVending"));
  suite.push_back(duo("duo-tour-meeting", "GroupTour", "Meeting"));
  suite.push_back(duo("duo-jogging-walkdog", "Jogging", "WalkDog"));
  suite.push_back(duo("duo-patrol-queue", "Patrol", "QueueVending"));
  suite.push_back(duo("duo-frisbee-meeting", "PlayFrisbee", "Meeting"));

  // Scenes with three concurrent events, each a full cast. Every trio takes
  // two out-and-back events and one stand-drift-stand event: with only two
  // leg schedules, some pair in a trio must share one, and the out-and-back
  // pair is the safe choice — a merged parse of two synchronized drifting
  // formations splits its orientation histogram across opposed headings for
  // eight of its ten units, while two synchronized standing formations would
  // go unpunished (a standing merge looks like standing).
  suite.push_back(trio("trio-exchange-picnic-tour", "ExchangeBox", "Picnic", "GroupTour"));
  suite.push_back(trio("trio-jogging-queue-patrol", "Jogging", "QueueVending", "Patrol"));
  suite.push_back(trio("trio-frisbee-walkdog-patrol", "PlayFrisbee", "WalkDog", "Patrol"));

  // Noisy variants for degradation checks.
  {
    ScenarioScript noisy = duo("noisy-duo-exchange-picnic", "ExchangeBox", "Picnic");
    noisy.noise.position_jitter = 2;
    noisy.noise.break_prob = 0.1;
    suite.push_back(std::move(noisy));
  }
  {
    ScenarioScript noisy = duo("noisy-duo-tour-queue", "GroupTour", "QueueVending");
    noisy.noise.position_jitter = 2;
    noisy.noise.break_prob = 0.1;
    suite.push_back(std::move(noisy));
  }
  return suite;
}

ScenarioScript suite_script(const std::string& name) {
  for (ScenarioScript& script : scenario_suite())
    if (script.name == name) return std::move(script);
  fail("unknown-symbol", "no suite scenario named " + name);
}

Dataset merge_datasets(const std::vector<Dataset>& scenes) {
  if (scenes.empty()) fail("invalid-argument", "no scenes to merge");
  Dataset merged;
  merged.vocabulary = scenes.front().vocabulary;
  for (size_t s = 0; s < scenes.size(); ++s) {
    const Dataset& scene = scenes[s];
    const LabelVocabulary& v = scene.vocabulary;
    if (v.events != merged.vocabulary.events || v.roles != merged.vocabulary.roles ||
        v.portables != merged.vocabulary.portables ||
        v.scene_classes != merged.vocabulary.scene_classes)
      fail("invalid-argument", "scene vocabularies differ; cannot merge");

    Vec2 offset(1000.0 * static_cast<Scalar>(s), 0);
    int base = static_cast<int>(merged.trajectories.size());
    for (SceneObject object : scene.scene.objects) {
      for (Vec2& p : object.coords) p += offset;
      merged.scene.objects.push_back(std::move(object));
    }
    for (Trajectory traj : scene.trajectories) {
      traj.id = "s" + std::to_string(s) + ":" + traj.id;
      for (TrackSample& sample : traj.samples) sample.pos += offset;
      merged.trajectories.push_back(std::move(traj));
    }
    for (TruthGroup group : scene.truth_groups) {
      for (int& j : group.members) j += base;
      merged.truth_groups.push_back(std::move(group));
    }
  }
  return merged;
}

}  // namespace stparse
