#include "stparse/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "json.hpp"

namespace stparse {
namespace {

using json = nlohmann::json;  // std::map keyed: object keys serialize sorted

[[noreturn]] void schema_fail(const std::string& path, const std::string& msg) {
  fail("schema", path + ": " + msg);
}

json parse_text(const std::string& text) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) fail("schema", "$: not valid JSON");
  return j;
}

// Every loader walks objects with an explicit field list so typos and stale
// fields surface as named errors instead of being silently dropped.
void check_fields(const json& j, const std::string& path,
                  std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional = {}) {
  if (!j.is_object()) schema_fail(path, "expected an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : required) known = known || item.key() == k;
    for (const char* k : optional) known = known || item.key() == k;
    if (!known) schema_fail(path + "." + item.key(), "unknown field");
  }
  for (const char* k : required) {
    if (!j.contains(k)) schema_fail(path + "." + k, "missing field");
  }
}

Scalar as_number(const json& j, const std::string& path) {
  if (!j.is_number()) schema_fail(path, "expected a number");
  return j.get<Scalar>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) schema_fail(path, "expected an integer");
  return j.get<int>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) schema_fail(path, "expected a string");
  return j.get<std::string>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) schema_fail(path, "expected a boolean");
  return j.get<bool>();
}

const json& as_array(const json& j, const std::string& path) {
  if (!j.is_array()) schema_fail(path, "expected an array");
  return j;
}

std::vector<std::string> as_strings(const json& j, const std::string& path) {
  std::vector<std::string> out;
  for (size_t i = 0; i < as_array(j, path).size(); ++i)
    out.push_back(as_string(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

VecX as_vector(const json& j, const std::string& path) {
  const json& a = as_array(j, path);
  VecX out(a.size());
  for (size_t i = 0; i < a.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = as_number(a[i], path + "[" + std::to_string(i) + "]");
  return out;
}

Vec2 as_point(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) schema_fail(path, "expected [x, y]");
  return {as_number(j[0], path + "[0]"), as_number(j[1], path + "[1]")};
}

Interval as_interval(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) schema_fail(path, "expected [t0, t1]");
  Interval out{as_number(j[0], path + "[0]"), as_number(j[1], path + "[1]")};
  if (!(out.t1 > out.t0)) schema_fail(path, "interval end must exceed its start");
  return out;
}

void check_version(const json& j, const std::string& path) {
  if (as_int(j.at("version"), path + ".version") != 1)
    schema_fail(path + ".version", "unsupported version");
}

Scalar finite(Scalar x, const std::string& what) {
  if (!std::isfinite(x)) fail("schema", what + ": refusing to serialize a non-finite number");
  return x;
}

json point_json(const Vec2& p, const std::string& what) {
  return json::array({finite(p.x(), what), finite(p.y(), what)});
}

json interval_json(const Interval& i, const std::string& what) {
  return json::array({finite(i.t0, what), finite(i.t1, what)});
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// --- vocabulary ---

json vocabulary_json(const LabelVocabulary& v) {
  json j;
  j["events"] = v.events;
  j["roles"] = v.roles;
  j["portables"] = v.portables;
  j["sceneClasses"] = v.scene_classes;
  return j;
}

LabelVocabulary vocabulary_from(const json& j, const std::string& path) {
  check_fields(j, path, {"events", "roles", "portables", "sceneClasses"});
  LabelVocabulary v;
  v.events = as_strings(j["events"], path + ".events");
  v.roles = as_strings(j["roles"], path + ".roles");
  v.portables = as_strings(j["portables"], path + ".portables");
  v.scene_classes = as_strings(j["sceneClasses"], path + ".sceneClasses");
  std::vector<std::string> violations = v.validate();
  if (!violations.empty()) schema_fail(path, violations.front());
  return v;
}

// --- scene ---

json scene_json(const SceneModel& scene, const LabelVocabulary& v) {
  json objects = json::array();
  for (const SceneObject& object : scene.objects) {
    json o;
    o["class"] = v.scene_classes[static_cast<size_t>(object.scene_class)];
    json g;
    if (object.is_point()) {
      g["type"] = "point";
      g["coords"] = point_json(object.coords[0], "scene coords");
    } else {
      g["type"] = "polygon";
      json coords = json::array();
      for (const Vec2& p : object.coords) coords.push_back(point_json(p, "scene coords"));
      g["coords"] = coords;
    }
    o["geometry"] = g;
    objects.push_back(o);
  }
  json j;
  j["objects"] = objects;
  return j;
}

SceneModel scene_from(const json& j, const std::string& path, const LabelVocabulary& v) {
  check_fields(j, path, {"objects"});
  SceneModel scene;
  const json& objects = as_array(j["objects"], path + ".objects");
  for (size_t i = 0; i < objects.size(); ++i) {
    std::string opath = path + ".objects[" + std::to_string(i) + "]";
    check_fields(objects[i], opath, {"class", "geometry"});
    SceneObject object;
    std::string cls = as_string(objects[i]["class"], opath + ".class");
    object.scene_class = v.scene_class_index(cls);
    if (object.scene_class < 0) schema_fail(opath + ".class", "unknown scene class " + cls);
    const json& g = objects[i]["geometry"];
    check_fields(g, opath + ".geometry", {"type", "coords"});
    std::string type = as_string(g["type"], opath + ".geometry.type");
    std::string cpath = opath + ".geometry.coords";
    if (type == "point") {
      object.coords = {as_point(g["coords"], cpath)};
    } else if (type == "polygon") {
      const json& coords = as_array(g["coords"], cpath);
      for (size_t p = 0; p < coords.size(); ++p)
        object.coords.push_back(as_point(coords[p], cpath + "[" + std::to_string(p) + "]"));
      if (object.coords.size() < 3) schema_fail(cpath, "polygon needs >= 3 vertices");
      if (!polygon_is_simple(object.coords)) schema_fail(cpath, "polygon self-intersects");
    } else {
      schema_fail(opath + ".geometry.type", "expected 'point' or 'polygon'");
    }
    scene.objects.push_back(std::move(object));
  }
  return scene;
}

}  // namespace

// --- dataset ---

std::string dataset_to_json(const Dataset& dataset) {
  json j;
  j["version"] = 1;
  j["vocabulary"] = vocabulary_json(dataset.vocabulary);
  j["scene"] = scene_json(dataset.scene, dataset.vocabulary);

  json trajectories = json::array();
  for (const Trajectory& traj : dataset.trajectories) {
    json t;
    t["id"] = traj.id;
    if (traj.truth_role)
      t["role"] = dataset.vocabulary.role_name(*traj.truth_role);
    json samples = json::array();
    for (const TrackSample& s : traj.samples)
      samples.push_back(json::array({finite(s.t, "sample time"), finite(s.pos.x(), "sample x"),
                                     finite(s.pos.y(), "sample y")}));
    t["samples"] = samples;
    trajectories.push_back(std::move(t));
  }
  j["trajectories"] = trajectories;

  if (dataset.has_truth()) {
    json groups = json::array();
    for (const TruthGroup& group : dataset.truth_groups) {
      json g;
      json members = json::array();
      for (int m : group.members)
        members.push_back(dataset.trajectories[static_cast<size_t>(m)].id);
      g["members"] = members;
      g["event"] = dataset.vocabulary.events[static_cast<size_t>(group.event)];
      g["interval"] = interval_json(group.interval, "group interval");
      groups.push_back(std::move(g));
    }
    j["groups"] = groups;
  }
  return dump(j);
}

Dataset dataset_from_json(const std::string& text) {
  json j = parse_text(text);
  check_fields(j, "$", {"version", "vocabulary", "scene", "trajectories"}, {"groups"});
  check_version(j, "$");

  Dataset dataset;
  dataset.vocabulary = vocabulary_from(j["vocabulary"], "$.vocabulary");
  dataset.scene = scene_from(j["scene"], "$.scene", dataset.vocabulary);

  const json& trajectories = as_array(j["trajectories"], "$.trajectories");
  std::set<std::string> ids;
  for (size_t i = 0; i < trajectories.size(); ++i) {
    std::string tpath = "$.trajectories[" + std::to_string(i) + "]";
    check_fields(trajectories[i], tpath, {"id", "samples"}, {"role"});
    Trajectory traj;
    traj.id = as_string(trajectories[i]["id"], tpath + ".id");
    if (!ids.insert(traj.id).second) schema_fail(tpath + ".id", "duplicate id " + traj.id);
    if (trajectories[i].contains("role")) {
      std::string role = as_string(trajectories[i]["role"], tpath + ".role");
      int index = dataset.vocabulary.role_index(role);
      if (index < 0) schema_fail(tpath + ".role", "unknown role " + role);
      traj.truth_role = index;
    }
    const json& samples = as_array(trajectories[i]["samples"], tpath + ".samples");
    for (size_t s = 0; s < samples.size(); ++s) {
      std::string spath = tpath + ".samples[" + std::to_string(s) + "]";
      if (!samples[s].is_array() || samples[s].size() != 3) schema_fail(spath, "expected [t, x, y]");
      traj.samples.push_back({as_number(samples[s][0], spath + "[0]"),
                              {as_number(samples[s][1], spath + "[1]"),
                               as_number(samples[s][2], spath + "[2]")}});
    }
    std::string defect = traj.check();
    if (!defect.empty()) schema_fail(tpath + ".samples", defect);
    dataset.trajectories.push_back(std::move(traj));
  }

  if (j.contains("groups")) {
    const json& groups = as_array(j["groups"], "$.groups");
    std::set<int> assigned;
    for (size_t g = 0; g < groups.size(); ++g) {
      std::string gpath = "$.groups[" + std::to_string(g) + "]";
      check_fields(groups[g], gpath, {"members", "event", "interval"});
      TruthGroup group;
      std::string event = as_string(groups[g]["event"], gpath + ".event");
      group.event = dataset.vocabulary.event_index(event);
      if (group.event < 0) schema_fail(gpath + ".event", "unknown event " + event);
      group.interval = as_interval(groups[g]["interval"], gpath + ".interval");
      const json& members = as_array(groups[g]["members"], gpath + ".members");
      if (members.empty()) schema_fail(gpath + ".members", "empty group");
      for (size_t m = 0; m < members.size(); ++m) {
        std::string mpath = gpath + ".members[" + std::to_string(m) + "]";
        std::string id = as_string(members[m], mpath);
        int index = dataset.trajectory_index(id);
        if (index < 0) schema_fail(mpath, "unknown trajectory " + id);
        if (!assigned.insert(index).second)
          schema_fail(mpath, "trajectory " + id + " appears in two groups");
        group.members.push_back(index);
      }
      std::sort(group.members.begin(), group.members.end());
      dataset.truth_groups.push_back(std::move(group));
    }
  }
  return dataset;
}

// --- model ---

std::string model_to_json(const Model& model) {
  const Grammar& grammar = model.grammar;
  json j;
  j["version"] = 1;
  j["vocabulary"] = vocabulary_json(grammar.vocabulary);

  json standardizer;
  standardizer["mean"] = std::vector<Scalar>(model.standardizer.mean.begin(),
                                             model.standardizer.mean.end());
  standardizer["stdev"] = std::vector<Scalar>(model.standardizer.stdev.begin(),
                                              model.standardizer.stdev.end());
  j["standardizer"] = standardizer;

  json templates = json::array();
  for (const TemplateNode& node : grammar.templates) {
    json t;
    t["id"] = node.id;
    t["weights"] = std::vector<Scalar>(node.weights.begin(), node.weights.end());
    t["duration"] = {{"mu", finite(node.duration_mu, "duration mu")},
                     {"sigma", finite(node.duration_sigma, "duration sigma")}};
    templates.push_back(std::move(t));
  }
  j["templates"] = templates;

  json event_switch, template_switch, transitions, roles_of;
  for (int e = 0; e < grammar.event_count(); ++e) {
    const std::string& name = grammar.vocabulary.events[static_cast<size_t>(e)];
    event_switch[name] = finite(grammar.event_switch[e], "eventSwitch");
    json per_event;  // only admissible templates appear; -inf never serializes
    for (int a = 0; a < grammar.template_count(); ++a) {
      if (grammar.template_switch(e, a) > -kInf)
        per_event[std::to_string(a)] = grammar.template_switch(e, a);
    }
    template_switch[name] = per_event.is_null() ? json::object() : per_event;
    json pairs = json::array();
    for (const auto& [from, to] : grammar.transitions[static_cast<size_t>(e)])
      pairs.push_back(json::array({from, to}));
    transitions[name] = pairs;
    json roles = json::array();  // order significant: most frequent first
    for (int r : grammar.roles_of[static_cast<size_t>(e)])
      roles.push_back(grammar.vocabulary.role_name(r));
    roles_of[name] = roles;
  }
  j["eventSwitch"] = event_switch;
  j["templateSwitch"] = template_switch;
  j["transitions"] = transitions;
  j["rolesOf"] = roles_of;

  j["config"] = {{"unit", model.features.unit},
                 {"speedThreshold", model.features.speed_threshold},
                 {"closenessThreshold", model.features.closeness_threshold}};
  return dump(j);
}

Model model_from_json(const std::string& text) {
  json j = parse_text(text);
  check_fields(j, "$",
               {"version", "vocabulary", "standardizer", "templates", "eventSwitch",
                "templateSwitch", "transitions", "rolesOf", "config"});
  check_version(j, "$");

  Model model;
  Grammar& grammar = model.grammar;
  grammar.vocabulary = vocabulary_from(j["vocabulary"], "$.vocabulary");

  check_fields(j["standardizer"], "$.standardizer", {"mean", "stdev"});
  model.standardizer.mean = as_vector(j["standardizer"]["mean"], "$.standardizer.mean");
  model.standardizer.stdev = as_vector(j["standardizer"]["stdev"], "$.standardizer.stdev");

  const json& templates = as_array(j["templates"], "$.templates");
  for (size_t a = 0; a < templates.size(); ++a) {
    std::string tpath = "$.templates[" + std::to_string(a) + "]";
    check_fields(templates[a], tpath, {"id", "weights", "duration"});
    TemplateNode node;
    node.id = as_int(templates[a]["id"], tpath + ".id");
    node.weights = as_vector(templates[a]["weights"], tpath + ".weights");
    check_fields(templates[a]["duration"], tpath + ".duration", {"mu", "sigma"});
    node.duration_mu = as_number(templates[a]["duration"]["mu"], tpath + ".duration.mu");
    node.duration_sigma = as_number(templates[a]["duration"]["sigma"], tpath + ".duration.sigma");
    grammar.templates.push_back(std::move(node));
  }

  int events = grammar.event_count();
  int count = grammar.template_count();
  grammar.event_switch = VecX::Constant(events, -kInf);
  grammar.template_switch = MatX::Constant(events, count, -kInf);
  grammar.transitions.resize(static_cast<size_t>(events));
  grammar.roles_of.resize(static_cast<size_t>(events));

  auto event_of = [&](const std::string& key, const std::string& path) {
    int e = grammar.vocabulary.event_index(key);
    if (e < 0) schema_fail(path + "." + key, "unknown event " + key);
    return e;
  };

  if (!j["eventSwitch"].is_object()) schema_fail("$.eventSwitch", "expected an object");
  for (const auto& item : j["eventSwitch"].items()) {
    int e = event_of(item.key(), "$.eventSwitch");
    grammar.event_switch[e] = as_number(item.value(), "$.eventSwitch." + item.key());
  }

  if (!j["templateSwitch"].is_object()) schema_fail("$.templateSwitch", "expected an object");
  for (const auto& item : j["templateSwitch"].items()) {
    int e = event_of(item.key(), "$.templateSwitch");
    std::string epath = "$.templateSwitch." + item.key();
    if (!item.value().is_object()) schema_fail(epath, "expected an object");
    for (const auto& entry : item.value().items()) {
      int a = -1;
      try {
        size_t used = 0;
        a = std::stoi(entry.key(), &used);
        if (used != entry.key().size()) a = -1;
      } catch (const std::exception&) {
        a = -1;
      }
      if (a < 0 || a >= count) schema_fail(epath + "." + entry.key(), "unknown template id");
      grammar.template_switch(e, a) = as_number(entry.value(), epath + "." + entry.key());
    }
  }

  if (!j["transitions"].is_object()) schema_fail("$.transitions", "expected an object");
  for (const auto& item : j["transitions"].items()) {
    int e = event_of(item.key(), "$.transitions");
    std::string epath = "$.transitions." + item.key();
    const json& pairs = as_array(item.value(), epath);
    for (size_t p = 0; p < pairs.size(); ++p) {
      std::string ppath = epath + "[" + std::to_string(p) + "]";
      if (!pairs[p].is_array() || pairs[p].size() != 2) schema_fail(ppath, "expected [from, to]");
      grammar.transitions[static_cast<size_t>(e)].push_back(
          {as_int(pairs[p][0], ppath + "[0]"), as_int(pairs[p][1], ppath + "[1]")});
    }
    std::sort(grammar.transitions[static_cast<size_t>(e)].begin(),
              grammar.transitions[static_cast<size_t>(e)].end());
  }

  if (!j["rolesOf"].is_object()) schema_fail("$.rolesOf", "expected an object");
  for (const auto& item : j["rolesOf"].items()) {
    int e = event_of(item.key(), "$.rolesOf");
    std::string epath = "$.rolesOf." + item.key();
    for (const std::string& name : as_strings(item.value(), epath)) {
      int r = grammar.vocabulary.role_index(name);
      if (r < 0) schema_fail(epath, "unknown role " + name);
      grammar.roles_of[static_cast<size_t>(e)].push_back(r);
    }
  }

  check_fields(j["config"], "$.config", {"unit", "speedThreshold", "closenessThreshold"});
  model.features.unit = as_number(j["config"]["unit"], "$.config.unit");
  model.features.speed_threshold =
      as_number(j["config"]["speedThreshold"], "$.config.speedThreshold");
  model.features.closeness_threshold =
      as_number(j["config"]["closenessThreshold"], "$.config.closenessThreshold");

  std::vector<std::string> violations = model.validate();
  if (!violations.empty()) fail("invalid-model", violations.front());
  return model;
}

// --- solution ---

namespace {

json breakdown_json(const EnergyBreakdown& breakdown, const LabelVocabulary& v) {
  json j;
  j["feasible"] = breakdown.feasible;
  j["total"] = finite(breakdown.total, "breakdown total");
  json per_group = json::array();
  for (const GroupEnergy& group : breakdown.per_group) {
    json g;
    g["event"] = v.events[static_cast<size_t>(group.event)];
    g["eventSelection"] = finite(group.event_selection, "eventSelection");
    g["feasible"] = group.feasible;
    g["total"] = finite(group.total, "group total");
    json segments = json::array();
    for (const SegmentEnergy& segment : group.segments) {
      json s;
      s["template"] = segment.template_id;
      s["interval"] = interval_json(segment.interval, "segment interval");
      s["templateSelection"] = finite(segment.template_selection, "templateSelection");
      s["templateAssignment"] = finite(segment.template_assignment, "templateAssignment");
      segments.push_back(std::move(s));
    }
    g["segments"] = segments;
    per_group.push_back(std::move(g));
  }
  j["perGroup"] = per_group;
  return j;
}

EnergyBreakdown breakdown_from(const json& j, const std::string& path,
                               const LabelVocabulary& v) {
  check_fields(j, path, {"feasible", "total", "perGroup"});
  EnergyBreakdown breakdown;
  breakdown.feasible = as_bool(j["feasible"], path + ".feasible");
  breakdown.total = as_number(j["total"], path + ".total");
  const json& per_group = as_array(j["perGroup"], path + ".perGroup");
  for (size_t g = 0; g < per_group.size(); ++g) {
    std::string gpath = path + ".perGroup[" + std::to_string(g) + "]";
    check_fields(per_group[g], gpath, {"event", "eventSelection", "feasible", "total", "segments"});
    GroupEnergy group;
    std::string event = as_string(per_group[g]["event"], gpath + ".event");
    group.event = v.event_index(event);
    if (group.event < 0) schema_fail(gpath + ".event", "unknown event " + event);
    group.event_selection = as_number(per_group[g]["eventSelection"], gpath + ".eventSelection");
    group.feasible = as_bool(per_group[g]["feasible"], gpath + ".feasible");
    group.total = as_number(per_group[g]["total"], gpath + ".total");
    const json& segments = as_array(per_group[g]["segments"], gpath + ".segments");
    for (size_t s = 0; s < segments.size(); ++s) {
      std::string spath = gpath + ".segments[" + std::to_string(s) + "]";
      check_fields(segments[s], spath,
                   {"template", "interval", "templateSelection", "templateAssignment"});
      SegmentEnergy segment;
      segment.template_id = as_int(segments[s]["template"], spath + ".template");
      segment.interval = as_interval(segments[s]["interval"], spath + ".interval");
      segment.template_selection =
          as_number(segments[s]["templateSelection"], spath + ".templateSelection");
      segment.template_assignment =
          as_number(segments[s]["templateAssignment"], spath + ".templateAssignment");
      group.segments.push_back(std::move(segment));
    }
    breakdown.per_group.push_back(std::move(group));
  }
  return breakdown;
}

}  // namespace

std::string solution_to_json(const Solution& solution, const EnergyBreakdown& breakdown,
                             const Dataset& dataset) {
  const LabelVocabulary& v = dataset.vocabulary;
  json j;
  j["version"] = 1;
  j["energy"] = finite(solution.energy, "energy");
  json groups = json::array();
  for (size_t g = 0; g < solution.groups.size(); ++g) {
    const ParseGraph& parse = solution.parses[g];
    json entry;
    json members = json::array();
    json roles;
    for (size_t m = 0; m < solution.groups[g].size(); ++m) {
      const std::string& id =
          dataset.trajectories[static_cast<size_t>(solution.groups[g][m])].id;
      members.push_back(id);
      roles[id] = v.role_name(parse.roles[m]);
    }
    entry["members"] = members;
    entry["roles"] = roles;
    entry["event"] = v.events[static_cast<size_t>(parse.event)];
    entry["extent"] = interval_json(parse.extent, "extent");
    json segmentation = json::array();
    for (const SegmentAssignment& segment : parse.segmentation) {
      json s;
      s["template"] = segment.template_id;
      s["interval"] = interval_json(segment.interval, "segment interval");
      segmentation.push_back(std::move(s));
    }
    entry["segmentation"] = segmentation;
    groups.push_back(std::move(entry));
  }
  j["groups"] = groups;
  j["breakdown"] = breakdown_json(breakdown, v);
  return dump(j);
}

LoadedSolution solution_from_json(const std::string& text, const Dataset& dataset) {
  json j = parse_text(text);
  check_fields(j, "$", {"version", "energy", "groups", "breakdown"});
  check_version(j, "$");
  const LabelVocabulary& v = dataset.vocabulary;

  LoadedSolution out;
  out.solution.energy = as_number(j["energy"], "$.energy");
  const json& groups = as_array(j["groups"], "$.groups");
  for (size_t g = 0; g < groups.size(); ++g) {
    std::string gpath = "$.groups[" + std::to_string(g) + "]";
    check_fields(groups[g], gpath, {"members", "roles", "event", "extent", "segmentation"});
    ParseGraph parse;
    std::string event = as_string(groups[g]["event"], gpath + ".event");
    parse.event = v.event_index(event);
    if (parse.event < 0) schema_fail(gpath + ".event", "unknown event " + event);
    parse.extent = as_interval(groups[g]["extent"], gpath + ".extent");

    std::vector<int> group_members;
    const json& members = as_array(groups[g]["members"], gpath + ".members");
    if (members.empty()) schema_fail(gpath + ".members", "empty group");
    const json& roles = groups[g]["roles"];
    if (!roles.is_object()) schema_fail(gpath + ".roles", "expected an object");
    if (roles.size() != members.size())
      schema_fail(gpath + ".roles", "role map size differs from member count");
    for (size_t m = 0; m < members.size(); ++m) {
      std::string mpath = gpath + ".members[" + std::to_string(m) + "]";
      std::string id = as_string(members[m], mpath);
      int index = dataset.trajectory_index(id);
      if (index < 0) schema_fail(mpath, "unknown trajectory " + id);
      group_members.push_back(index);
      if (!roles.contains(id)) schema_fail(gpath + ".roles." + id, "missing role");
      std::string role = as_string(roles[id], gpath + ".roles." + id);
      int r = v.role_index(role);
      if (r < 0) schema_fail(gpath + ".roles." + id, "unknown role " + role);
      parse.roles.push_back(r);
    }

    const json& segmentation = as_array(groups[g]["segmentation"], gpath + ".segmentation");
    for (size_t s = 0; s < segmentation.size(); ++s) {
      std::string spath = gpath + ".segmentation[" + std::to_string(s) + "]";
      check_fields(segmentation[s], spath, {"template", "interval"});
      SegmentAssignment segment;
      segment.template_id = as_int(segmentation[s]["template"], spath + ".template");
      segment.interval = as_interval(segmentation[s]["interval"], spath + ".interval");
      parse.segmentation.push_back(segment);
    }
    out.solution.groups.push_back(std::move(group_members));
    out.solution.parses.push_back(std::move(parse));
  }
  out.breakdown = breakdown_from(j["breakdown"], "$.breakdown", v);
  return out;
}

// --- scenario ---

namespace {

const char* kind_name(MotionDirective::Kind kind) {
  switch (kind) {
    case MotionDirective::Kind::Hold: return "hold";
    case MotionDirective::Kind::Goto: return "goto";
    case MotionDirective::Kind::Orbit: return "orbit";
  }
  return "hold";
}

}  // namespace

std::string scenario_to_json(const ScenarioScript& script) {
  json j;
  j["version"] = 1;
  j["name"] = script.name;
  j["vocabulary"] = vocabulary_json(script.vocabulary);
  j["sampleDt"] = script.sample_dt;
  j["unit"] = script.unit;
  j["noise"] = {{"positionJitter", script.noise.position_jitter},
                {"breakProb", script.noise.break_prob},
                {"idSwitchProb", script.noise.id_switch_prob}};

  json events = json::array();
  for (const EventScript& ev : script.events) {
    json e;
    e["event"] = ev.event;
    e["start"] = finite(ev.start, "event start");
    e["anchor"] = point_json(ev.anchor, "anchor");
    e["anchorJitter"] = ev.anchor_jitter;
    json cast = json::array();
    for (const CastEntry& entry : ev.cast) {
      json c;
      c["role"] = entry.role;
      c["count"] = entry.count;
      c["start"] = point_json(entry.start, "cast start");
      c["arrange"] = entry.arrange;
      c["spacing"] = entry.spacing;
      if (entry.span) c["span"] = interval_json(*entry.span, "cast span");
      cast.push_back(std::move(c));
    }
    e["cast"] = cast;
    json phases = json::array();
    for (const PhaseScript& phase : ev.phases) {
      json p;
      p["name"] = phase.name;
      p["duration"] = phase.duration;
      json moves;
      for (const auto& [role, move] : phase.moves) {
        json m;
        m["kind"] = kind_name(move.kind);
        m["target"] = point_json(move.target, "move target");
        if (move.kind == MotionDirective::Kind::Orbit) m["turns"] = move.turns;
        if (!move.arrange.empty()) m["arrange"] = move.arrange;
        if (move.spacing != 0) m["spacing"] = move.spacing;
        moves[role] = m;
      }
      p["moves"] = moves.is_null() ? json::object() : moves;
      phases.push_back(std::move(p));
    }
    e["phases"] = phases;
    events.push_back(std::move(e));
  }
  j["events"] = events;

  json scene = json::array();
  for (const SceneObjectScript& object : script.scene_objects) {
    json o;
    o["class"] = object.scene_class;
    o["attach"] = object.attach;
    json g;
    if (object.coords.size() == 1) {
      g["type"] = "point";
      g["coords"] = point_json(object.coords[0], "scene coords");
    } else {
      g["type"] = "polygon";
      json coords = json::array();
      for (const Vec2& p : object.coords) coords.push_back(point_json(p, "scene coords"));
      g["coords"] = coords;
    }
    o["geometry"] = g;
    scene.push_back(std::move(o));
  }
  j["scene"] = scene;
  return dump(j);
}

ScenarioScript scenario_from_json(const std::string& text) {
  json j = parse_text(text);
  check_fields(j, "$", {"version", "name", "vocabulary", "sampleDt", "unit", "noise", "events",
                        "scene"});
  check_version(j, "$");

  ScenarioScript script;
  script.name = as_string(j["name"], "$.name");
  script.vocabulary = vocabulary_from(j["vocabulary"], "$.vocabulary");
  script.sample_dt = as_number(j["sampleDt"], "$.sampleDt");
  script.unit = as_number(j["unit"], "$.unit");
  check_fields(j["noise"], "$.noise", {"positionJitter", "breakProb", "idSwitchProb"});
  script.noise.position_jitter = as_number(j["noise"]["positionJitter"], "$.noise.positionJitter");
  script.noise.break_prob = as_number(j["noise"]["breakProb"], "$.noise.breakProb");
  script.noise.id_switch_prob = as_number(j["noise"]["idSwitchProb"], "$.noise.idSwitchProb");

  const json& events = as_array(j["events"], "$.events");
  for (size_t e = 0; e < events.size(); ++e) {
    std::string epath = "$.events[" + std::to_string(e) + "]";
    check_fields(events[e], epath, {"event", "start", "anchor", "anchorJitter", "cast", "phases"});
    EventScript ev;
    ev.event = as_string(events[e]["event"], epath + ".event");
    ev.start = as_number(events[e]["start"], epath + ".start");
    ev.anchor = as_point(events[e]["anchor"], epath + ".anchor");
    ev.anchor_jitter = as_number(events[e]["anchorJitter"], epath + ".anchorJitter");

    const json& cast = as_array(events[e]["cast"], epath + ".cast");
    for (size_t c = 0; c < cast.size(); ++c) {
      std::string cpath = epath + ".cast[" + std::to_string(c) + "]";
      check_fields(cast[c], cpath, {"role", "count", "start", "arrange", "spacing"}, {"span"});
      CastEntry entry;
      entry.role = as_string(cast[c]["role"], cpath + ".role");
      entry.count = as_int(cast[c]["count"], cpath + ".count");
      entry.start = as_point(cast[c]["start"], cpath + ".start");
      entry.arrange = as_string(cast[c]["arrange"], cpath + ".arrange");
      entry.spacing = as_number(cast[c]["spacing"], cpath + ".spacing");
      if (cast[c].contains("span")) entry.span = as_interval(cast[c]["span"], cpath + ".span");
      ev.cast.push_back(std::move(entry));
    }

    const json& phases = as_array(events[e]["phases"], epath + ".phases");
    for (size_t p = 0; p < phases.size(); ++p) {
      std::string ppath = epath + ".phases[" + std::to_string(p) + "]";
      check_fields(phases[p], ppath, {"name", "duration", "moves"});
      PhaseScript phase;
      phase.name = as_string(phases[p]["name"], ppath + ".name");
      phase.duration = as_number(phases[p]["duration"], ppath + ".duration");
      if (!phases[p]["moves"].is_object()) schema_fail(ppath + ".moves", "expected an object");
      for (const auto& item : phases[p]["moves"].items()) {
        std::string mpath = ppath + ".moves." + item.key();
        check_fields(item.value(), mpath, {"kind", "target"}, {"turns", "arrange", "spacing"});
        MotionDirective move;
        std::string kind = as_string(item.value()["kind"], mpath + ".kind");
        if (kind == "hold") move.kind = MotionDirective::Kind::Hold;
        else if (kind == "goto") move.kind = MotionDirective::Kind::Goto;
        else if (kind == "orbit") move.kind = MotionDirective::Kind::Orbit;
        else schema_fail(mpath + ".kind", "expected hold, goto, or orbit");
        move.target = as_point(item.value()["target"], mpath + ".target");
        if (item.value().contains("turns"))
          move.turns = as_number(item.value()["turns"], mpath + ".turns");
        if (item.value().contains("arrange"))
          move.arrange = as_string(item.value()["arrange"], mpath + ".arrange");
        if (item.value().contains("spacing"))
          move.spacing = as_number(item.value()["spacing"], mpath + ".spacing");
        phase.moves[item.key()] = std::move(move);
      }
      ev.phases.push_back(std::move(phase));
    }
    script.events.push_back(std::move(ev));
  }

  const json& scene = as_array(j["scene"], "$.scene");
  for (size_t o = 0; o < scene.size(); ++o) {
    std::string opath = "$.scene[" + std::to_string(o) + "]";
    check_fields(scene[o], opath, {"class", "attach", "geometry"});
    SceneObjectScript object;
    object.scene_class = as_string(scene[o]["class"], opath + ".class");
    object.attach = as_int(scene[o]["attach"], opath + ".attach");
    const json& g = scene[o]["geometry"];
    check_fields(g, opath + ".geometry", {"type", "coords"});
    std::string type = as_string(g["type"], opath + ".geometry.type");
    std::string cpath = opath + ".geometry.coords";
    if (type == "point") {
      object.coords = {as_point(g["coords"], cpath)};
    } else if (type == "polygon") {
      const json& coords = as_array(g["coords"], cpath);
      for (size_t p = 0; p < coords.size(); ++p)
        object.coords.push_back(as_point(coords[p], cpath + "[" + std::to_string(p) + "]"));
    } else {
      schema_fail(opath + ".geometry.type", "expected 'point' or 'polygon'");
    }
    script.scene_objects.push_back(std::move(object));
  }

  std::string defect = script.check();
  if (!defect.empty()) fail("invalid-script", defect);
  return script;
}

// --- evaluation report ---

std::string eval_report_to_json(const EvalReport& report, const LabelVocabulary& vocabulary) {
  json j;
  j["version"] = 1;
  j["groupingPrecision"] = finite(report.grouping_precision, "groupingPrecision");
  j["groupingRecall"] = finite(report.grouping_recall, "groupingRecall");
  j["groupingF"] = finite(report.grouping_f, "groupingF");
  j["eventAccuracy"] = finite(report.event_accuracy, "eventAccuracy");
  j["roleAccuracy"] = finite(report.role_accuracy, "roleAccuracy");
  j["events"] = vocabulary.events;
  json roles = json::array();
  for (int r = 0; r < vocabulary.role_count(); ++r) roles.push_back(vocabulary.role_name(r));
  j["roles"] = roles;

  json event_confusion = json::array();
  for (Eigen::Index r = 0; r < report.per_event_confusion.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < report.per_event_confusion.cols(); ++c)
      row.push_back(report.per_event_confusion(r, c));
    event_confusion.push_back(std::move(row));
  }
  j["perEventConfusion"] = event_confusion;

  json role_confusion;
  for (size_t e = 0; e < report.per_role_confusion.size(); ++e) {
    json matrix = json::array();
    for (Eigen::Index r = 0; r < report.per_role_confusion[e].rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < report.per_role_confusion[e].cols(); ++c)
        row.push_back(report.per_role_confusion[e](r, c));
      matrix.push_back(std::move(row));
    }
    role_confusion[vocabulary.events[e]] = matrix;
  }
  j["perRoleConfusion"] = role_confusion.is_null() ? json::object() : role_confusion;
  return dump(j);
}

std::string eval_report_table(const EvalReport& report, const LabelVocabulary& vocabulary) {
  std::ostringstream out;
  char line[128];
  auto row = [&](const char* name, Scalar value) {
    std::snprintf(line, sizeof line, "  %-20s %8.4f\n", name, value);
    out << line;
  };
  out << "metric                        value\n";
  row("grouping precision", report.grouping_precision);
  row("grouping recall", report.grouping_recall);
  row("grouping F", report.grouping_f);
  row("event accuracy", report.event_accuracy);
  row("role accuracy", report.role_accuracy);

  out << "per-event confusion (rows = truth duration mass):\n";
  for (Eigen::Index r = 0; r < report.per_event_confusion.rows(); ++r) {
    std::snprintf(line, sizeof line, "  %-14s", vocabulary.events[static_cast<size_t>(r)].c_str());
    out << line;
    for (Eigen::Index c = 0; c < report.per_event_confusion.cols(); ++c) {
      std::snprintf(line, sizeof line, " %8.1f", report.per_event_confusion(r, c));
      out << line;
    }
    out << "\n";
  }
  return out.str();
}

// --- files ---

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("io", "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("io", "cannot write " + path);
  out << content;
  if (!out) fail("io", "short write to " + path);
}

Dataset load_dataset(const std::string& path) { return dataset_from_json(read_file(path)); }
void save_dataset(const Dataset& dataset, const std::string& path) {
  write_file(path, dataset_to_json(dataset));
}
Model load_model(const std::string& path) { return model_from_json(read_file(path)); }
void save_model(const Model& model, const std::string& path) {
  write_file(path, model_to_json(model));
}
LoadedSolution load_solution(const std::string& path, const Dataset& dataset) {
  return solution_from_json(read_file(path), dataset);
}
void save_solution(const Solution& solution, const EnergyBreakdown& breakdown,
                   const Dataset& dataset, const std::string& path) {
  write_file(path, solution_to_json(solution, breakdown, dataset));
}
ScenarioScript load_scenario(const std::string& path) {
  return scenario_from_json(read_file(path));
}
void save_scenario(const ScenarioScript& script, const std::string& path) {
  write_file(path, scenario_to_json(script));
}

}  // namespace stparse
