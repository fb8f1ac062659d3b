#include "stparse/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace stparse {
namespace {

constexpr Scalar kAlignTol = 1e-6;

Scalar snap_down(Scalar t, Scalar unit) { return std::floor((t + 1e-9) / unit) * unit; }
Scalar snap_up(Scalar t, Scalar unit) { return std::ceil((t - 1e-9) / unit) * unit; }

int tick_of(const Interval& extent, Scalar t, Scalar unit, const char* what) {
  Scalar raw = (t - extent.t0) / unit;
  int k = static_cast<int>(std::round(raw));
  if (std::abs(raw - k) * unit > kAlignTol)
    fail("alignment", std::string(what) + " does not align with the unit grid");
  return k;
}

}  // namespace

GroupContext::GroupContext(const Dataset& dataset, std::vector<int> members,
                           const FeatureConfig& config, std::optional<Interval> extent_override)
    : dataset_(&dataset), members_(std::move(members)), config_(config) {
  std::string config_defect = config_.check();
  if (!config_defect.empty()) fail("invalid-argument", config_defect);
  if (members_.empty()) fail("empty-group", "group has no members");
  std::sort(members_.begin(), members_.end());
  for (int m : members_) {
    if (m < 0 || m >= static_cast<int>(dataset.trajectories.size()))
      fail("unknown-symbol", "group member index out of range");
  }
  space_ = FeatureSpace::of(dataset.vocabulary);

  if (extent_override) {
    extent_ = {snap_down(extent_override->t0, config_.unit),
               snap_up(extent_override->t1, config_.unit)};
  } else {
    Scalar lo = kInf, hi = -kInf;
    for (int m : members_) {
      lo = std::min(lo, dataset.trajectories[static_cast<size_t>(m)].start_time());
      hi = std::max(hi, dataset.trajectories[static_cast<size_t>(m)].end_time());
    }
    extent_ = {snap_down(lo, config_.unit), snap_up(hi, config_.unit)};
  }
  if (extent_.t1 <= extent_.t0) extent_.t1 = extent_.t0 + config_.unit;
  ticks_ = static_cast<int>(std::round(extent_.length() / config_.unit));

  units_.resize(static_cast<size_t>(ticks_));
  for (int k = 0; k < ticks_; ++k) {
    Unit& unit = units_[static_cast<size_t>(k)];
    unit.interval = {extent_.t0 + k * config_.unit, extent_.t0 + (k + 1) * config_.unit};
    for (size_t local = 0; local < members_.size(); ++local) {
      const Trajectory& traj = dataset.trajectories[static_cast<size_t>(members_[local])];
      Interval common = overlap(traj.span(), unit.interval);
      if (common.length() < config_.tick - 1e-9) continue;
      unit.present.push_back(static_cast<int>(local));
      unit.segments.push_back(
          slice_on_grid(traj, members_[local], unit.interval, config_.tick));
    }

    unit.base = VecX::Zero(space_.dim());
    if (unit.present.empty()) continue;

    // Unary blocks except the role counts.
    std::vector<char> moving(unit.present.size(), 0);
    std::vector<std::vector<char>> close(unit.present.size());
    for (size_t i = 0; i < unit.present.size(); ++i) {
      const TrajectorySegment& seg = unit.segments[i];
      moving[i] = seg.mean_speed() > config_.speed_threshold ? 1 : 0;
      unit.base[space_.off_moving()] += moving[i];
      close[i].assign(static_cast<size_t>(space_.scene_classes), 0);
      for (int l = 0; l < space_.scene_classes; ++l) {
        Scalar best = kInf;
        for (const Vec2& p : seg.points) best = std::min(best, dataset.scene.distance(p, l));
        if (best < config_.closeness_threshold) {
          close[i][static_cast<size_t>(l)] = 1;
          unit.base[space_.off_closeness() + l] += 1;
        }
      }
    }

    // Pairwise blocks except the role compatibilities.
    for (size_t i = 0; i < unit.present.size(); ++i) {
      for (size_t j = i + 1; j < unit.present.size(); ++j) {
        const TrajectorySegment& a = unit.segments[i];
        const TrajectorySegment& b = unit.segments[j];
        Scalar sum = 0;
        for (size_t p = 0; p < a.points.size(); ++p) sum += (a.points[p] - b.points[p]).norm();
        unit.base[space_.off_distance()] += sum / static_cast<Scalar>(a.points.size());

        Vec2 da = a.net_displacement();
        Vec2 db = b.net_displacement();
        if (da.norm() >= 1e-12 && db.norm() >= 1e-12)
          unit.base[space_.off_angle()] +=
              std::acos(std::clamp(da.dot(db) / (da.norm() * db.norm()), -1.0, 1.0));

        unit.base[space_.off_speed_compat() + (moving[i] ? 2 : 0) + (moving[j] ? 1 : 0)] += 1;
        for (int la = 0; la < space_.scene_classes; ++la) {
          if (!close[i][static_cast<size_t>(la)]) continue;
          for (int lb = 0; lb < space_.scene_classes; ++lb) {
            if (close[j][static_cast<size_t>(lb)])
              unit.base[space_.off_closeness_compat() + la * space_.scene_classes + lb] += 1;
          }
        }
      }
    }

    Vec2 center = Vec2::Zero();
    int count = 0;
    std::vector<const TrajectorySegment*> seg_ptrs;
    for (const TrajectorySegment& seg : unit.segments) {
      seg_ptrs.push_back(&seg);
      for (const Vec2& p : seg.points) {
        center += p;
        ++count;
      }
    }
    center /= static_cast<Scalar>(count);
    unit.base.segment(space_.off_histogram(), FeatureSpace::kHistogramBins) =
        velocity_histogram(seg_ptrs, center);
  }
}

Interval GroupContext::unit_interval(int k) const {
  if (k < 0 || k >= ticks_) fail("invalid-argument", "unit index out of range");
  return units_[static_cast<size_t>(k)].interval;
}

MatX GroupContext::features(const std::vector<int>& roles) const {
  if (roles.size() != members_.size())
    fail("invalid-argument", "role assignment size != member count");
  for (int r : roles) {
    if (r < 0 || r >= space_.roles) fail("unknown-symbol", "role index out of range");
  }
  MatX rows(ticks_, space_.dim());
  for (int k = 0; k < ticks_; ++k) {
    const Unit& unit = units_[static_cast<size_t>(k)];
    VecX v = unit.base;
    for (size_t i = 0; i < unit.present.size(); ++i)
      v[roles[static_cast<size_t>(unit.present[i])]] += 1;
    for (size_t i = 0; i < unit.present.size(); ++i) {
      int ri = roles[static_cast<size_t>(unit.present[i])];
      for (size_t j = i + 1; j < unit.present.size(); ++j)
        v[space_.off_role_compat() + ri * space_.roles +
          roles[static_cast<size_t>(unit.present[j])]] += 1;
    }
    rows.row(k) = v.transpose();
  }
  return rows;
}

std::vector<MemberSegment> GroupContext::unit_members(int k, const std::vector<int>& roles) const {
  if (k < 0 || k >= ticks_) fail("invalid-argument", "unit index out of range");
  if (roles.size() != members_.size())
    fail("invalid-argument", "role assignment size != member count");
  const Unit& unit = units_[static_cast<size_t>(k)];
  std::vector<MemberSegment> out;
  for (size_t i = 0; i < unit.present.size(); ++i)
    out.push_back({&unit.segments[i], roles[static_cast<size_t>(unit.present[i])]});
  return out;
}

Scalar log_normal_log_pdf(Scalar x, Scalar mu, Scalar sigma) {
  if (!(x > 0)) fail("invalid-argument", "log-normal support is positive durations");
  if (!(sigma > 0)) fail("invalid-argument", "sigma must be positive");
  Scalar z = (std::log(x) - mu) / sigma;
  return -std::log(x) - std::log(sigma) - 0.5 * std::log(2 * kPi) - 0.5 * z * z;
}

Scalar unit_log_likelihood(const std::vector<MemberSegment>& members, const SceneModel& scene,
                           const TemplateNode& node, const Model& model) {
  FeatureSpace space = FeatureSpace::of(model.grammar.vocabulary);
  RelationVector psi = relation_vector(members, scene, space, model.features);
  return node.weights.dot(model.standardizer.apply(psi.concat()));
}

MatX unit_scores(const GroupContext& context, const std::vector<int>& roles, const Model& model) {
  MatX rows = context.features(roles);
  model.standardizer.apply_rows_in_place(rows);
  MatX scores = rows * model.weight_matrix();
  for (int k = 0; k < context.ticks(); ++k) {
    if (context.unit_empty(k)) scores.row(k).setZero();
  }
  return scores;
}

Scalar interval_log_posterior(const GroupContext& context, const std::vector<int>& roles,
                              const TemplateNode& node, const Interval& interval,
                              const Model& model) {
  int k0 = tick_of(context.extent(), interval.t0, model.features.unit, "interval start");
  int k1 = tick_of(context.extent(), interval.t1, model.features.unit, "interval end");
  if (k0 < 0 || k1 > context.ticks() || k0 >= k1)
    fail("alignment", "interval lies outside the group extent");

  Scalar total = log_normal_log_pdf(interval.length(), node.duration_mu, node.duration_sigma);
  for (int k = k0; k < k1; ++k) {
    if (context.unit_empty(k)) continue;
    total += unit_log_likelihood(context.unit_members(k, roles), context.dataset().scene, node,
                                 model);
  }
  return total;
}

GroupEnergy group_energy_breakdown(const GroupContext& context, const ParseGraph& parse,
                                   const Model& model) {
  const Grammar& grammar = model.grammar;
  if (parse.event < 0 || parse.event >= grammar.event_count())
    fail("unknown-symbol", "parse event index out of range");
  if (parse.roles.size() != context.members().size())
    fail("alignment", "parse role count != group member count");
  if (parse.segmentation.empty()) fail("alignment", "parse has no segmentation");

  // The segmentation must tile the group extent.
  const Interval extent = context.extent();
  if (std::abs(parse.extent.t0 - extent.t0) > kAlignTol ||
      std::abs(parse.extent.t1 - extent.t1) > kAlignTol)
    fail("alignment", "parse extent != group extent");
  Scalar cursor = extent.t0;
  for (const SegmentAssignment& seg : parse.segmentation) {
    if (std::abs(seg.interval.t0 - cursor) > kAlignTol)
      fail("alignment", "segmentation does not tile the group extent");
    cursor = seg.interval.t1;
  }
  if (std::abs(cursor - extent.t1) > kAlignTol)
    fail("alignment", "segmentation does not reach the extent end");

  GroupEnergy out;
  out.event = parse.event;
  out.event_selection = -grammar.event_switch[parse.event];
  out.total = out.event_selection;

  MatX scores = unit_scores(context, parse.roles, model);
  int previous = -1;
  for (const SegmentAssignment& seg : parse.segmentation) {
    if (seg.template_id < 0 || seg.template_id >= grammar.template_count())
      fail("unknown-symbol", "segment template index out of range");
    if (!grammar.admissible(parse.event, seg.template_id) ||
        (previous >= 0 && !grammar.transition_allowed(parse.event, previous, seg.template_id))) {
      out.feasible = false;
      out.total = kInf;
      out.segments.clear();
      return out;
    }
    int k0 = tick_of(extent, seg.interval.t0, model.features.unit, "segment start");
    int k1 = tick_of(extent, seg.interval.t1, model.features.unit, "segment end");

    const TemplateNode& node = grammar.templates[static_cast<size_t>(seg.template_id)];
    Scalar posterior =
        log_normal_log_pdf(seg.interval.length(), node.duration_mu, node.duration_sigma);
    for (int k = k0; k < k1; ++k) posterior += scores(k, seg.template_id);

    SegmentEnergy entry;
    entry.template_id = seg.template_id;
    entry.interval = seg.interval;
    entry.template_selection = -grammar.template_switch(parse.event, seg.template_id);
    entry.template_assignment = -posterior;
    out.total += entry.template_selection + entry.template_assignment;
    out.segments.push_back(entry);
    previous = seg.template_id;
  }
  return out;
}

Scalar group_energy(const GroupContext& context, const ParseGraph& parse, const Model& model) {
  return group_energy_breakdown(context, parse, model).total;
}

EnergyBreakdown solution_energy(const Solution& solution, const Dataset& dataset,
                                const Model& model) {
  if (solution.groups.size() != solution.parses.size())
    fail("alignment", "solution has " + std::to_string(solution.groups.size()) + " groups but " +
                          std::to_string(solution.parses.size()) + " parses");
  std::set<int> seen;
  for (const auto& group : solution.groups) {
    if (group.empty()) fail("empty-group", "solution contains an empty group");
    for (int m : group) {
      if (m < 0 || m >= static_cast<int>(dataset.trajectories.size()))
        fail("unknown-symbol", "solution references trajectory index out of range");
      if (!seen.insert(m).second)
        fail("alignment", "trajectory " + dataset.trajectories[static_cast<size_t>(m)].id +
                              " appears in two groups");
    }
  }
  if (seen.size() != dataset.trajectories.size())
    fail("alignment", "solution does not cover every trajectory");

  EnergyBreakdown out;
  for (size_t i = 0; i < solution.groups.size(); ++i) {
    GroupContext context(dataset, solution.groups[i], model.features);
    out.per_group.push_back(group_energy_breakdown(context, solution.parses[i], model));
    if (!out.per_group.back().feasible) out.feasible = false;
  }
  out.total = 0;
  for (const GroupEnergy& g : out.per_group) out.total += g.total;
  return out;
}

}  // namespace stparse
