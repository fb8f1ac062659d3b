#pragma once
// Energy terms of a solution: per-unit template log-likelihoods, per-interval
// log posteriors with the duration prior, and the total solution energy with
// its per-group breakdown.
#include <optional>
#include <vector>

#include "stparse/core.hpp"
#include "stparse/model.hpp"

namespace stparse {

// Per-group feature cache. The group extent is the union span of the member
// trajectories snapped outward to unit boundaries (or an explicit override),
// tiled into unit intervals. A member participates in a unit when its span
// overlaps the unit by at least one tick; participating members are sampled
// on the unit's tick grid with positions clamped to the trajectory span.
// Role-independent feature blocks are cached once; assembling the relation
// vector for a role assignment only fills the role count and role pair blocks.
class GroupContext {
 public:
  GroupContext(const Dataset& dataset, std::vector<int> members, const FeatureConfig& config,
               std::optional<Interval> extent_override = std::nullopt);

  const std::vector<int>& members() const { return members_; }
  const Dataset& dataset() const { return *dataset_; }
  const FeatureConfig& config() const { return config_; }
  Interval extent() const { return extent_; }
  int ticks() const { return ticks_; }
  Interval unit_interval(int k) const;
  bool unit_empty(int k) const { return units_[static_cast<size_t>(k)].present.empty(); }

  // Raw (unstandardized) relation vectors, one row per unit. Rows of units
  // with no participating member are zero.
  MatX features(const std::vector<int>& roles) const;

  // The member segments participating in unit k, labeled with roles.
  std::vector<MemberSegment> unit_members(int k, const std::vector<int>& roles) const;

  // Local member indices present in unit k and the cached role-independent
  // feature blocks, for callers that assemble role-dependent scores directly.
  const std::vector<int>& unit_present(int k) const { return units_[static_cast<size_t>(k)].present; }
  const VecX& unit_base(int k) const { return units_[static_cast<size_t>(k)].base; }
  const FeatureSpace& space() const { return space_; }

 private:
  struct Unit {
    Interval interval;
    std::vector<int> present;  // local member indices, ascending
    std::vector<TrajectorySegment> segments;
    VecX base;  // role-independent feature blocks
  };

  const Dataset* dataset_;
  std::vector<int> members_;
  FeatureConfig config_;
  FeatureSpace space_;
  Interval extent_;
  int ticks_ = 0;
  std::vector<Unit> units_;
};

Scalar log_normal_log_pdf(Scalar x, Scalar mu, Scalar sigma);

// w_a . standardize(psi) for one unit interval.
Scalar unit_log_likelihood(const std::vector<MemberSegment>& members, const SceneModel& scene,
                           const TemplateNode& node, const Model& model);

// Standardized unit scores for every template: ticks x templates. Rows of
// units with no participating member are zero for every template.
MatX unit_scores(const GroupContext& context, const std::vector<int>& roles, const Model& model);

// Sum of unit scores inside the interval plus the duration log prior. The
// interval must align with the group's unit grid.
Scalar interval_log_posterior(const GroupContext& context, const std::vector<int>& roles,
                              const TemplateNode& node, const Interval& interval,
                              const Model& model);

struct SegmentEnergy {
  int template_id = -1;
  Interval interval;
  Scalar template_selection = 0;   // -log p(template | event)
  Scalar template_assignment = 0;  // -interval log posterior
};

struct GroupEnergy {
  int event = -1;
  Scalar event_selection = 0;  // -log p(event | root)
  std::vector<SegmentEnergy> segments;
  Scalar total = 0;
  bool feasible = true;
};

struct EnergyBreakdown {
  std::vector<GroupEnergy> per_group;
  Scalar total = 0;
  bool feasible = true;
};

// Energy of one parsed group; +inf when the parse uses an inadmissible
// template or a forbidden transition. Structural defects (bad tiling, role
// count mismatch) raise errors.
Scalar group_energy(const GroupContext& context, const ParseGraph& parse, const Model& model);
GroupEnergy group_energy_breakdown(const GroupContext& context, const ParseGraph& parse,
                                   const Model& model);

// Full solution energy. The grouping must partition the dataset trajectories.
EnergyBreakdown solution_energy(const Solution& solution, const Dataset& dataset,
                                const Model& model);

}  // namespace stparse
