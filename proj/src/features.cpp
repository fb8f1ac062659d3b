#include "stparse/features.hpp"

#include <algorithm>
#include <cmath>

namespace stparse {
namespace {

constexpr Scalar kTimeEps = 1e-6;
constexpr Scalar kSpeedEps = 1e-12;

void require_same_grid(const TrajectorySegment& a, const TrajectorySegment& b) {
  if (std::abs(a.interval.t0 - b.interval.t0) > kTimeEps ||
      std::abs(a.interval.t1 - b.interval.t1) > kTimeEps || a.points.size() != b.points.size())
    fail("interval-mismatch", "segments cover different tick grids");
}

}  // namespace

std::string FeatureConfig::check() const {
  if (!(unit > 0)) return "unit must be positive";
  if (!(tick > 0)) return "tick must be positive";
  Scalar ratio = unit / tick;
  if (std::abs(ratio - std::round(ratio)) > 1e-9) return "tick must divide unit";
  if (!(speed_threshold >= 0)) return "speedThreshold must be non-negative";
  if (!(closeness_threshold > 0)) return "closenessThreshold must be positive";
  return "";
}

VecX UnaryAttributes::encode(const FeatureSpace& space) const {
  VecX v = VecX::Zero(space.unary_dim());
  v[role] = 1;
  v[space.off_moving()] = moving ? 1 : 0;
  for (int l = 0; l < space.scene_classes; ++l)
    v[space.off_closeness() + l] = closeness[static_cast<size_t>(l)] ? 1 : 0;
  return v;
}

VecX PairwiseRelations::encode(const FeatureSpace& space) const {
  VecX v(space.pair_dim());
  v[0] = mean_distance;
  v[1] = angle;
  v.segment(2, space.roles * space.roles) = role_compat;
  v.segment(2 + space.roles * space.roles, 4) = speed_compat;
  v.tail(space.scene_classes * space.scene_classes) = closeness_compat;
  return v;
}

VecX RelationVector::concat() const {
  VecX v(summed_unary.size() + summed_pairwise.size() + histogram.size());
  v << summed_unary, summed_pairwise, histogram;
  return v;
}

UnaryAttributes unary(const TrajectorySegment& segment, int role, const SceneModel& scene,
                      const FeatureSpace& space, const FeatureConfig& config) {
  if (role < 0 || role >= space.roles) fail("unknown-symbol", "role index out of range");
  UnaryAttributes out;
  out.role = role;
  out.moving = segment.mean_speed() > config.speed_threshold;
  out.closeness.assign(static_cast<size_t>(space.scene_classes), 0);
  for (int l = 0; l < space.scene_classes; ++l) {
    Scalar best = kInf;
    for (const Vec2& p : segment.points) best = std::min(best, scene.distance(p, l));
    out.closeness[static_cast<size_t>(l)] = best < config.closeness_threshold ? 1 : 0;
  }
  return out;
}

PairwiseRelations pairwise(const TrajectorySegment& a, const UnaryAttributes& ua,
                           const TrajectorySegment& b, const UnaryAttributes& ub,
                           const FeatureSpace& space) {
  require_same_grid(a, b);
  PairwiseRelations out;

  Scalar sum = 0;
  for (size_t i = 0; i < a.points.size(); ++i) sum += (a.points[i] - b.points[i]).norm();
  out.mean_distance = sum / static_cast<Scalar>(a.points.size());

  Vec2 da = a.net_displacement();
  Vec2 db = b.net_displacement();
  Scalar na = da.norm();
  Scalar nb = db.norm();
  out.angle = (na < kSpeedEps || nb < kSpeedEps)
                  ? 0
                  : std::acos(std::clamp(da.dot(db) / (na * nb), -1.0, 1.0));

  out.role_compat = VecX::Zero(space.roles * space.roles);
  out.role_compat[ua.role * space.roles + ub.role] = 1;

  out.speed_compat = VecX::Zero(4);
  out.speed_compat[(ua.moving ? 1 : 0) * 2 + (ub.moving ? 1 : 0)] = 1;

  out.closeness_compat = VecX::Zero(space.scene_classes * space.scene_classes);
  for (int la = 0; la < space.scene_classes; ++la) {
    if (!ua.closeness[static_cast<size_t>(la)]) continue;
    for (int lb = 0; lb < space.scene_classes; ++lb) {
      if (ub.closeness[static_cast<size_t>(lb)])
        out.closeness_compat[la * space.scene_classes + lb] = 1;
    }
  }
  return out;
}

VecX velocity_histogram(const std::vector<const TrajectorySegment*>& segments,
                        const Vec2& center) {
  if (segments.empty()) fail("empty-group", "velocity histogram needs at least one segment");

  Scalar rmax = 0;
  for (const TrajectorySegment* seg : segments)
    for (const Vec2& p : seg->points) rmax = std::max(rmax, (p - center).norm());

  VecX bins = VecX::Zero(FeatureSpace::kHistogramBins);
  int counted = 0;
  for (const TrajectorySegment* seg : segments) {
    for (size_t i = 0; i + 1 < seg->points.size(); ++i) {
      Scalar dt = seg->times[i + 1] - seg->times[i];
      if (dt <= 0) continue;
      Vec2 v = (seg->points[i + 1] - seg->points[i]) / dt;
      if (v.norm() <= kSpeedEps) continue;
      Scalar theta = std::atan2(v.y(), v.x());
      if (theta < 0) theta += 2 * kPi;
      int obin = std::min(static_cast<int>(theta / (kPi / 3)), 5);
      Scalar r = (seg->points[i] - center).norm();
      int rbin = rmax <= 0 ? 0 : std::min(static_cast<int>(3 * r / rmax), 2);
      bins[obin * 3 + rbin] += 1;
      ++counted;
    }
  }
  if (counted > 0) bins /= static_cast<Scalar>(counted);
  return bins;
}

RelationVector relation_vector(const std::vector<MemberSegment>& members,
                               const SceneModel& scene, const FeatureSpace& space,
                               const FeatureConfig& config) {
  if (members.empty()) fail("empty-group", "relation vector needs at least one member");
  for (size_t i = 1; i < members.size(); ++i)
    require_same_grid(*members[0].segment, *members[i].segment);

  RelationVector out;
  out.summed_unary = VecX::Zero(space.unary_dim());
  out.summed_pairwise = VecX::Zero(space.pair_dim());

  std::vector<UnaryAttributes> attrs;
  attrs.reserve(members.size());
  for (const MemberSegment& m : members) {
    attrs.push_back(unary(*m.segment, m.role, scene, space, config));
    out.summed_unary += attrs.back().encode(space);
  }
  for (size_t i = 0; i < members.size(); ++i) {
    for (size_t j = i + 1; j < members.size(); ++j) {
      out.summed_pairwise +=
          pairwise(*members[i].segment, attrs[i], *members[j].segment, attrs[j], space)
              .encode(space);
    }
  }

  Vec2 center = Vec2::Zero();
  int count = 0;
  std::vector<const TrajectorySegment*> segments;
  for (const MemberSegment& m : members) {
    segments.push_back(m.segment);
    for (const Vec2& p : m.segment->points) {
      center += p;
      ++count;
    }
  }
  center /= static_cast<Scalar>(count);
  out.histogram = velocity_histogram(segments, center);
  return out;
}

void FeatureStandardizer::fit(const MatX& rows) {
  if (rows.rows() == 0) fail("not-enough-data", "standardizer needs at least one sample");
  mean = rows.colwise().mean();
  VecX var = ((rows.rowwise() - mean.transpose()).array().square().colwise().sum() /
              static_cast<Scalar>(rows.rows()))
                 .matrix();
  stdev = var.array().sqrt().matrix();
  // Columns whose spread is at rounding-noise scale are constants for all
  // practical purposes; dividing by their "deviation" would amplify noise
  // into structure. The smallest genuine spread (a binary attribute seen once
  // among many samples) is orders of magnitude above this threshold.
  for (Eigen::Index d = 0; d < stdev.size(); ++d) {
    if (stdev[d] < 1e-6 * std::max(Scalar(1), std::abs(mean[d]))) stdev[d] = 1;
  }
}

void FeatureStandardizer::apply_rows_in_place(MatX& rows) const {
  rows.rowwise() -= mean.transpose();
  rows.array().rowwise() /= stdev.transpose().array();
}

}  // namespace stparse
