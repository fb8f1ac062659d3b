#pragma once
// Group relation features over one unit interval: per-member unary attributes,
// pairwise relations, and a polar velocity histogram, concatenated into the
// relation vector that templates score.
#include <vector>

#include "stparse/core.hpp"
#include "stparse/types.hpp"

namespace stparse {

struct FeatureConfig {
  Scalar unit = 2.0;   // unit interval length in seconds
  Scalar tick = 0.5;   // resampling tick; must divide unit
  Scalar speed_threshold = 2.0;
  Scalar closeness_threshold = 70.0;
  std::string check() const;  // empty when valid
};

// Dimension layout of the relation vector, fixed by the vocabulary. Blocks:
//   [0, R)                 summed role one-hots
//   [R]                    summed moving indicators
//   [R+1, R+1+S)           summed scene-closeness indicators
//   [U]                    summed pair mean distances
//   [U+1]                  summed pair displacement angles
//   [U+2, U+2+R^2)         summed role Kronecker compatibilities
//   [U+2+R^2, +4)          summed moving Kronecker compatibilities
//   [U+2+R^2+4, +S^2)      summed closeness Kronecker compatibilities
//   [H, H+18)              velocity histogram (6 orientations x 3 radii)
// where R = role count, S = scene class count, U = unary size, H = U + pair size.
struct FeatureSpace {
  int roles = 0;
  int scene_classes = 0;

  static FeatureSpace of(const LabelVocabulary& vocabulary) {
    return {vocabulary.role_count(), static_cast<int>(vocabulary.scene_classes.size())};
  }

  static constexpr int kHistogramBins = 18;
  int unary_dim() const { return roles + 1 + scene_classes; }
  int pair_dim() const { return 2 + roles * roles + 4 + scene_classes * scene_classes; }
  int dim() const { return unary_dim() + pair_dim() + kHistogramBins; }

  int off_moving() const { return roles; }
  int off_closeness() const { return roles + 1; }
  int off_pair() const { return unary_dim(); }
  int off_distance() const { return off_pair(); }
  int off_angle() const { return off_pair() + 1; }
  int off_role_compat() const { return off_pair() + 2; }
  int off_speed_compat() const { return off_role_compat() + roles * roles; }
  int off_closeness_compat() const { return off_speed_compat() + 4; }
  int off_histogram() const { return unary_dim() + pair_dim(); }
};

struct UnaryAttributes {
  int role = -1;
  bool moving = false;
  std::vector<char> closeness;  // one flag per scene class

  VecX encode(const FeatureSpace& space) const;
};

struct PairwiseRelations {
  Scalar mean_distance = 0;
  Scalar angle = 0;          // between net displacements, in [0, pi]
  VecX role_compat;          // roles^2 Kronecker block
  VecX speed_compat;         // 4-dim Kronecker block
  VecX closeness_compat;     // scene_classes^2 Kronecker block

  VecX encode(const FeatureSpace& space) const;
};

struct RelationVector {
  VecX summed_unary;
  VecX summed_pairwise;
  VecX histogram;

  VecX concat() const;
};

// One group member within a unit interval: the segment plus its role label.
struct MemberSegment {
  const TrajectorySegment* segment = nullptr;
  int role = -1;
};

UnaryAttributes unary(const TrajectorySegment& segment, int role, const SceneModel& scene,
                      const FeatureSpace& space, const FeatureConfig& config);

// Both segments must cover the same tick grid.
PairwiseRelations pairwise(const TrajectorySegment& a, const UnaryAttributes& ua,
                           const TrajectorySegment& b, const UnaryAttributes& ub,
                           const FeatureSpace& space);

// Histogram over per-tick velocities: 6 orientation bins over [0, 2pi) crossed
// with 3 radial bands at thirds of the maximum point-to-center distance.
// Zero-velocity ticks are not counted; with no counted ticks all bins are zero.
VecX velocity_histogram(const std::vector<const TrajectorySegment*>& segments,
                        const Vec2& center);

RelationVector relation_vector(const std::vector<MemberSegment>& members,
                               const SceneModel& scene, const FeatureSpace& space,
                               const FeatureConfig& config);

// Per-dimension affine map fitted on training relation vectors.
// Zero-variance dimensions standardize with stdev 1.
struct FeatureStandardizer {
  VecX mean;
  VecX stdev;

  void fit(const MatX& rows);
  VecX apply(const VecX& v) const { return (v - mean).cwiseQuotient(stdev); }
  void apply_rows_in_place(MatX& rows) const;
};

}  // namespace stparse
