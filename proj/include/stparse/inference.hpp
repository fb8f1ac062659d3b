#pragma once
// Joint inference: initial agglomerative grouping, Markov chain Monte Carlo
// over groupings (merge/split) and role assignments, and exact dynamic
// programming over sub-event segmentations, wrapped in an outer loop that
// tracks the best solution found.
#include <cstdint>
#include <vector>

#include "stparse/core.hpp"
#include "stparse/dp.hpp"
#include "stparse/likelihood.hpp"
#include "stparse/model.hpp"
#include "stparse/rng.hpp"

namespace stparse {

struct InferenceConfig {
  Scalar merge_prob = 0.7;
  Scalar split_prob = 0.3;
  int grouping_sweeps = 200;
  int role_sweeps = 500;
  int outer_iters = 10;
  int convergence_window = 3;  // outer iterations without improvement before stopping
  std::uint64_t seed = 0;
};

// Agglomerative seed grouping: clusters merge while the mean time-overlapping
// member distance stays below the closeness threshold and the mean velocity
// direction difference stays below pi/2.
std::vector<std::vector<int>> initial_groups(const Dataset& dataset, const FeatureConfig& config);

// Precomputed template scores for one group, supporting cheap rescoring when
// only the role assignment changes. Scores match
//   weights . standardize(psi)
// since the affine standardizer folds into the weights.
class GroupScorer {
 public:
  GroupScorer(const GroupContext& context, const Model& model);

  const GroupContext& context() const { return *context_; }
  const Model& model() const { return *model_; }
  // ticks x templates matrix of unit scores under the role assignment.
  MatX scores(const std::vector<int>& roles) const;

 private:
  const GroupContext* context_;
  const Model* model_;
  MatX folded_weights_;  // dim x templates, weights ./ stdev
  VecX offset_;          // templates, weights . (mean ./ stdev)
  MatX base_;            // ticks x templates, scores of the role-independent blocks
};

struct DpOutcome {
  std::vector<SegmentAssignment> segmentation;
  Scalar objective = -kInf;  // sum of interval log posteriors and template switch terms
};

// Optimal sub-event segmentation of the group extent for a fixed event and
// role assignment. Throws infeasible-event when the event admits no parse.
DpOutcome dp_segment(const GroupScorer& scorer, const std::vector<int>& roles, int event);
DpOutcome dp_segment(const GroupContext& context, const std::vector<int>& roles, int event,
                     const Model& model);

// Assigns each member the admissible role that maximizes the summed unit
// scores under the event's best single template, holding all other members
// at the event's most frequent training role.
std::vector<int> best_role_greedy(const GroupScorer& scorer, int event);
std::vector<int> best_role_greedy(const GroupContext& context, int event, const Model& model);

// Best parse over all events (greedy roles + optimal segmentation per event);
// the returned parse carries its group energy.
ParseGraph best_parse(const GroupScorer& scorer);

// Metropolis-Hastings acceptance for a proposal with the given log ratio
// log(Q(W->W') p(W')) - log(Q(W'->W) p(W)).
bool mh_accept(Scalar log_ratio, Rng& rng);

// One merge/split proposal over the current grouping. Parses in the incoming
// solution must carry their group energies.
Solution grouping_step(const Solution& current, const Dataset& dataset, const Model& model,
                       const InferenceConfig& config, Rng& rng);

// One single-member role re-assignment proposal for a parsed group.
ParseGraph role_step(const ParseGraph& parse, const GroupScorer& scorer, Rng& rng);

struct InferenceResult {
  Solution solution;
  EnergyBreakdown breakdown;
  std::vector<Scalar> energy_trace;  // best-so-far energy, non-increasing
};

InferenceResult infer(const Dataset& dataset, const Model& model, const InferenceConfig& config);

}  // namespace stparse
