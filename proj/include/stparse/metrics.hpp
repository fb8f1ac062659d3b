#pragma once
// Evaluation against ground truth: duration-weighted grouping precision,
// recall and F score, event accuracy, role accuracy, and confusion matrices.
#include <vector>

#include "stparse/core.hpp"

namespace stparse {

struct EvalOptions {
  // When set, grouping precision/recall sum the per-group fractions instead
  // of averaging them, so values can exceed 1 when groups are fragmented.
  bool raw = false;
};

struct EvalReport {
  Scalar grouping_precision = 0;
  Scalar grouping_recall = 0;
  Scalar grouping_f = 0;
  Scalar event_accuracy = 0;
  Scalar role_accuracy = 0;
  // Duration mass with rows = truth label, columns = predicted label. Each
  // row sums to the truth duration mass carrying that label.
  MatX per_event_confusion;
  // One role-by-role matrix per truth event (same row/column convention).
  std::vector<MatX> per_role_confusion;
};

// The group of `partition` with the largest duration-weighted member overlap
// with `members`; ties break toward the lowest group index. `durations` is
// indexed by trajectory.
int best_match(const std::vector<int>& members, const std::vector<std::vector<int>>& partition,
               const std::vector<Scalar>& durations);

// Scores a predicted solution against the dataset's truth annotations. The
// prediction must cover exactly the trajectories the truth groups cover.
EvalReport evaluate(const Dataset& truth, const Solution& predicted,
                    const EvalOptions& options = {});

// The truth annotations repackaged as a solution (no segmentations), for
// identity checks and baselines.
Solution truth_solution(const Dataset& dataset);

}  // namespace stparse
