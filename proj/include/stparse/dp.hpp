#pragma once
// Exact segmentation dynamic program. Nodes (k, a) mean "a span of label a
// ends at tick k"; an edge from (k', a') assigns label a to ticks (k', k]
// and is present when the transition a' -> a is allowed. The first span is
// unconstrained. Forward beliefs take the max over predecessors; the best
// sink belief is the objective and back pointers recover the span sequence.
#include <algorithm>
#include <vector>

#include "stparse/types.hpp"

namespace stparse {

struct DpSpan {
  int label = -1;
  int from = 0;  // span covers ticks (from, to]
  int to = 0;
};

struct DpSolution {
  std::vector<DpSpan> spans;
  Scalar objective = -kInf;
  bool feasible = false;
  // (ticks + 1) x labels; row 0 is the source, row k the best score of any
  // parse of ticks (0, k] whose final span carries the column's label.
  MatX beliefs;
};

// m(a, from, to): score of assigning label a to ticks (from, to].
// allowed(prev, a): whether a span of label a may follow one of label prev.
// Ties break toward the earliest predecessor tick, then the lowest label.
template <class ScoreFn, class AllowedFn>
DpSolution dp_solve(int ticks, int labels, ScoreFn&& m, AllowedFn&& allowed) {
  DpSolution out;
  if (ticks <= 0 || labels <= 0) return out;

  MatX belief = MatX::Constant(ticks + 1, labels, -kInf);
  belief.row(0).setZero();
  Eigen::MatrixXi back_tick = Eigen::MatrixXi::Constant(ticks + 1, labels, -1);
  Eigen::MatrixXi back_label = Eigen::MatrixXi::Constant(ticks + 1, labels, -1);

  for (int k = 1; k <= ticks; ++k) {
    for (int a = 0; a < labels; ++a) {
      Scalar best = -kInf;
      int best_tick = -1;
      int best_label = -1;
      for (int kp = 0; kp < k; ++kp) {
        if (kp == 0) {
          Scalar candidate = m(a, 0, k);
          if (candidate > best) {
            best = candidate;
            best_tick = 0;
            best_label = -1;
          }
          continue;
        }
        Scalar span = m(a, kp, k);
        if (span == -kInf) continue;
        for (int ap = 0; ap < labels; ++ap) {
          if (belief(kp, ap) == -kInf || !allowed(ap, a)) continue;
          Scalar candidate = belief(kp, ap) + span;
          if (candidate > best) {
            best = candidate;
            best_tick = kp;
            best_label = ap;
          }
        }
      }
      belief(k, a) = best;
      back_tick(k, a) = best_tick;
      back_label(k, a) = best_label;
    }
  }

  int sink = -1;
  for (int a = 0; a < labels; ++a) {
    if (belief(ticks, a) > out.objective) {
      out.objective = belief(ticks, a);
      sink = a;
    }
  }
  out.beliefs = std::move(belief);
  if (sink < 0) return out;

  out.feasible = true;
  int k = ticks;
  int a = sink;
  while (k > 0) {
    int from = back_tick(k, a);
    out.spans.push_back({a, from, k});
    int prev = back_label(k, a);
    k = from;
    a = prev;
  }
  std::reverse(out.spans.begin(), out.spans.end());
  return out;
}

}  // namespace stparse
