#include "stparse/metrics.hpp"

#include <algorithm>
#include <numeric>

namespace stparse {
namespace {

std::vector<int> owner_of(const std::vector<std::vector<int>>& partition, int n,
                          const char* what) {
  std::vector<int> owner(static_cast<size_t>(n), -1);
  for (size_t g = 0; g < partition.size(); ++g) {
    for (int j : partition[g]) {
      if (j < 0 || j >= n) fail("alignment", std::string(what) + " references unknown trajectory");
      if (owner[static_cast<size_t>(j)] >= 0)
        fail("alignment", std::string(what) + " assigns a trajectory twice");
      owner[static_cast<size_t>(j)] = static_cast<int>(g);
    }
  }
  return owner;
}

// Mean (or raw sum) over groups of the duration-weighted fraction of each
// group's mass that lands in its best-matched counterpart.
Scalar grouping_fraction(const std::vector<std::vector<int>>& groups,
                         const std::vector<std::vector<int>>& counterpart,
                         const std::vector<int>& counterpart_owner,
                         const std::vector<Scalar>& durations, bool raw) {
  Scalar total = 0;
  for (const std::vector<int>& members : groups) {
    int match = best_match(members, counterpart, durations);
    Scalar mass = 0, matched = 0;
    for (int j : members) {
      mass += durations[static_cast<size_t>(j)];
      if (counterpart_owner[static_cast<size_t>(j)] == match)
        matched += durations[static_cast<size_t>(j)];
    }
    total += mass > 0 ? matched / mass : 0;
  }
  return raw ? total : total / static_cast<Scalar>(groups.size());
}

}  // namespace

int best_match(const std::vector<int>& members, const std::vector<std::vector<int>>& partition,
               const std::vector<Scalar>& durations) {
  if (members.empty() || partition.empty())
    fail("undefined-match", "best match of an empty group or against an empty partition");

  int best = -1;
  Scalar best_overlap = -1;
  for (size_t g = 0; g < partition.size(); ++g) {
    Scalar overlap = 0;
    for (int j : partition[g]) {
      if (std::find(members.begin(), members.end(), j) == members.end()) continue;
      overlap += durations[static_cast<size_t>(j)];
    }
    if (overlap > best_overlap) {
      best_overlap = overlap;
      best = static_cast<int>(g);
    }
  }
  return best;
}

EvalReport evaluate(const Dataset& truth, const Solution& predicted, const EvalOptions& options) {
  if (!truth.has_truth()) fail("alignment", "dataset carries no truth groups");
  int n = static_cast<int>(truth.trajectories.size());

  std::vector<std::vector<int>> truth_groups;
  for (const TruthGroup& g : truth.truth_groups) truth_groups.push_back(g.members);
  std::vector<int> truth_owner = owner_of(truth_groups, n, "truth");
  std::vector<int> predicted_owner = owner_of(predicted.groups, n, "prediction");
  for (int j = 0; j < n; ++j) {
    if ((truth_owner[static_cast<size_t>(j)] >= 0) !=
        (predicted_owner[static_cast<size_t>(j)] >= 0))
      fail("alignment", "prediction covers a different trajectory set than the truth: " +
                            truth.trajectories[static_cast<size_t>(j)].id);
  }
  if (predicted.groups.size() != predicted.parses.size())
    fail("alignment", "solution parse count != group count");

  std::vector<Scalar> durations;
  for (const Trajectory& traj : truth.trajectories) durations.push_back(traj.duration());

  EvalReport report;
  report.grouping_precision =
      grouping_fraction(truth_groups, predicted.groups, predicted_owner, durations, options.raw);
  report.grouping_recall =
      grouping_fraction(predicted.groups, truth_groups, truth_owner, durations, options.raw);
  report.grouping_f =
      report.grouping_precision > 0 && report.grouping_recall > 0
          ? 2.0 / (1.0 / report.grouping_precision + 1.0 / report.grouping_recall)
          : 0;

  int events = static_cast<int>(truth.vocabulary.events.size());
  int roles = truth.vocabulary.role_count();
  report.per_event_confusion = MatX::Zero(events, events);
  report.per_role_confusion.assign(static_cast<size_t>(events), MatX::Zero(roles, roles));

  Scalar mass = 0, event_hit = 0, role_hit = 0;
  for (int j = 0; j < n; ++j) {
    int tg = truth_owner[static_cast<size_t>(j)];
    if (tg < 0) continue;  // outside every truth group: carries no mass
    const Trajectory& traj = truth.trajectories[static_cast<size_t>(j)];
    if (!traj.truth_role) fail("alignment", "trajectory lacks a role annotation: " + traj.id);

    int truth_event = truth.truth_groups[static_cast<size_t>(tg)].event;
    int truth_role = *traj.truth_role;
    int pg = predicted_owner[static_cast<size_t>(j)];
    const ParseGraph& parse = predicted.parses[static_cast<size_t>(pg)];
    const std::vector<int>& group = predicted.groups[static_cast<size_t>(pg)];
    size_t slot = static_cast<size_t>(
        std::find(group.begin(), group.end(), j) - group.begin());
    if (parse.roles.size() != group.size())
      fail("alignment", "parse role count != group member count");
    int predicted_role = parse.roles[slot];

    Scalar d = durations[static_cast<size_t>(j)];
    mass += d;
    if (parse.event == truth_event) event_hit += d;
    if (predicted_role == truth_role) role_hit += d;
    report.per_event_confusion(truth_event, parse.event) += d;
    report.per_role_confusion[static_cast<size_t>(truth_event)](truth_role, predicted_role) += d;
  }
  report.event_accuracy = mass > 0 ? event_hit / mass : 0;
  report.role_accuracy = mass > 0 ? role_hit / mass : 0;
  return report;
}

Solution truth_solution(const Dataset& dataset) {
  if (!dataset.has_truth()) fail("alignment", "dataset carries no truth groups");
  Solution solution;
  for (const TruthGroup& g : dataset.truth_groups) {
    ParseGraph parse;
    parse.event = g.event;
    parse.extent = g.interval;
    std::vector<int> members = g.members;
    std::sort(members.begin(), members.end());
    for (int j : members) {
      const Trajectory& traj = dataset.trajectories[static_cast<size_t>(j)];
      if (!traj.truth_role) fail("alignment", "trajectory lacks a role annotation: " + traj.id);
      parse.roles.push_back(*traj.truth_role);
    }
    solution.groups.push_back(std::move(members));
    solution.parses.push_back(std::move(parse));
  }
  return solution;
}

}  // namespace stparse
