#include "stparse/inference.hpp"

#include <algorithm>
#include <cmath>

#include "stparse/learning.hpp"

namespace stparse {
namespace {

constexpr Scalar kTimeEps = 1e-9;

struct PairStats {
  bool valid = false;
  Scalar mean_distance = 0;
  Scalar direction_difference = 0;
};

PairStats trajectory_pair_stats(const Trajectory& a, const Trajectory& b, Scalar tick) {
  PairStats out;
  Interval common = overlap(a.span(), b.span());
  if (common.length() < tick - kTimeEps) return out;

  Scalar sum = 0;
  int count = 0;
  for (Scalar t = common.t0; t <= common.t1 + kTimeEps; t += tick) {
    sum += (a.position_at(t) - b.position_at(t)).norm();
    ++count;
  }
  out.mean_distance = sum / count;

  Vec2 da = a.position_at(common.t1) - a.position_at(common.t0);
  Vec2 db = b.position_at(common.t1) - b.position_at(common.t0);
  out.direction_difference =
      (da.norm() < 1e-12 || db.norm() < 1e-12)
          ? 0
          : std::acos(std::clamp(da.dot(db) / (da.norm() * db.norm()), -1.0, 1.0));
  out.valid = true;
  return out;
}

Scalar log_pairs(int n) { return std::log(static_cast<Scalar>(n) * (n - 1) / 2); }

int splittable_count(const std::vector<std::vector<int>>& groups) {
  int count = 0;
  for (const auto& g : groups) count += g.size() >= 2 ? 1 : 0;
  return count;
}

}  // namespace

std::vector<std::vector<int>> initial_groups(const Dataset& dataset, const FeatureConfig& config) {
  int n = static_cast<int>(dataset.trajectories.size());
  if (n == 0) fail("empty-group", "dataset has no trajectories");

  std::vector<PairStats> stats(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      stats[static_cast<size_t>(i) * n + j] = trajectory_pair_stats(
          dataset.trajectories[static_cast<size_t>(i)],
          dataset.trajectories[static_cast<size_t>(j)], config.tick);
    }
  }
  auto pair_stats = [&](int i, int j) -> const PairStats& {
    return stats[static_cast<size_t>(std::min(i, j)) * n + std::max(i, j)];
  };

  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < n; ++i) clusters.push_back({i});

  while (clusters.size() > 1) {
    int best_a = -1, best_b = -1;
    Scalar best_distance = kInf;
    for (size_t a = 0; a < clusters.size(); ++a) {
      for (size_t b = a + 1; b < clusters.size(); ++b) {
        Scalar distance_sum = 0, direction_sum = 0;
        int count = 0;
        for (int i : clusters[a]) {
          for (int j : clusters[b]) {
            const PairStats& s = pair_stats(i, j);
            if (!s.valid) continue;
            distance_sum += s.mean_distance;
            direction_sum += s.direction_difference;
            ++count;
          }
        }
        if (count == 0) continue;
        Scalar mean_distance = distance_sum / count;
        Scalar mean_direction = direction_sum / count;
        if (mean_distance < config.closeness_threshold && mean_direction < kPi / 2 &&
            mean_distance < best_distance) {
          best_distance = mean_distance;
          best_a = static_cast<int>(a);
          best_b = static_cast<int>(b);
        }
      }
    }
    if (best_a < 0) break;
    auto& target = clusters[static_cast<size_t>(best_a)];
    auto& source = clusters[static_cast<size_t>(best_b)];
    target.insert(target.end(), source.begin(), source.end());
    std::sort(target.begin(), target.end());
    clusters.erase(clusters.begin() + best_b);
  }
  return clusters;
}

GroupScorer::GroupScorer(const GroupContext& context, const Model& model)
    : context_(&context), model_(&model) {
  MatX weights = model.weight_matrix();
  folded_weights_ = weights.array().colwise() / model.standardizer.stdev.array();
  offset_ = folded_weights_.transpose() * model.standardizer.mean;

  base_.setZero(context.ticks(), weights.cols());
  for (int k = 0; k < context.ticks(); ++k) {
    if (!context.unit_empty(k)) base_.row(k) = context.unit_base(k).transpose() * folded_weights_;
  }
}

MatX GroupScorer::scores(const std::vector<int>& roles) const {
  const GroupContext& ctx = *context_;
  const FeatureSpace& space = ctx.space();
  if (roles.size() != ctx.members().size())
    fail("invalid-argument", "role assignment size != member count");

  MatX out = base_;
  Eigen::RowVectorXd add(out.cols());
  for (int k = 0; k < ctx.ticks(); ++k) {
    const std::vector<int>& present = ctx.unit_present(k);
    if (present.empty()) continue;  // empty units score zero for every template
    add.setZero();
    for (size_t i = 0; i < present.size(); ++i) {
      int ri = roles[static_cast<size_t>(present[i])];
      add += folded_weights_.row(ri);
      for (size_t j = i + 1; j < present.size(); ++j)
        add += folded_weights_.row(space.off_role_compat() + ri * space.roles +
                                   roles[static_cast<size_t>(present[j])]);
    }
    out.row(k) += add - offset_.transpose();
  }
  return out;
}

DpOutcome dp_segment(const GroupScorer& scorer, const std::vector<int>& roles, int event) {
  const Model& model = scorer.model();
  const GroupContext& ctx = scorer.context();
  std::vector<int> admissible = model.grammar.admissible_templates(event);
  if (admissible.empty()) fail("infeasible-event", "event admits no template");

  MatX scores = scorer.scores(roles);
  int ticks = ctx.ticks();
  int labels = static_cast<int>(admissible.size());

  // Prefix sums of per-unit scores for O(1) interval sums.
  MatX prefix = MatX::Zero(ticks + 1, labels);
  for (int k = 0; k < ticks; ++k) {
    for (int a = 0; a < labels; ++a)
      prefix(k + 1, a) = prefix(k, a) + scores(k, admissible[static_cast<size_t>(a)]);
  }

  Scalar unit = model.features.unit;
  auto m = [&](int a, int from, int to) {
    const TemplateNode& node = model.grammar.templates[static_cast<size_t>(admissible[static_cast<size_t>(a)])];
    return prefix(to, a) - prefix(from, a) +
           log_normal_log_pdf((to - from) * unit, node.duration_mu, node.duration_sigma) +
           model.grammar.template_switch(event, node.id);
  };
  auto allowed = [&](int prev, int a) {
    return model.grammar.transition_allowed(event, admissible[static_cast<size_t>(prev)],
                                            admissible[static_cast<size_t>(a)]);
  };
  DpSolution dp = dp_solve(ticks, labels, m, allowed);
  if (!dp.feasible) fail("infeasible-event", "no feasible segmentation path");

  DpOutcome out;
  out.objective = dp.objective;
  for (const DpSpan& span : dp.spans) {
    Interval interval{ctx.extent().t0 + span.from * unit, ctx.extent().t0 + span.to * unit};
    out.segmentation.push_back({admissible[static_cast<size_t>(span.label)], interval});
  }
  return out;
}

DpOutcome dp_segment(const GroupContext& context, const std::vector<int>& roles, int event,
                     const Model& model) {
  return dp_segment(GroupScorer(context, model), roles, event);
}

std::vector<int> best_role_greedy(const GroupScorer& scorer, int event) {
  const Model& model = scorer.model();
  const std::vector<int>& candidates = model.grammar.roles_of[static_cast<size_t>(event)];
  if (candidates.empty()) fail("infeasible-event", "event admits no role");
  std::vector<int> admissible = model.grammar.admissible_templates(event);

  size_t members = scorer.context().members().size();
  std::vector<int> roles(members, candidates[0]);
  if (candidates.size() == 1) return roles;

  // Candidate roles in ascending index order so ties break toward the lowest.
  std::vector<int> ordered = candidates;
  std::sort(ordered.begin(), ordered.end());

  std::vector<int> out = roles;
  for (size_t m = 0; m < members; ++m) {
    Scalar best = -kInf;
    int best_role = ordered[0];
    for (int candidate : ordered) {
      std::vector<int> trial = roles;
      trial[m] = candidate;
      MatX scores = scorer.scores(trial);
      Scalar top = -kInf;
      for (int a : admissible) top = std::max(top, scores.col(a).sum());
      if (top > best) {
        best = top;
        best_role = candidate;
      }
    }
    out[m] = best_role;
  }
  return out;
}

std::vector<int> best_role_greedy(const GroupContext& context, int event, const Model& model) {
  return best_role_greedy(GroupScorer(context, model), event);
}

ParseGraph best_parse(const GroupScorer& scorer) {
  const Model& model = scorer.model();
  ParseGraph best;
  best.energy = kInf;
  for (int e = 0; e < model.grammar.event_count(); ++e) {
    std::vector<int> roles = best_role_greedy(scorer, e);
    DpOutcome dp = dp_segment(scorer, roles, e);
    Scalar energy = -model.grammar.event_switch[e] - dp.objective;
    if (energy < best.energy) {
      best.event = e;
      best.extent = scorer.context().extent();
      best.segmentation = std::move(dp.segmentation);
      best.roles = std::move(roles);
      best.energy = energy;
    }
  }
  return best;
}

bool mh_accept(Scalar log_ratio, Rng& rng) {
  if (log_ratio >= 0) return true;
  Scalar u = 1.0 - rng.uniform();  // in (0, 1]
  return std::log(u) < log_ratio;
}

Solution grouping_step(const Solution& current, const Dataset& dataset, const Model& model,
                       const InferenceConfig& config, Rng& rng) {
  int n = static_cast<int>(current.groups.size());
  int splittable = splittable_count(current.groups);

  bool merge = rng.uniform() < config.merge_prob;
  if (merge && n < 2) merge = false;          // merge needs two groups; fall back to a split
  if (!merge && splittable == 0) merge = true;  // splits need a non-singleton group
  if (merge && n < 2) return current;           // single singleton group: nothing to propose

  if (merge) {
    int pick = rng.uniform_int(n * (n - 1) / 2);
    int i = 0, j = 1;
    for (int count = 0;; ++i) {
      int row = n - 1 - i;
      if (count + row > pick) {
        j = i + 1 + (pick - count);
        break;
      }
      count += row;
    }

    std::vector<int> merged = current.groups[static_cast<size_t>(i)];
    merged.insert(merged.end(), current.groups[static_cast<size_t>(j)].begin(),
                  current.groups[static_cast<size_t>(j)].end());
    std::sort(merged.begin(), merged.end());

    GroupContext context(dataset, merged, model.features);
    ParseGraph parse = best_parse(GroupScorer(context, model));

    Solution proposed = current;
    proposed.groups.erase(proposed.groups.begin() + j);
    proposed.groups.erase(proposed.groups.begin() + i);
    proposed.parses.erase(proposed.parses.begin() + j);
    proposed.parses.erase(proposed.parses.begin() + i);
    proposed.groups.push_back(std::move(merged));
    Scalar removed = current.parses[static_cast<size_t>(i)].energy +
                     current.parses[static_cast<size_t>(j)].energy;
    proposed.energy = current.energy - removed + parse.energy;
    proposed.parses.push_back(std::move(parse));

    Scalar log_q_forward = std::log(config.merge_prob) - log_pairs(n);
    Scalar log_q_reverse =
        std::log(config.split_prob) - std::log(static_cast<Scalar>(splittable_count(proposed.groups)));
    Scalar log_ratio = log_q_forward - log_q_reverse + (current.energy - proposed.energy);
    return mh_accept(log_ratio, rng) ? proposed : current;
  }

  // Split: choose a non-singleton group, bisect member mean positions.
  int pick = rng.uniform_int(splittable);
  int target = -1;
  for (size_t g = 0; g < current.groups.size(); ++g) {
    if (current.groups[g].size() < 2) continue;
    if (pick-- == 0) {
      target = static_cast<int>(g);
      break;
    }
  }
  const std::vector<int>& group = current.groups[static_cast<size_t>(target)];

  MatX positions(group.size(), 2);
  for (size_t m = 0; m < group.size(); ++m) {
    const Trajectory& traj = dataset.trajectories[static_cast<size_t>(group[m])];
    Vec2 mean = Vec2::Zero();
    for (const TrackSample& s : traj.samples) mean += s.pos;
    positions.row(static_cast<Eigen::Index>(m)) = (mean / traj.samples.size()).transpose();
  }
  KMeansResult split = kmeans(positions, 2, 4, 50, rng.next_u64());
  std::vector<int> part_a, part_b;
  for (size_t m = 0; m < group.size(); ++m)
    (split.assignment[m] == split.assignment[0] ? part_a : part_b).push_back(group[m]);
  if (part_b.empty()) {  // degenerate geometry: force a deterministic bisection
    part_b.assign(part_a.begin() + part_a.size() / 2, part_a.end());
    part_a.resize(part_a.size() / 2);
  }

  GroupContext context_a(dataset, part_a, model.features);
  GroupContext context_b(dataset, part_b, model.features);
  ParseGraph parse_a = best_parse(GroupScorer(context_a, model));
  ParseGraph parse_b = best_parse(GroupScorer(context_b, model));

  Solution proposed = current;
  proposed.groups.erase(proposed.groups.begin() + target);
  proposed.parses.erase(proposed.parses.begin() + target);
  proposed.groups.push_back(std::move(part_a));
  proposed.groups.push_back(std::move(part_b));
  proposed.energy = current.energy - current.parses[static_cast<size_t>(target)].energy +
                    parse_a.energy + parse_b.energy;
  proposed.parses.push_back(std::move(parse_a));
  proposed.parses.push_back(std::move(parse_b));

  Scalar log_q_forward = std::log(config.split_prob) - std::log(static_cast<Scalar>(splittable));
  Scalar log_q_reverse = std::log(config.merge_prob) - log_pairs(n + 1);
  Scalar log_ratio = log_q_forward - log_q_reverse + (current.energy - proposed.energy);
  return mh_accept(log_ratio, rng) ? proposed : current;
}

ParseGraph role_step(const ParseGraph& parse, const GroupScorer& scorer, Rng& rng) {
  const Model& model = scorer.model();
  const std::vector<int>& candidates = model.grammar.roles_of[static_cast<size_t>(parse.event)];
  int member = rng.uniform_int(static_cast<int>(parse.roles.size()));
  int role = candidates[static_cast<size_t>(rng.uniform_int(static_cast<int>(candidates.size())))];
  if (role == parse.roles[static_cast<size_t>(member)]) return parse;  // identity, accepted

  std::vector<int> roles = parse.roles;
  roles[static_cast<size_t>(member)] = role;
  DpOutcome dp = dp_segment(scorer, roles, parse.event);
  Scalar energy = -model.grammar.event_switch[parse.event] - dp.objective;
  if (!mh_accept(parse.energy - energy, rng)) return parse;

  ParseGraph out = parse;
  out.roles = std::move(roles);
  out.segmentation = std::move(dp.segmentation);
  out.energy = energy;
  return out;
}

InferenceResult infer(const Dataset& dataset, const Model& model, const InferenceConfig& config) {
  std::vector<std::string> violations = model.validate();
  if (!violations.empty()) fail("invalid-model", violations.front());
  const LabelVocabulary& dv = dataset.vocabulary;
  const LabelVocabulary& mv = model.grammar.vocabulary;
  if (dv.events != mv.events || dv.roles != mv.roles || dv.portables != mv.portables ||
      dv.scene_classes != mv.scene_classes)
    fail("invalid-argument", "dataset vocabulary differs from the model vocabulary");
  if (dataset.trajectories.empty()) fail("empty-group", "dataset has no trajectories");
  for (const Trajectory& traj : dataset.trajectories) {
    std::string defect = traj.check();
    if (!defect.empty()) fail("invalid-trajectory", traj.id + ": " + defect);
  }

  Rng rng(config.seed);
  Solution current;
  current.groups = initial_groups(dataset, model.features);
  current.energy = 0;
  for (const auto& group : current.groups) {
    GroupContext context(dataset, group, model.features);
    current.parses.push_back(best_parse(GroupScorer(context, model)));
    current.energy += current.parses.back().energy;
  }

  Solution best = current;
  InferenceResult result;
  result.energy_trace.push_back(best.energy);

  int stall = 0;
  for (int outer = 0; outer < config.outer_iters; ++outer) {
    for (int sweep = 0; sweep < config.grouping_sweeps; ++sweep) {
      current = grouping_step(current, dataset, model, config, rng);
      if (current.energy < best.energy) best = current;
    }

    for (size_t g = 0; g < current.groups.size(); ++g) {
      GroupContext context(dataset, current.groups[g], model.features);
      GroupScorer scorer(context, model);
      for (int sweep = 0; sweep < config.role_sweeps; ++sweep)
        current.parses[g] = role_step(current.parses[g], scorer, rng);
    }

    // Refresh: re-enumerate events per group, keeping the refined roles as
    // the candidate for the currently selected event.
    for (size_t g = 0; g < current.groups.size(); ++g) {
      GroupContext context(dataset, current.groups[g], model.features);
      GroupScorer scorer(context, model);
      ParseGraph refreshed;
      refreshed.energy = kInf;
      for (int e = 0; e < model.grammar.event_count(); ++e) {
        std::vector<int> roles = e == current.parses[g].event ? current.parses[g].roles
                                                              : best_role_greedy(scorer, e);
        DpOutcome dp = dp_segment(scorer, roles, e);
        Scalar energy = -model.grammar.event_switch[e] - dp.objective;
        if (energy < refreshed.energy) {
          refreshed.event = e;
          refreshed.extent = context.extent();
          refreshed.segmentation = std::move(dp.segmentation);
          refreshed.roles = std::move(roles);
          refreshed.energy = energy;
        }
      }
      current.parses[g] = std::move(refreshed);
    }
    current.energy = 0;
    for (const ParseGraph& parse : current.parses) current.energy += parse.energy;
    if (current.energy < best.energy) best = current;

    Scalar previous = result.energy_trace.back();
    result.energy_trace.push_back(best.energy);
    if (previous - best.energy <= 1e-12 * std::max(1.0, std::abs(best.energy)))
      ++stall;
    else
      stall = 0;
    if (stall >= config.convergence_window) break;
  }

  result.breakdown = solution_energy(best, dataset, model);
  best.energy = result.breakdown.total;
  result.solution = std::move(best);
  return result;
}

}  // namespace stparse
