#include "stparse/learning.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "stparse/likelihood.hpp"
#include "stparse/rng.hpp"

namespace stparse {
namespace {

Scalar log_sigmoid(Scalar z) {
  return z < 0 ? z - std::log1p(std::exp(z)) : -std::log1p(std::exp(-z));
}

Scalar sigmoid(Scalar z) { return z < 0 ? std::exp(z) / (1 + std::exp(z)) : 1 / (1 + std::exp(-z)); }

struct LloydRun {
  MatX centers;
  std::vector<int> assignment;
  Scalar sse = kInf;
};

LloydRun lloyd(const MatX& rows, int k, int max_iter, Rng rng) {
  int n = static_cast<int>(rows.rows());
  LloydRun run;
  run.centers.resize(k, rows.cols());

  // k-means++ seeding.
  VecX d2 = VecX::Constant(n, kInf);
  int first = rng.uniform_int(n);
  run.centers.row(0) = rows.row(first);
  for (int c = 1; c < k; ++c) {
    for (int i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], (rows.row(i) - run.centers.row(c - 1)).squaredNorm());
    Scalar total = d2.sum();
    int pick = 0;
    if (total > 0) {
      Scalar u = rng.uniform() * total;
      Scalar cum = 0;
      for (int i = 0; i < n; ++i) {
        cum += d2[i];
        if (u < cum) {
          pick = i;
          break;
        }
        pick = i;
      }
    }
    run.centers.row(c) = rows.row(pick);
  }

  run.assignment.assign(static_cast<size_t>(n), -1);
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      Scalar best_d = (rows.row(i) - run.centers.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        Scalar d = (rows.row(i) - run.centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (run.assignment[static_cast<size_t>(i)] != best) {
        run.assignment[static_cast<size_t>(i)] = best;
        changed = true;
      }
    }

    // Reseed empty clusters with the point farthest from its center. When
    // every point already coincides with its center (fewer distinct values
    // than clusters), reseeding would only split identical points across two
    // centers, so the cluster is left empty instead.
    std::vector<int> counts(static_cast<size_t>(k), 0);
    for (int a : run.assignment) ++counts[static_cast<size_t>(a)];
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<size_t>(c)] > 0) continue;
      int worst = -1;
      Scalar worst_d = 1e-9;
      for (int i = 0; i < n; ++i) {
        int a = run.assignment[static_cast<size_t>(i)];
        if (counts[static_cast<size_t>(a)] <= 1) continue;
        Scalar d = (rows.row(i) - run.centers.row(a)).squaredNorm();
        if (d > worst_d) {
          worst_d = d;
          worst = i;
        }
      }
      if (worst < 0) continue;
      --counts[static_cast<size_t>(run.assignment[static_cast<size_t>(worst)])];
      run.assignment[static_cast<size_t>(worst)] = c;
      counts[static_cast<size_t>(c)] = 1;
      run.centers.row(c) = rows.row(worst);
      changed = true;
    }

    if (!changed && iter > 0) break;
    MatX sums = MatX::Zero(k, rows.cols());
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < n; ++i) {
      sums.row(run.assignment[static_cast<size_t>(i)]) += rows.row(i);
      ++counts[static_cast<size_t>(run.assignment[static_cast<size_t>(i)])];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<size_t>(c)] > 0)
        run.centers.row(c) = sums.row(c) / counts[static_cast<size_t>(c)];
    }
  }

  run.sse = 0;
  for (int i = 0; i < n; ++i)
    run.sse += (rows.row(i) - run.centers.row(run.assignment[static_cast<size_t>(i)])).squaredNorm();
  return run;
}

}  // namespace

KMeansResult kmeans(const MatX& rows, int k, int restarts, int max_iter, std::uint64_t seed) {
  if (k <= 0) fail("invalid-argument", "k must be positive");
  if (rows.rows() < k)
    fail("not-enough-data", "k=" + std::to_string(k) + " exceeds sample count " +
                                std::to_string(rows.rows()));
  if (restarts <= 0 || max_iter <= 0) fail("invalid-argument", "restarts and maxIter must be positive");

  Rng root(seed);
  LloydRun best;
  for (int r = 0; r < restarts; ++r) {
    LloydRun run = lloyd(rows, k, max_iter, root.fork());
    if (run.sse < best.sse) best = std::move(run);
  }

  // When the data has fewer distinct values than requested clusters, seeding
  // can leave several centers on the same value (identical up to float noise),
  // arbitrarily partitioning equal points. Merge coincident centers — the same
  // tolerance under which reseeding considers a point to sit on its center —
  // so every surviving cluster is distinct; emptied clusters keep their row
  // but no members.
  std::vector<int> merged_into(static_cast<size_t>(k));
  for (int c = 0; c < k; ++c) {
    merged_into[static_cast<size_t>(c)] = c;
    for (int b = 0; b < c; ++b) {
      if (merged_into[static_cast<size_t>(b)] != b) continue;
      if ((best.centers.row(b) - best.centers.row(c)).squaredNorm() <= 1e-9) {
        merged_into[static_cast<size_t>(c)] = b;
        break;
      }
    }
  }
  for (int& a : best.assignment) a = merged_into[static_cast<size_t>(a)];
  MatX sums = MatX::Zero(k, rows.cols());
  std::vector<int> counts(static_cast<size_t>(k), 0);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    sums.row(best.assignment[static_cast<size_t>(i)]) += rows.row(i);
    ++counts[static_cast<size_t>(best.assignment[static_cast<size_t>(i)])];
  }
  best.sse = 0;
  for (int c = 0; c < k; ++c)
    if (counts[static_cast<size_t>(c)] > 0)
      best.centers.row(c) = sums.row(c) / counts[static_cast<size_t>(c)];
  for (Eigen::Index i = 0; i < rows.rows(); ++i)
    best.sse += (rows.row(i) - best.centers.row(best.assignment[static_cast<size_t>(i)])).squaredNorm();

  return {std::move(best.centers), std::move(best.assignment), best.sse};
}

LogisticFit fit_template_weights(const MatX& rows, const std::vector<char>& positive, Scalar l2,
                                 int max_iter) {
  int n = static_cast<int>(rows.rows());
  if (n == 0) fail("not-enough-data", "logistic regression needs samples");
  if (static_cast<int>(positive.size()) != n)
    fail("invalid-argument", "label count != sample count");
  int pos = 0;
  for (char y : positive) pos += y ? 1 : 0;
  if (pos == 0) fail("not-enough-data", "cluster is empty");

  VecX y(n);
  for (int i = 0; i < n; ++i) y[i] = positive[static_cast<size_t>(i)] ? 1 : 0;

  // The design matrix carries a trailing constant column: an unpenalized
  // intercept absorbs class imbalance, so weights from different clusters sit
  // at comparable norms and remain directly comparable as linear scores. Only
  // the weight block is ridge-penalized; the intercept is dropped on return.
  // (Pinning the boundary through the origin instead forces the fit to
  // separate same-activity siblings — which share all identity structure —
  // using motion columns alone, inflating every weight several-fold and
  // loading the size-invariant histogram columns hardest, which rewards
  // degenerate groupings; the translated-boundary fit keeps weights small
  // and spread across identity columns.)
  const Eigen::Index dim = rows.cols();
  MatX design(n, dim + 1);
  design.leftCols(dim) = rows;
  design.col(dim).setOnes();

  auto objective = [&](const VecX& w) {
    VecX z = design * w;
    Scalar ll = 0;
    for (int i = 0; i < n; ++i) ll += y[i] * log_sigmoid(z[i]) + (1 - y[i]) * log_sigmoid(-z[i]);
    return ll / n - 0.5 * l2 * w.head(dim).squaredNorm();
  };

  // Damped Newton ascent (iteratively reweighted least squares). The ridge
  // term keeps the weight block of the Hessian positive definite and the
  // intercept curvature is bounded below, so the Newton direction always
  // exists; backtracking guards the rare non-improving full step.
  //
  // When the feature dimension far exceeds the sample count, the same Newton
  // direction is computed through the matrix-inversion lemma: the ridge block
  // (λI + AᵀCA/n)⁻¹ acts via the n×n system (nλC⁻¹ + AAᵀ), and the
  // unpenalized intercept is folded back in by a scalar Schur complement.
  // This swaps a cubic-in-dimension factorization for a cubic-in-samples one
  // without changing the optimum.
  const bool dual = dim + 1 > 2 * static_cast<Eigen::Index>(n);
  MatX gram;
  if (dual) gram = rows * rows.transpose();

  VecX w = VecX::Zero(dim + 1);
  Scalar obj = objective(w);
  bool converged = false;
  for (int iter = 0; iter < max_iter; ++iter) {
    VecX z = design * w;
    VecX p(n);
    for (int i = 0; i < n; ++i) p[i] = sigmoid(z[i]);
    VecX grad = design.transpose() * (y - p) / n;
    grad.head(dim) -= l2 * w.head(dim);
    if (grad.lpNorm<Eigen::Infinity>() < 1e-7) {
      converged = true;
      break;
    }
    VecX curvature = (p.array() * (1 - p.array())).cwiseMax(1e-12).matrix();
    VecX direction(dim + 1);
    if (dual) {
      MatX inner = gram;
      inner.diagonal() += (static_cast<Scalar>(n) * l2) * curvature.cwiseInverse();
      Eigen::LDLT<MatX> inner_ldlt(inner);
      auto ridge_solve = [&](const VecX& v) -> VecX {
        return (v - rows.transpose() * inner_ldlt.solve(rows * v)) / l2;
      };
      VecX cross = rows.transpose() * curvature / static_cast<Scalar>(n);
      Scalar corner = curvature.sum() / static_cast<Scalar>(n);
      VecX solved_grad = ridge_solve(grad.head(dim));
      VecX solved_cross = ridge_solve(cross);
      Scalar db = (grad[dim] - cross.dot(solved_grad)) / (corner - cross.dot(solved_cross));
      direction.head(dim) = solved_grad - db * solved_cross;
      direction[dim] = db;
    } else {
      MatX hessian = design.transpose() * curvature.asDiagonal() * design / static_cast<Scalar>(n);
      hessian.diagonal().head(dim).array() += l2;
      direction = hessian.ldlt().solve(grad);
    }

    bool advanced = false;
    for (Scalar step = 1.0; step >= 1e-12; step *= 0.5) {
      VecX trial = w + step * direction;
      Scalar trial_obj = objective(trial);
      if (trial_obj > obj) {
        w = std::move(trial);
        obj = trial_obj;
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }
  return {VecX(w.head(dim)), converged};
}

DurationPrior fit_duration_prior(const std::vector<Scalar>& lengths) {
  if (lengths.empty()) fail("not-enough-data", "duration prior needs at least one run length");
  Scalar mu = 0;
  for (Scalar x : lengths) {
    if (!(x > 0)) fail("invalid-argument", "run lengths must be positive");
    mu += std::log(x);
  }
  mu /= static_cast<Scalar>(lengths.size());
  Scalar var = 0;
  for (Scalar x : lengths) {
    Scalar d = std::log(x) - mu;
    var += d * d;
  }
  var /= static_cast<Scalar>(lengths.size());
  Scalar sigma = std::sqrt(var);
  if (lengths.size() < 2 || sigma < 1e-9) sigma = 0.25;
  return {mu, sigma};
}

TemplateExtraction extract_templates(const Dataset& dataset, const TrainingConfig& config) {
  if (!dataset.has_truth()) fail("not-enough-data", "training needs truth groups");
  std::string config_defect = config.features.check();
  if (!config_defect.empty()) fail("invalid-argument", config_defect);

  std::vector<VecX> rows;
  std::vector<std::vector<int>> group_rows;
  for (const TruthGroup& group : dataset.truth_groups) {
    std::vector<int> roles;
    for (int m : group.members) {
      const Trajectory& traj = dataset.trajectories[static_cast<size_t>(m)];
      if (!traj.truth_role)
        fail("not-enough-data", "trajectory " + traj.id + " lacks a truth role");
      roles.push_back(*traj.truth_role);
    }
    GroupContext context(dataset, group.members, config.features, group.interval);
    // Member order may have changed under sorting; rebuild roles accordingly.
    roles.clear();
    for (int m : context.members())
      roles.push_back(*dataset.trajectories[static_cast<size_t>(m)].truth_role);

    MatX features = context.features(roles);
    std::vector<int> indices;
    for (int k = 0; k < context.ticks(); ++k) {
      if (context.unit_empty(k)) continue;
      indices.push_back(static_cast<int>(rows.size()));
      rows.push_back(features.row(k).transpose());
    }
    group_rows.push_back(std::move(indices));
  }
  if (rows.empty()) fail("not-enough-data", "truth groups contain no usable unit intervals");

  TemplateExtraction out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i) out.features.row(static_cast<Eigen::Index>(i)) = rows[i];
  out.standardizer.fit(out.features);
  out.standardizer.apply_rows_in_place(out.features);
  out.group_rows = std::move(group_rows);

  KMeansResult clusters = kmeans(out.features, config.k, config.kmeans_restarts,
                                 config.kmeans_max_iter, config.seed);
  out.assignment = std::move(clusters.assignment);

  // Renumber to drop clusters that ended up empty.
  std::vector<char> used(static_cast<size_t>(config.k), 0);
  for (int a : out.assignment) used[static_cast<size_t>(a)] = 1;
  std::vector<int> relabel(static_cast<size_t>(config.k), -1);
  for (int c = 0; c < config.k; ++c)
    if (used[static_cast<size_t>(c)]) relabel[static_cast<size_t>(c)] = out.clusters++;
  for (int& a : out.assignment) a = relabel[static_cast<size_t>(a)];
  return out;
}

Model train(const Dataset& dataset, const TrainingConfig& config) {
  TemplateExtraction extraction = extract_templates(dataset, config);

  Model model;
  model.features = config.features;
  model.standardizer = extraction.standardizer;
  Grammar& grammar = model.grammar;
  grammar.vocabulary = dataset.vocabulary;

  int events = static_cast<int>(dataset.vocabulary.events.size());
  int k = extraction.clusters;

  // Per-group runs of consecutive units sharing a cluster.
  std::vector<std::vector<Scalar>> run_lengths(static_cast<size_t>(k));
  MatX run_counts = MatX::Zero(events, k);
  std::vector<std::set<std::pair<int, int>>> transition_sets(static_cast<size_t>(events));
  VecX event_counts = VecX::Zero(events);

  for (size_t g = 0; g < dataset.truth_groups.size(); ++g) {
    const TruthGroup& group = dataset.truth_groups[g];
    event_counts[group.event] += 1;
    const std::vector<int>& row_ids = extraction.group_rows[g];
    int previous = -1;
    size_t i = 0;
    while (i < row_ids.size()) {
      int cluster = extraction.assignment[static_cast<size_t>(row_ids[i])];
      size_t j = i;
      while (j < row_ids.size() &&
             extraction.assignment[static_cast<size_t>(row_ids[j])] == cluster)
        ++j;
      run_lengths[static_cast<size_t>(cluster)].push_back(static_cast<Scalar>(j - i) *
                                                          config.features.unit);
      run_counts(group.event, cluster) += 1;
      if (previous >= 0 && previous != cluster)
        transition_sets[static_cast<size_t>(group.event)].insert({previous, cluster});
      previous = cluster;
      i = j;
    }
  }

  for (int a = 0; a < k; ++a) {
    std::vector<char> mask(static_cast<size_t>(extraction.features.rows()), 0);
    for (Eigen::Index i = 0; i < extraction.features.rows(); ++i)
      mask[static_cast<size_t>(i)] = extraction.assignment[static_cast<size_t>(i)] == a ? 1 : 0;
    LogisticFit fit = fit_template_weights(extraction.features, mask);
    DurationPrior prior = fit_duration_prior(run_lengths[static_cast<size_t>(a)]);
    grammar.templates.push_back({a, std::move(fit.weights), prior.mu, prior.sigma});
  }

  Scalar total_groups = event_counts.sum();
  grammar.event_switch.resize(events);
  for (int e = 0; e < events; ++e)
    grammar.event_switch[e] = std::log((event_counts[e] + 1) / (total_groups + events));

  grammar.template_switch = MatX::Constant(events, k, -kInf);
  for (int e = 0; e < events; ++e) {
    Scalar total_runs = run_counts.row(e).sum();
    int admissible = 0;
    for (int a = 0; a < k; ++a) admissible += run_counts(e, a) > 0 ? 1 : 0;
    for (int a = 0; a < k; ++a) {
      if (run_counts(e, a) > 0)
        grammar.template_switch(e, a) =
            std::log((run_counts(e, a) + 1) / (total_runs + admissible));
    }
  }

  grammar.transitions.resize(static_cast<size_t>(events));
  for (int e = 0; e < events; ++e)
    grammar.transitions[static_cast<size_t>(e)] = {transition_sets[static_cast<size_t>(e)].begin(),
                                                   transition_sets[static_cast<size_t>(e)].end()};

  // Roles observed per event, ordered by descending frequency then index.
  MatX role_counts = MatX::Zero(events, dataset.vocabulary.role_count());
  for (const TruthGroup& group : dataset.truth_groups) {
    for (int m : group.members)
      role_counts(group.event, *dataset.trajectories[static_cast<size_t>(m)].truth_role) += 1;
  }
  grammar.roles_of.resize(static_cast<size_t>(events));
  for (int e = 0; e < events; ++e) {
    std::vector<int> roles;
    for (int r = 0; r < dataset.vocabulary.role_count(); ++r) {
      if (role_counts(e, r) > 0) roles.push_back(r);
    }
    std::stable_sort(roles.begin(), roles.end(), [&](int lhs, int rhs) {
      return role_counts(e, lhs) > role_counts(e, rhs);
    });
    grammar.roles_of[static_cast<size_t>(e)] = std::move(roles);
  }

  std::vector<std::string> violations = model.validate();
  if (!violations.empty()) {
    std::string joined;
    for (const std::string& v : violations) joined += (joined.empty() ? "" : "; ") + v;
    fail("training-failed", joined);
  }
  return model;
}

}  // namespace stparse
