#pragma once
// Template learning from truth-annotated datasets: clustering unit relation
// vectors into latent sub-event templates, then fitting discriminative
// weights, duration priors, switch frequencies, and transition structure.
#include <cstdint>
#include <vector>

#include "stparse/core.hpp"
#include "stparse/model.hpp"

namespace stparse {

struct TrainingConfig {
  FeatureConfig features;
  int k = 27;  // number of latent templates shared across events
  int kmeans_restarts = 10;
  int kmeans_max_iter = 100;
  std::uint64_t seed = 0;
};

struct KMeansResult {
  MatX centers;  // k x dim
  std::vector<int> assignment;
  Scalar sse = 0;
};

// Lloyd iterations with k-means++ seeding; the best of `restarts` runs by
// within-cluster squared error wins. Empty clusters are reseeded with the
// point farthest from its center, so final clusters are non-empty.
KMeansResult kmeans(const MatX& rows, int k, int restarts, int max_iter, std::uint64_t seed);

struct LogisticFit {
  VecX weights;
  bool converged = false;
};

// One-vs-rest logistic regression: Newton ascent on the mean log-likelihood
// with an L2 penalty on the weights. An unpenalized intercept is fitted
// alongside (it absorbs class imbalance, keeping weight norms comparable
// across clusters) but is dropped from the returned vector, which matches the
// feature dimension.
LogisticFit fit_template_weights(const MatX& rows, const std::vector<char>& positive,
                                 Scalar l2 = 1e-3, int max_iter = 2000);

struct DurationPrior {
  Scalar mu = 0;
  Scalar sigma = 1;
};

// Log-normal fit (MLE) of run lengths in seconds; sigma falls back to 0.25
// for fewer than two samples or zero variance.
DurationPrior fit_duration_prior(const std::vector<Scalar>& lengths);

struct TemplateExtraction {
  FeatureStandardizer standardizer;
  MatX features;  // standardized rows, one per non-empty (group, unit)
  std::vector<int> assignment;
  std::vector<std::vector<int>> group_rows;  // row indices per truth group
  // Number of clusters that received at least one row. Clustering may leave
  // clusters empty when the data has fewer distinct values than requested;
  // assignments are renumbered to the compact range [0, clusters).
  int clusters = 0;
};

// Builds per-unit relation vectors for every truth group using annotated
// roles, standardizes them, and clusters them into k templates.
TemplateExtraction extract_templates(const Dataset& dataset, const TrainingConfig& config);

Model train(const Dataset& dataset, const TrainingConfig& config);

}  // namespace stparse
