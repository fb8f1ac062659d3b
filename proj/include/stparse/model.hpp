#pragma once
// A trained model bundle: grammar, feature standardizer, and the feature
// extraction constants inference must share with training.
#include "stparse/features.hpp"
#include "stparse/grammar.hpp"

namespace stparse {

struct Model {
  Grammar grammar;
  FeatureStandardizer standardizer;
  FeatureConfig features;

  // Columns are template weight vectors, for scoring many units at once.
  MatX weight_matrix() const {
    MatX w(standardizer.mean.size(), grammar.template_count());
    for (int a = 0; a < grammar.template_count(); ++a)
      w.col(a) = grammar.templates[static_cast<size_t>(a)].weights;
    return w;
  }

  std::vector<std::string> validate() const {
    FeatureSpace space = FeatureSpace::of(grammar.vocabulary);
    std::vector<std::string> violations = grammar.validate(space.dim());
    if (standardizer.mean.size() != space.dim() || standardizer.stdev.size() != space.dim())
      violations.push_back("standardizer dimension != feature dimension");
    std::string config_defect = features.check();
    if (!config_defect.empty()) violations.push_back("config: " + config_defect);
    return violations;
  }
};

}  // namespace stparse
