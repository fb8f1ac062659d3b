#pragma once
// The learned event grammar: one OR branch per event over latent sub-event
// templates, template switch priors, lateral followed-by transition edges,
// and the admissible role set per event.
#include <utility>
#include <vector>

#include "stparse/core.hpp"
#include "stparse/types.hpp"

namespace stparse {

// A latent sub-event template: discriminative weights over the relation
// vector plus a log-normal prior on the seconds a run of it lasts.
struct TemplateNode {
  int id = -1;
  VecX weights;
  Scalar duration_mu = 0;
  Scalar duration_sigma = 1;
};

struct Grammar {
  LabelVocabulary vocabulary;
  std::vector<TemplateNode> templates;
  // Log selection probabilities. template_switch is events x templates with
  // -inf marking templates never observed under the event (inadmissible).
  VecX event_switch;
  MatX template_switch;
  // Per event: observed followed-by pairs (from, to), sorted, self pairs
  // excluded. Self transitions are always allowed.
  std::vector<std::vector<std::pair<int, int>>> transitions;
  // Per event: admissible role indices, most frequent in training first.
  std::vector<std::vector<int>> roles_of;

  int event_count() const { return static_cast<int>(vocabulary.events.size()); }
  int template_count() const { return static_cast<int>(templates.size()); }

  bool admissible(int event, int template_id) const;
  bool transition_allowed(int event, int from, int to) const;
  std::vector<int> admissible_templates(int event) const;

  // Structural defects; empty when the grammar is usable.
  std::vector<std::string> validate(int feature_dim) const;
};

}  // namespace stparse
