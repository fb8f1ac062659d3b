#include "stparse/grammar.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "stparse/features.hpp"

namespace stparse {
namespace {

constexpr Scalar kProbTol = 1e-6;

void check_ids(const Grammar& g, int event, int template_id) {
  if (event < 0 || event >= g.event_count()) fail("unknown-symbol", "event index out of range");
  if (template_id < 0 || template_id >= g.template_count())
    fail("unknown-symbol", "template index out of range");
}

}  // namespace

bool Grammar::admissible(int event, int template_id) const {
  check_ids(*this, event, template_id);
  return template_switch(event, template_id) > -kInf;
}

bool Grammar::transition_allowed(int event, int from, int to) const {
  check_ids(*this, event, from);
  check_ids(*this, event, to);
  if (from == to) return true;
  const auto& pairs = transitions[static_cast<size_t>(event)];
  return std::binary_search(pairs.begin(), pairs.end(), std::make_pair(from, to));
}

std::vector<int> Grammar::admissible_templates(int event) const {
  check_ids(*this, event, 0);
  std::vector<int> out;
  for (int a = 0; a < template_count(); ++a) {
    if (template_switch(event, a) > -kInf) out.push_back(a);
  }
  return out;
}

std::vector<std::string> Grammar::validate(int feature_dim) const {
  std::vector<std::string> violations = vocabulary.validate();
  int e_count = event_count();
  int t_count = template_count();

  if (t_count == 0) violations.push_back("grammar has no templates");
  for (int a = 0; a < t_count; ++a) {
    const TemplateNode& node = templates[static_cast<size_t>(a)];
    if (node.id != a) violations.push_back("template " + std::to_string(a) + " has mismatched id");
    if (node.weights.size() != feature_dim)
      violations.push_back("template " + std::to_string(a) + " weight dimension " +
                           std::to_string(node.weights.size()) + " != feature dimension " +
                           std::to_string(feature_dim));
    if (!(node.duration_sigma > 0))
      violations.push_back("template " + std::to_string(a) + " has non-positive duration sigma");
    if (!std::isfinite(node.duration_mu))
      violations.push_back("template " + std::to_string(a) + " has non-finite duration mu");
  }

  if (event_switch.size() != e_count) {
    violations.push_back("eventSwitch size != event count");
  } else {
    Scalar total = event_switch.array().exp().sum();
    if (std::abs(total - 1) > kProbTol)
      violations.push_back("exp(eventSwitch) sums to " + std::to_string(total) + ", not 1");
  }

  if (template_switch.rows() != e_count || template_switch.cols() != t_count) {
    violations.push_back("templateSwitch shape mismatch");
    return violations;
  }
  if (static_cast<int>(transitions.size()) != e_count)
    violations.push_back("transitions must list every event");
  if (static_cast<int>(roles_of.size()) != e_count)
    violations.push_back("rolesOf must list every event");

  for (int e = 0; e < e_count; ++e) {
    const std::string& name = vocabulary.events[static_cast<size_t>(e)];
    Scalar total = 0;
    int admissible_count = 0;
    for (int a = 0; a < t_count; ++a) {
      Scalar lp = template_switch(e, a);
      if (lp > -kInf) {
        total += std::exp(lp);
        ++admissible_count;
      }
    }
    if (admissible_count == 0) {
      violations.push_back("event '" + name + "' has no admissible template");
    } else if (std::abs(total - 1) > kProbTol) {
      violations.push_back("exp(templateSwitch) for event '" + name + "' sums to " +
                           std::to_string(total) + ", not 1");
    }

    if (e < static_cast<int>(transitions.size())) {
      for (const auto& [from, to] : transitions[static_cast<size_t>(e)]) {
        if (from < 0 || from >= t_count || to < 0 || to >= t_count) {
          violations.push_back("event '" + name + "' transition endpoint out of range");
          continue;
        }
        if (template_switch(e, from) <= -kInf || template_switch(e, to) <= -kInf)
          violations.push_back("event '" + name + "' transition uses inadmissible template");
      }
    }
    if (e < static_cast<int>(roles_of.size())) {
      const auto& roles = roles_of[static_cast<size_t>(e)];
      if (roles.empty()) violations.push_back("event '" + name + "' has no admissible role");
      std::set<int> seen;
      for (int r : roles) {
        if (r < 0 || r >= vocabulary.role_count())
          violations.push_back("event '" + name + "' role index out of range");
        else if (!seen.insert(r).second)
          violations.push_back("event '" + name + "' lists a role twice");
      }
    }
  }
  return violations;
}

}  // namespace stparse
