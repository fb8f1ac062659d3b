#pragma once
// Renders a dataset (and optionally an inferred solution) as a standalone
// SVG: scene objects, trajectories colored by group, group bounding boxes
// with event labels, and role labels at trajectory endpoints.
#include <string>

#include "stparse/core.hpp"

namespace stparse {

std::string render_svg(const Dataset& dataset, const Solution* solution = nullptr);

}  // namespace stparse
