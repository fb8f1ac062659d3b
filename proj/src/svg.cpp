#include "stparse/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace stparse {
namespace {

const char* kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                          "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};
constexpr int kPaletteSize = 10;
constexpr Scalar kWidth = 800;
constexpr Scalar kMargin = 40;

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(Scalar v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.2f", v);
  return buffer;
}

struct Mapper {
  Vec2 lo = Vec2::Zero();
  Scalar scale = 1;
  Scalar height = 0;

  // World y grows upward, SVG y grows downward: flip.
  Vec2 operator()(const Vec2& p) const {
    return {kMargin + (p.x() - lo.x()) * scale, height - kMargin - (p.y() - lo.y()) * scale};
  }
};

Mapper fit(const Dataset& dataset) {
  Vec2 lo(kInf, kInf), hi(-kInf, -kInf);
  auto grow = [&](const Vec2& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  };
  for (const Trajectory& traj : dataset.trajectories)
    for (const TrackSample& s : traj.samples) grow(s.pos);
  for (const SceneObject& object : dataset.scene.objects)
    for (const Vec2& p : object.coords) grow(p);
  if (!lo.allFinite()) {
    lo = Vec2::Zero();
    hi = Vec2::Ones();
  }
  Vec2 span = (hi - lo).cwiseMax(1e-6);
  Mapper m;
  m.lo = lo;
  m.scale = (kWidth - 2 * kMargin) / std::max(span.x(), span.y());
  m.height = span.y() * m.scale + 2 * kMargin;
  return m;
}

}  // namespace

std::string render_svg(const Dataset& dataset, const Solution* solution) {
  Mapper map = fit(dataset);
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
      << num(map.height) << "\" viewBox=\"0 0 " << num(kWidth) << " " << num(map.height)
      << "\">\n";
  svg << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (const SceneObject& object : dataset.scene.objects) {
    const std::string& name =
        dataset.vocabulary.scene_classes[static_cast<size_t>(object.scene_class)];
    if (object.is_point()) {
      Vec2 p = map(object.coords[0]);
      svg << "  <circle cx=\"" << num(p.x()) << "\" cy=\"" << num(p.y())
          << "\" r=\"5\" fill=\"#555\"/>\n";
      svg << "  <text x=\"" << num(p.x() + 7) << "\" y=\"" << num(p.y() - 7)
          << "\" font-size=\"11\" fill=\"#555\">" << escape(name) << "</text>\n";
    } else {
      svg << "  <polygon points=\"";
      for (const Vec2& v : object.coords) {
        Vec2 p = map(v);
        svg << num(p.x()) << "," << num(p.y()) << " ";
      }
      svg << "\" fill=\"#ddd\" stroke=\"#555\"/>\n";
      Vec2 p = map(object.coords[0]);
      svg << "  <text x=\"" << num(p.x()) << "\" y=\"" << num(p.y() - 5)
          << "\" font-size=\"11\" fill=\"#555\">" << escape(name) << "</text>\n";
    }
  }

  // Group index per trajectory (-1 = ungrouped, drawn gray).
  std::vector<int> owner(dataset.trajectories.size(), -1);
  if (solution) {
    for (size_t g = 0; g < solution->groups.size(); ++g)
      for (int m : solution->groups[g]) owner[static_cast<size_t>(m)] = static_cast<int>(g);
  }

  for (size_t i = 0; i < dataset.trajectories.size(); ++i) {
    const Trajectory& traj = dataset.trajectories[i];
    const char* color = owner[i] >= 0 ? kPalette[owner[i] % kPaletteSize] : "#999999";
    svg << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const TrackSample& s : traj.samples) {
      Vec2 p = map(s.pos);
      svg << num(p.x()) << "," << num(p.y()) << " ";
    }
    svg << "\"/>\n";
    Vec2 start = map(traj.samples.front().pos);
    svg << "  <circle cx=\"" << num(start.x()) << "\" cy=\"" << num(start.y())
        << "\" r=\"3\" fill=\"" << color << "\"/>\n";
  }

  if (solution) {
    for (size_t g = 0; g < solution->groups.size(); ++g) {
      const ParseGraph& parse = solution->parses[g];
      const char* color = kPalette[g % kPaletteSize];
      Vec2 lo(kInf, kInf), hi(-kInf, -kInf);
      for (size_t m = 0; m < solution->groups[g].size(); ++m) {
        const Trajectory& traj =
            dataset.trajectories[static_cast<size_t>(solution->groups[g][m])];
        for (const TrackSample& s : traj.samples) {
          lo = lo.cwiseMin(s.pos);
          hi = hi.cwiseMax(s.pos);
        }
        Vec2 end = map(traj.samples.back().pos);
        svg << "  <text x=\"" << num(end.x() + 4) << "\" y=\"" << num(end.y() + 4)
            << "\" font-size=\"10\" fill=\"" << color << "\">"
            << escape(dataset.vocabulary.role_name(parse.roles[m])) << "</text>\n";
      }
      Vec2 a = map({lo.x(), hi.y()});  // top-left corner after the y flip
      Vec2 b = map({hi.x(), lo.y()});
      svg << "  <rect x=\"" << num(a.x() - 6) << "\" y=\"" << num(a.y() - 6) << "\" width=\""
          << num(b.x() - a.x() + 12) << "\" height=\"" << num(b.y() - a.y() + 12)
          << "\" fill=\"none\" stroke=\"" << color << "\" stroke-dasharray=\"6 3\"/>\n";
      svg << "  <text x=\"" << num(a.x() - 4) << "\" y=\"" << num(a.y() - 10)
          << "\" font-size=\"13\" font-weight=\"bold\" fill=\"" << color << "\">"
          << escape(dataset.vocabulary.events[static_cast<size_t>(parse.event)]) << "</text>\n";
    }
  }

  svg << "</svg>\n";
  return svg.str();
}

}  // namespace stparse
