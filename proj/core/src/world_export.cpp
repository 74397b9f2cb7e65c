#include "asv/world_export.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include <fmt/ostream.h>

namespace asv {

void write_world_csv(std::ostream& out, const ObstacleWorld& world) {
  out << "kind,index,vertex,x,y\n";
  auto rows = [&](const char* kind, std::size_t index, const auto& pts) {
    for (std::size_t i = 0; i < pts.size(); ++i) fmt::print(out, "{},{},{},{},{}\n", kind, index, i, pts[i].x, pts[i].y);
  };
  if (const auto& ch = world.channel()) {
    rows("centerline", 0, ch->centerline);
    rows("left_bank", 0, ch->left_bank);
    rows("right_bank", 0, ch->right_bank);
    for (std::size_t s = 0; s < ch->sections.size(); ++s) rows("section", s, ch->sections[s]);
  }
  for (std::size_t i = 0; i < world.obstacles().size(); ++i) rows("obstacle", i, world.obstacles()[i].vertices);
}

void write_world_svg(std::ostream& out, const ObstacleWorld& world, double ppm) {
  Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Vec2 hi{-lo.x, -lo.y};
  auto grow = [&](Vec2 p) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  };
  for (const auto& o : world.obstacles()) std::for_each(o.vertices.begin(), o.vertices.end(), grow);
  grow(world.goal());
  grow(world.spawn().position());
  const double margin = 10.0;
  lo = lo - Vec2{margin, margin};
  hi = hi + Vec2{margin, margin};
  const double w = (hi.x - lo.x) * ppm;
  const double h = (hi.y - lo.y) * ppm;
  // SVG y grows downwards; flip so that north is up.
  auto px = [&](Vec2 p) { return fmt::format("{:.3f},{:.3f}", (p.x - lo.x) * ppm, (hi.y - p.y) * ppm); };
  auto points = [&](const auto& pts) {
    std::string s;
    for (const auto& p : pts) s += px(p) + " ";
    if (!s.empty()) s.pop_back();
    return s;
  };

  fmt::print(out, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" viewBox=\"0 0 {:.3f} {:.3f}\">\n",
             std::ceil(w), std::ceil(h), w, h);
  fmt::print(out, "<rect width=\"100%\" height=\"100%\" fill=\"#f4f1ea\"/>\n");
  if (const auto& ch = world.channel()) {
    for (std::size_t s = 0; s < ch->sections.size(); ++s) {
      fmt::print(out, "<polygon class=\"section\" data-index=\"{}\" points=\"{}\" fill=\"#a9cce3\" stroke=\"#5d8aa8\" stroke-width=\"0.5\"/>\n",
                 s, points(ch->sections[s]));
    }
    fmt::print(out, "<polyline class=\"centerline\" points=\"{}\" fill=\"none\" stroke=\"#2e4053\" stroke-dasharray=\"4 3\"/>\n",
               points(ch->centerline));
  }
  for (std::size_t i = 0; i < world.obstacles().size(); ++i) {
    const auto& o = world.obstacles()[i];
    fmt::print(out, "<{} class=\"obstacle\" data-index=\"{}\" points=\"{}\" fill=\"{}\" stroke=\"#1b2631\" stroke-width=\"1.5\"/>\n",
               o.closed ? "polygon" : "polyline", i, points(o.vertices), o.closed ? "#7b7d7d" : "none");
  }
  const Vec2 s = world.spawn().position();
  const Vec2 g = world.goal();
  fmt::print(out, "<circle class=\"spawn\" cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"4\" fill=\"#27ae60\"/>\n", (s.x - lo.x) * ppm, (hi.y - s.y) * ppm);
  fmt::print(out, "<circle class=\"goal\" cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"4\" fill=\"#c0392b\"/>\n", (g.x - lo.x) * ppm, (hi.y - g.y) * ppm);
  out << "</svg>\n";
}

}  // namespace asv
