#include "canardkit/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "canardkit/canard.hpp"

namespace canardkit {

namespace {

constexpr double kPanel = 400.0;
constexpr double kMargin = 30.0;
constexpr double kPi = std::numbers::pi;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", std::abs(v) < 5e-4 ? 0.0 : v);
  return buf;
}

struct Frame {
  double x0, x1, y0, y1, left;
  double px(double x) const { return left + kMargin + (x - x0) / (x1 - x0) * (kPanel - 2 * kMargin); }
  double py(double y) const { return kMargin + (y1 - y) / (y1 - y0) * (kPanel - 2 * kMargin); }
};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

void axes(std::ostringstream& os, const Frame& f) {
  os << "<g class=\"axes\" stroke=\"#444\" stroke-width=\"1\" fill=\"none\">\n";
  os << "<rect x=\"" << num(f.left + kMargin) << "\" y=\"" << num(kMargin) << "\" width=\""
     << num(kPanel - 2 * kMargin) << "\" height=\"" << num(kPanel - 2 * kMargin) << "\"/>\n";
  if (f.x0 <= 0 && 0 <= f.x1) {
    os << "<line x1=\"" << num(f.px(0)) << "\" y1=\"" << num(f.py(f.y0)) << "\" x2=\"" << num(f.px(0)) << "\" y2=\""
       << num(f.py(f.y1)) << "\" stroke-dasharray=\"2,3\"/>\n";
  }
  if (f.y0 <= 0 && 0 <= f.y1) {
    os << "<line x1=\"" << num(f.px(f.x0)) << "\" y1=\"" << num(f.py(0)) << "\" x2=\"" << num(f.px(f.x1)) << "\" y2=\""
       << num(f.py(0)) << "\" stroke-dasharray=\"2,3\"/>\n";
  }
  os << "</g>\n";
  os << "<g class=\"labels\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#444\">\n";
  os << "<text x=\"" << num(f.px(f.x0)) << "\" y=\"" << num(kPanel - 12) << "\">" << num(f.x0) << "</text>\n";
  os << "<text x=\"" << num(f.px(f.x1) - 24) << "\" y=\"" << num(kPanel - 12) << "\">" << num(f.x1) << "</text>\n";
  os << "<text x=\"" << num(f.left + 2) << "\" y=\"" << num(f.py(f.y0)) << "\">" << num(f.y0) << "</text>\n";
  os << "<text x=\"" << num(f.left + 2) << "\" y=\"" << num(f.py(f.y1) + 10) << "\">" << num(f.y1) << "</text>\n";
  os << "</g>\n";
}

// Zero contour of one branch by marching squares.
std::string contour_path(const Branch& br, const Frame& f, int n) {
  const double hx = (f.x1 - f.x0) / n, hy = (f.y1 - f.y0) / n;
  std::vector<double> v(static_cast<std::size_t>((n + 1) * (n + 1)));
  auto at = [&](int i, int j) -> double& { return v[static_cast<std::size_t>(j * (n + 1) + i)]; };
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) at(i, j) = br.eval(f.x0 + i * hx, f.y0 + j * hy);
  }
  std::ostringstream os;
  auto cross = [&](double xa, double ya, double va, double xb, double yb, double vb) {
    const double t = va / (va - vb);
    return Vec2{xa + t * (xb - xa), ya + t * (yb - ya)};
  };
  auto seg = [&](const Vec2& a, const Vec2& b) {
    os << "M" << num(f.px(a[0])) << " " << num(f.py(a[1])) << "L" << num(f.px(b[0])) << " " << num(f.py(b[1]));
  };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double xa = f.x0 + i * hx, xb = xa + hx, ya = f.y0 + j * hy, yb = ya + hy;
      const double c[4] = {at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)};
      const double cx[4] = {xa, xb, xb, xa};
      const double cy[4] = {ya, ya, yb, yb};
      std::vector<Vec2> pts;
      for (int e = 0; e < 4; ++e) {
        const int k = (e + 1) % 4;
        if ((c[e] < 0) != (c[k] < 0)) pts.push_back(cross(cx[e], cy[e], c[e], cx[k], cy[k], c[k]));
      }
      if (pts.size() == 2) {
        seg(pts[0], pts[1]);
      } else if (pts.size() == 4) {
        const double centre = br.eval(xa + hx / 2, ya + hy / 2);
        if ((centre < 0) == (c[0] < 0)) {
          seg(pts[0], pts[3]);
          seg(pts[1], pts[2]);
        } else {
          seg(pts[0], pts[1]);
          seg(pts[2], pts[3]);
        }
      }
    }
  }
  return os.str();
}

void plane_panel(std::ostringstream& os, const PlaneView& view, double left) {
  const Frame f{view.box.xmin.to_double(), view.box.xmax.to_double(), view.box.ymin.to_double(),
                view.box.ymax.to_double(), left};
  os << "<g class=\"plane\">\n";
  axes(os, f);
  if (view.fast_field) {
    os << "<g class=\"fast-fibres\" stroke=\"#9ab\" stroke-width=\"0.8\">\n";
    constexpr int kArrows = 14;
    const double len = 0.35 * (kPanel - 2 * kMargin) / kArrows;
    for (int j = 0; j < kArrows; ++j) {
      for (int i = 0; i < kArrows; ++i) {
        const double x = f.x0 + (f.x1 - f.x0) * (i + 0.5) / kArrows;
        const double y = f.y0 + (f.y1 - f.y0) * (j + 0.5) / kArrows;
        const Vec2 d = eval_field(*view.fast_field, x, y);
        const double norm = std::hypot(d[0], d[1]);
        if (!(norm > 1e-12) || !std::isfinite(norm)) continue;
        // Screen y points down.
        const double ux = d[0] / norm, uy = -d[1] / norm;
        const double sx = f.px(x), sy = f.py(y);
        const double tx = sx + len * ux, ty = sy + len * uy;
        os << "<path d=\"M" << num(sx - len * ux) << " " << num(sy - len * uy) << "L" << num(tx) << " " << num(ty)
           << "M" << num(tx - 0.4 * len * (ux - 0.5 * uy)) << " " << num(ty - 0.4 * len * (uy + 0.5 * ux)) << "L"
           << num(tx) << " " << num(ty) << "L" << num(tx - 0.4 * len * (ux + 0.5 * uy)) << " "
           << num(ty - 0.4 * len * (uy - 0.5 * ux)) << "\"/>\n";
      }
    }
    os << "</g>\n";
  }
  for (const auto& br : view.branches) {
    const bool canard =
        std::find(view.canard_branches.begin(), view.canard_branches.end(), br.id) != view.canard_branches.end();
    os << "<path class=\"branch" << (canard ? " canard" : "") << "\" id=\"branch-" << br.id << "\" fill=\"none\" stroke=\""
       << (canard ? "#c0392b" : "#222") << "\" stroke-width=\"" << (canard ? "2.5" : "1.2") << "\" d=\""
       << contour_path(br, f, view.grid) << "\"><title>" << escape(br.defining_poly.to_string())
       << "</title></path>\n";
  }
  for (std::size_t k = 0; k < view.trajectories.size(); ++k) {
    const auto& tr = view.trajectories[k];
    if (tr.empty()) continue;
    os << "<polyline class=\"trajectory\" fill=\"none\" stroke=\"#2471a3\" stroke-width=\"1\" points=\"";
    // At most 4000 vertices per trajectory.
    const std::size_t stride = std::max<std::size_t>(1, tr.size() / 4000);
    for (std::size_t i = 0; i < tr.size(); i += stride) {
      const double x = std::clamp(tr[i][0], f.x0 - (f.x1 - f.x0), f.x1 + (f.x1 - f.x0));
      const double y = std::clamp(tr[i][1], f.y0 - (f.y1 - f.y0), f.y1 + (f.y1 - f.y0));
      os << (i ? " " : "") << num(f.px(x)) << "," << num(f.py(y));
    }
    os << "\"/>\n";
  }
  if (view.singular_point) {
    os << "<circle class=\"singular-point\" cx=\"" << num(f.px((*view.singular_point)[0])) << "\" cy=\""
       << num(f.py((*view.singular_point)[1])) << "\" r=\"3\" fill=\"#000\"/>\n";
  }
  os << "</g>\n";
}

void hemisphere_panel(std::ostringstream& os, const HemisphereView& view, double left) {
  const double cx = left + kPanel / 2, cy = kPanel / 2, R = kPanel / 2 - kMargin;
  auto to_screen = [&](double theta, double phi) {
    const double r = std::clamp(phi / (kPi / 2), 0.0, 1.0) * R;
    return Vec2{cx + r * std::cos(theta), cy - r * std::sin(theta)};
  };
  os << "<g class=\"hemisphere\">\n";
  os << "<circle class=\"equator\" cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(R)
     << "\" fill=\"none\" stroke=\"#444\"/>\n";
  os << "<circle class=\"pole\" cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"1.5\" fill=\"#444\"/>\n";
  for (const auto& orbit : view.orbits) {
    if (orbit.empty()) continue;
    os << "<polyline class=\"connection\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.5\" points=\"";
    const std::size_t stride = std::max<std::size_t>(1, orbit.size() / 4000);
    for (std::size_t i = 0; i < orbit.size(); i += stride) {
      const Vec2 p = to_screen(orbit[i][0], orbit[i][1]);
      os << (i ? " " : "") << num(p[0]) << "," << num(p[1]);
    }
    os << "\"/>\n";
  }
  for (const auto& e : view.equilibria) {
    const Vec2 p = to_screen(e.theta, e.phi);
    const std::string fill = e.classification.find("stable node") == 0 || e.classification == "sink" ? "#1e8449"
                             : e.classification == "saddle"                                          ? "#d68910"
                             : e.classification == "nonhyperbolic"                                   ? "#7f8c8d"
                                                                                                     : "#c0392b";
    os << "<circle class=\"equilibrium\" cx=\"" << num(p[0]) << "\" cy=\"" << num(p[1]) << "\" r=\"4\" fill=\"" << fill
       << "\"><title>theta=" << num(e.theta) << " " << escape(e.classification) << " " << escape(e.origin.to_string())
       << "</title></circle>\n";
    const Vec2 lp = to_screen(e.theta, e.phi * 1.12);
    os << "<text class=\"equilibrium-label\" x=\"" << num(lp[0] - 12) << "\" y=\"" << num(lp[1] + 3)
       << "\" font-family=\"sans-serif\" font-size=\"9\">" << num(e.theta) << "</text>\n";
  }
  os << "</g>\n";
}

}  // namespace

std::string render_svg(const SvgScene& scene) {
  const bool two = scene.plane && scene.hemisphere;
  const double width = two ? 2 * kPanel : kPanel;
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(kPanel)
     << "\" viewBox=\"0 0 " << num(width) << " " << num(kPanel) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
  if (scene.plane) {
    plane_panel(os, *scene.plane, 0.0);
  } else if (!scene.hemisphere) {
    os << "<g class=\"plane\">\n";
    axes(os, Frame{-1, 1, -1, 1, 0.0});
    os << "</g>\n";
  }
  if (scene.hemisphere) hemisphere_panel(os, *scene.hemisphere, scene.plane ? kPanel : 0.0);
  os << "</svg>\n";
  return os.str();
}

SvgScene make_scene(const Analysis& a, const BlowupAnalysis* b, const SimulationResult* s) {
  SvgScene scene;
  PlaneView pv;
  pv.box = a.box;
  pv.branches = a.critical_set.branches;
  for (const auto& r : a.canards) {
    for (const auto& bc : r.per_branch) {
      if (bc.is_canard) pv.canard_branches.push_back(bc.branch);
    }
  }
  if (a.critical_set.singular) pv.fast_field = a.critical_set.x0;
  if (!a.points.empty()) pv.singular_point = a.points.front().location.approx;
  if (s && !s->trajectory.empty()) pv.trajectories.push_back(s->trajectory.states);
  scene.plane = std::move(pv);
  if (b) {
    HemisphereView hv;
    hv.equilibria = b->equator;
    for (const auto& c : b->connections) hv.orbits.push_back(c.result.orbit);
    scene.hemisphere = std::move(hv);
  }
  return scene;
}

}  // namespace canardkit
