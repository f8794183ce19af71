#include "dyncable/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dyncable {

namespace {

constexpr double kDedupeEps = 1e-12;
constexpr int kClipArcSegments = 128;
constexpr double kChi2Two95 = 5.991;

struct Circum {
  double x = 0.0, y = 0.0, r2 = 0.0;
  bool ok = false;
};

Circum circumcircle(const PlanePoint& a, const PlanePoint& b,
                    const PlanePoint& c) {
  const double d =
      2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
  Circum cc;
  if (std::abs(d) < 1e-14) return cc;
  const double a2 = a.x * a.x + a.y * a.y;
  const double b2 = b.x * b.x + b.y * b.y;
  const double c2 = c.x * c.x + c.y * c.y;
  cc.x = (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d;
  cc.y = (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d;
  const double dx = a.x - cc.x, dy = a.y - cc.y;
  cc.r2 = dx * dx + dy * dy;
  cc.ok = true;
  return cc;
}

double tri_area(const PlanePoint& a, const PlanePoint& b,
                const PlanePoint& c) {
  return 0.5 * std::abs((b.x - a.x) * (c.y - a.y) -
                        (c.x - a.x) * (b.y - a.y));
}

double polygon_area(const std::vector<PlanePoint>& poly) {
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const PlanePoint& p = poly[i];
    const PlanePoint& q = poly[(i + 1) % poly.size()];
    s += p.x * q.y - q.x * p.y;
  }
  return 0.5 * std::abs(s);
}

// Sutherland-Hodgman clip of `subject` against a convex polygon given in
// counterclockwise order.
std::vector<PlanePoint> clip_convex(const std::vector<PlanePoint>& subject,
                                    const std::vector<PlanePoint>& clip) {
  std::vector<PlanePoint> out = subject;
  for (std::size_t e = 0; e < clip.size() && !out.empty(); ++e) {
    const PlanePoint& a = clip[e];
    const PlanePoint& b = clip[(e + 1) % clip.size()];
    auto inside = [&](const PlanePoint& p) {
      return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x) >= 0.0;
    };
    auto intersect = [&](const PlanePoint& p, const PlanePoint& q) {
      const double a1 = b.y - a.y, b1 = a.x - b.x;
      const double c1 = a1 * a.x + b1 * a.y;
      const double a2 = q.y - p.y, b2 = p.x - q.x;
      const double c2 = a2 * p.x + b2 * p.y;
      const double det = a1 * b2 - a2 * b1;
      return PlanePoint{(b2 * c1 - b1 * c2) / det,
                        (a1 * c2 - a2 * c1) / det};
    };
    std::vector<PlanePoint> next;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const PlanePoint& p = out[i];
      const PlanePoint& q = out[(i + 1) % out.size()];
      const bool pin = inside(p), qin = inside(q);
      if (pin) next.push_back(p);
      if (pin != qin) next.push_back(intersect(p, q));
    }
    out = std::move(next);
  }
  return out;
}

// Circular segment of radius R about `center`, cut by y >= y_min;
// counterclockwise.
std::vector<PlanePoint> clip_region(const WorkspaceLimits& ws,
                                    const SystemParams& sys) {
  const PlanePoint o = sys.polar_origin();
  const double R = ws.r_max + ws.r_c;
  const double dy = ws.y_min_base - o.y;
  if (dy >= R) throw std::logic_error("clip_region: empty region");
  const double half = std::acos(std::max(-1.0, dy / R));
  std::vector<PlanePoint> poly;
  for (int i = 0; i <= kClipArcSegments; ++i) {
    // theta measured from +y, sweeping right edge to left edge.
    const double th = half - 2.0 * half * i / kClipArcSegments;
    poly.push_back({o.x + R * std::sin(th), o.y + R * std::cos(th)});
  }
  return poly;  // chord closes the polygon implicitly
}

std::vector<PlanePoint> dedupe(const std::vector<PlanePoint>& points) {
  std::vector<PlanePoint> out;
  for (const PlanePoint& p : points) {
    bool dup = false;
    for (const PlanePoint& q : out)
      if (std::abs(p.x - q.x) < kDedupeEps && std::abs(p.y - q.y) < kDedupeEps) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(p);
  }
  return out;
}

double median_nn_distance(const std::vector<PlanePoint>& pts) {
  std::vector<double> nn(pts.size(),
                         std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double d = std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
      nn[i] = std::min(nn[i], d);
      nn[j] = std::min(nn[j], d);
    }
  std::sort(nn.begin(), nn.end());
  const std::size_t n = nn.size();
  return (n % 2 == 1) ? nn[n / 2] : 0.5 * (nn[n / 2 - 1] + nn[n / 2]);
}

}  // namespace

std::vector<Triangle> delaunay(const std::vector<PlanePoint>& points) {
  std::vector<PlanePoint> pts = dedupe(points);
  if (pts.size() < 3)
    throw std::invalid_argument("delaunay: need at least three points");

  // Super-triangle comfortably enclosing the cloud.
  double lo_x = pts[0].x, hi_x = pts[0].x, lo_y = pts[0].y, hi_y = pts[0].y;
  for (const PlanePoint& p : pts) {
    lo_x = std::min(lo_x, p.x);
    hi_x = std::max(hi_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_y = std::max(hi_y, p.y);
  }
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1.0});
  const double cx = 0.5 * (lo_x + hi_x), cy = 0.5 * (lo_y + hi_y);
  const std::size_t n = pts.size();
  pts.push_back({cx - 20.0 * span, cy - 10.0 * span});
  pts.push_back({cx + 20.0 * span, cy - 10.0 * span});
  pts.push_back({cx, cy + 20.0 * span});

  struct Tri {
    std::size_t i, j, k;
    Circum cc;
  };
  auto make_tri = [&](std::size_t i, std::size_t j, std::size_t k) {
    return Tri{i, j, k, circumcircle(pts[i], pts[j], pts[k])};
  };
  std::vector<Tri> tris = {make_tri(n, n + 1, n + 2)};

  for (std::size_t p = 0; p < n; ++p) {
    std::vector<Tri> keep;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (const Tri& t : tris) {
      const double dx = pts[p].x - t.cc.x, dy = pts[p].y - t.cc.y;
      if (t.cc.ok && dx * dx + dy * dy <= t.cc.r2) {
        edges.push_back({t.i, t.j});
        edges.push_back({t.j, t.k});
        edges.push_back({t.k, t.i});
      } else {
        keep.push_back(t);
      }
    }
    // Boundary of the cavity: edges that appear exactly once.
    std::vector<bool> shared(edges.size(), false);
    for (std::size_t a = 0; a < edges.size(); ++a)
      for (std::size_t b = a + 1; b < edges.size(); ++b)
        if ((edges[a].first == edges[b].second &&
             edges[a].second == edges[b].first) ||
            (edges[a].first == edges[b].first &&
             edges[a].second == edges[b].second))
          shared[a] = shared[b] = true;
    tris = std::move(keep);
    for (std::size_t a = 0; a < edges.size(); ++a)
      if (!shared[a]) tris.push_back(make_tri(edges[a].first, edges[a].second, p));
  }

  std::vector<Triangle> out;
  for (const Tri& t : tris) {
    if (t.i >= n || t.j >= n || t.k >= n) continue;
    out.push_back({pts[t.i], pts[t.j], pts[t.k]});
  }
  return out;
}

CoverageResult coverage(const std::vector<PlanePoint>& points,
                        const WorkspaceLimits& ws, const SystemParams& sys,
                        double alpha) {
  CoverageResult res;
  const std::vector<PlanePoint> pts = dedupe(points);
  res.point_count = pts.size();
  if (pts.size() < 3) return res;

  if (alpha <= 0.0) alpha = 2.0 * median_nn_distance(pts);
  res.alpha = alpha;

  const std::vector<PlanePoint> region = clip_region(ws, sys);
  for (const Triangle& t : delaunay(pts)) {
    const Circum cc = circumcircle(t.a, t.b, t.c);
    if (!cc.ok || std::sqrt(cc.r2) > alpha) continue;
    res.triangles.push_back(t);
    res.raw_area += tri_area(t.a, t.b, t.c);
    const auto clipped = clip_convex({t.a, t.b, t.c}, region);
    if (clipped.size() >= 3) res.area += polygon_area(clipped);
  }
  return res;
}

std::vector<PlanePoint> dataset_endpoints(const Dataset& ds) {
  std::vector<PlanePoint> out;
  for (const Transition& t : ds.transitions)
    if (!t.invalid) out.push_back(t.endpoint_xy);
  return out;
}

RepeatabilityResult repeatability(
    const std::vector<std::vector<PlanePoint>>& trials_per_target,
    const WorkspaceLimits& ws) {
  RepeatabilityResult res;
  for (std::size_t g = 0; g < trials_per_target.size(); ++g) {
    std::vector<PlanePoint> kept;
    for (const PlanePoint& p : trials_per_target[g])
      if (ws.on_table(p)) kept.push_back(p);
    if (kept.size() < 2) {
      res.excluded_targets.push_back(static_cast<int>(g));
      continue;
    }
    double mx = 0.0, my = 0.0;
    for (const PlanePoint& p : kept) {
      mx += p.x;
      my += p.y;
    }
    mx /= kept.size();
    my /= kept.size();
    double var = 0.0;
    for (const PlanePoint& p : kept) {
      const double dx = p.x - mx, dy = p.y - my;
      var += dx * dx + dy * dy;
    }
    res.stds.push_back(std::sqrt(var / kept.size()));
  }
  if (!res.stds.empty()) {
    double s = 0.0;
    for (double v : res.stds) s += v;
    res.mean_std = s / res.stds.size();
  }
  return res;
}

ConfidenceEllipse confidence_ellipse(const std::vector<PlanePoint>& points) {
  if (points.size() < 3)
    throw std::invalid_argument("confidence_ellipse: need >= 3 points");
  ConfidenceEllipse e;
  const double n = static_cast<double>(points.size());
  for (const PlanePoint& p : points) {
    e.center.x += p.x;
    e.center.y += p.y;
  }
  e.center.x /= n;
  e.center.y /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const PlanePoint& p : points) {
    const double dx = p.x - e.center.x, dy = p.y - e.center.y;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  sxx /= n;
  syy /= n;
  sxy /= n;
  const double tr = sxx + syy;
  const double det = sxx * syy - sxy * sxy;
  const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
  const double l1 = 0.5 * tr + disc;  // major
  const double l2 = 0.5 * tr - disc;
  e.semi_major = std::sqrt(kChi2Two95 * std::max(0.0, l1));
  e.semi_minor = std::sqrt(kChi2Two95 * std::max(0.0, l2));
  e.angle = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
  e.degenerate = l2 <= 1e-16;
  return e;
}

std::string coverage_svg(const CoverageResult& cov, const WorkspaceLimits& ws,
                         const SystemParams& sys, bool show_cast_band) {
  const std::vector<PlanePoint> region = clip_region(ws, sys);
  const double R = ws.r_max + ws.r_c;
  const PlanePoint o = sys.polar_origin();
  const double scale = 300.0;  // px per meter
  auto px = [&](const PlanePoint& p) {
    return PlanePoint{(p.x - o.x + R) * scale, (o.y + R - p.y) * scale};
  };
  char buf[256];
  std::ostringstream out;
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" "
                "height=\"%d\" viewBox=\"0 0 %d %d\">\n",
                static_cast<int>(2 * R * scale), static_cast<int>(2 * R * scale),
                static_cast<int>(2 * R * scale),
                static_cast<int>(2 * R * scale));
  out << buf;
  auto poly = [&](const std::vector<PlanePoint>& p, const char* style) {
    out << "<polygon points=\"";
    for (const PlanePoint& q : p) {
      const PlanePoint v = px(q);
      std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", v.x, v.y);
      out << buf;
    }
    out << "\" " << style << "/>\n";
  };
  poly(region, "fill=\"none\" stroke=\"#444\" stroke-width=\"1\"");
  if (show_cast_band) {
    // Band of targets the quasistatic cast accepts (default lever).
    const SimConfig cfg;
    std::vector<PlanePoint> band;
    const double r_in_c = ws.r_c + cfg.attach_lever;  // r >= y_min/cos + this
    auto band_r_min = [&](double th) {
      return ws.y_min_base / std::cos(th) + r_in_c;
    };
    std::vector<double> th_ok;
    for (int i = -kClipArcSegments; i <= kClipArcSegments; ++i) {
      const double th = 1.5 * i / kClipArcSegments;
      if (std::cos(th) > 0.0 && band_r_min(th) <= R) th_ok.push_back(th);
    }
    if (th_ok.size() >= 2) {
      for (double th : th_ok)
        band.push_back({o.x + R * std::sin(th), o.y + R * std::cos(th)});
      for (auto it = th_ok.rbegin(); it != th_ok.rend(); ++it)
        band.push_back({o.x + band_r_min(*it) * std::sin(*it),
                        o.y + band_r_min(*it) * std::cos(*it)});
      poly(band, "fill=\"#88c\" fill-opacity=\"0.25\" stroke=\"none\"");
    }
  }
  for (const Triangle& t : cov.triangles)
    poly({t.a, t.b, t.c},
         "fill=\"#6b6\" fill-opacity=\"0.4\" stroke=\"none\"");
  out << "</svg>\n";
  return out.str();
}

}  // namespace dyncable
