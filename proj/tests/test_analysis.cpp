#include <cmath>

#include "doctest.h"
#include "dyncable/analysis.hpp"

using namespace dyncable;

namespace {

const SystemParams kSys;
const WorkspaceLimits kWs;

double triangles_area(const std::vector<Triangle>& tris) {
  double s = 0.0;
  for (const Triangle& t : tris)
    s += 0.5 * std::abs((t.b.x - t.a.x) * (t.c.y - t.a.y) -
                        (t.c.x - t.a.x) * (t.b.y - t.a.y));
  return s;
}

}  // namespace

TEST_CASE("delaunay triangulates simple point sets") {
  const std::vector<PlanePoint> square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const auto tris = delaunay(square);
  CHECK(tris.size() == 2);
  CHECK(triangles_area(tris) == doctest::Approx(1.0).epsilon(1e-12));

  // Duplicates are merged before triangulating.
  std::vector<PlanePoint> dup = square;
  dup.push_back({1.0 + 1e-14, 0.0});
  CHECK(delaunay(dup).size() == 2);

  // A denser convex cloud still tiles its hull exactly.
  std::vector<PlanePoint> grid;
  for (int i = 0; i <= 4; ++i)
    for (int j = 0; j <= 3; ++j) grid.push_back({0.1 * i, 0.1 * j});
  CHECK(triangles_area(delaunay(grid)) ==
        doctest::Approx(0.4 * 0.3).epsilon(1e-12));

  CHECK_THROWS_AS(delaunay({{0, 0}, {1, 1}}), std::invalid_argument);
  // Collinear input yields no real triangles.
  CHECK(delaunay({{0, 0}, {1, 1}, {2, 2}, {3, 3}}).empty());
}

TEST_CASE("coverage area matches a hand-clipped rectangle") {
  // Dense grid over [-0.2, 0.2] x [0.3, 0.7]; the table edge at
  // y = y_min_base cuts the rectangle, the outer arc does not reach it.
  std::vector<PlanePoint> pts;
  for (int i = 0; i <= 8; ++i)
    for (int j = 0; j <= 8; ++j)
      pts.push_back({-0.2 + 0.05 * i, 0.3 + 0.05 * j});
  const CoverageResult cov = coverage(pts, kWs, kSys);
  CHECK(cov.point_count == 81);
  // Default alpha: twice the grid spacing; every grid triangle's
  // circumradius is half a cell diagonal, so all are kept.
  CHECK(cov.alpha == doctest::Approx(0.1));
  CHECK(cov.raw_area == doctest::Approx(0.4 * 0.4).epsilon(1e-9));
  const double expected = 0.4 * (0.7 - kWs.y_min_base);
  CHECK(cov.area == doctest::Approx(expected).epsilon(1e-9));

  // Degenerate inputs report zero coverage rather than failing.
  CHECK(coverage({{0, 0.5}, {0.1, 0.5}}, kWs, kSys).area == 0.0);
  CHECK(coverage({}, kWs, kSys).point_count == 0);
}

TEST_CASE("alpha controls whether distant clusters are bridged") {
  std::vector<PlanePoint> pts;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      pts.push_back({0.30 + 0.05 * i, 0.60 + 0.05 * j});
      pts.push_back({-0.35 + 0.05 * i, 0.60 + 0.05 * j});
    }
  const CoverageResult tight = coverage(pts, kWs, kSys);
  // Two detached squares of side 0.05 each.
  CHECK(tight.raw_area == doctest::Approx(2 * 0.05 * 0.05).epsilon(1e-9));
  const CoverageResult loose = coverage(pts, kWs, kSys, 10.0);
  CHECK(loose.raw_area > 4.0 * tight.raw_area);
  CHECK(loose.area > tight.area);
}

TEST_CASE("dataset endpoints skip invalid transitions") {
  Dataset ds;
  for (int i = 0; i < 3; ++i) {
    Transition t;
    t.endpoint_xy = {0.1 * i, 0.5};
    t.endpoint = cartesian_to_polar(t.endpoint_xy);
    t.invalid = (i == 1);
    ds.transitions.push_back(t);
  }
  const auto pts = dataset_endpoints(ds);
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].x == 0.0);
  CHECK(pts[1].x == doctest::Approx(0.2));
}

TEST_CASE("repeatability uses population std and excludes thin targets") {
  const std::vector<std::vector<PlanePoint>> groups = {
      {{0.00, 0.5}, {0.02, 0.5}},             // std 0.01 in x
      {{0.0, 0.60}, {0.0, 0.62}, {5.0, 5.0}},  // off-table point dropped
      {{0.0, 0.7}},                            // too few -> excluded
      {{3.0, 0.5}, {3.1, 0.5}},                // all off-table -> excluded
  };
  const RepeatabilityResult rep = repeatability(groups, kWs);
  REQUIRE(rep.stds.size() == 2);
  CHECK(rep.stds[0] == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(rep.stds[1] == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(rep.mean_std == doctest::Approx(0.01).epsilon(1e-12));
  REQUIRE(rep.excluded_targets.size() == 2);
  CHECK(rep.excluded_targets[0] == 2);
  CHECK(rep.excluded_targets[1] == 3);
}

TEST_CASE("confidence ellipse from an axis-aligned scatter") {
  // Population covariance diag(a^2/2, b^2/2) with a = 2, b = 1.
  const std::vector<PlanePoint> pts = {{2, 0}, {-2, 0}, {0, 1}, {0, -1}};
  const ConfidenceEllipse e = confidence_ellipse(pts);
  CHECK(e.center.x == doctest::Approx(0.0));
  CHECK(e.center.y == doctest::Approx(0.0));
  CHECK(e.semi_major == doctest::Approx(std::sqrt(5.991 * 2.0)).epsilon(1e-12));
  CHECK(e.semi_minor == doctest::Approx(std::sqrt(5.991 * 0.5)).epsilon(1e-12));
  CHECK(e.angle == doctest::Approx(0.0));
  CHECK_FALSE(e.degenerate);

  // Rotating the scatter rotates the major axis by the same angle.
  const double phi = 0.5;
  std::vector<PlanePoint> rot;
  for (const PlanePoint& p : pts)
    rot.push_back({p.x * std::cos(phi) - p.y * std::sin(phi),
                   p.x * std::sin(phi) + p.y * std::cos(phi)});
  const ConfidenceEllipse er = confidence_ellipse(rot);
  CHECK(er.angle == doctest::Approx(phi).epsilon(1e-9));
  CHECK(er.semi_major == doctest::Approx(e.semi_major).epsilon(1e-9));
  CHECK(er.semi_minor == doctest::Approx(e.semi_minor).epsilon(1e-9));

  const ConfidenceEllipse deg =
      confidence_ellipse({{0, 0}, {1, 1}, {2, 2}, {3, 3}});
  CHECK(deg.degenerate);
  CHECK(deg.semi_minor == doctest::Approx(0.0));

  CHECK_THROWS_AS(confidence_ellipse({{0, 0}, {1, 1}}), std::invalid_argument);
}

TEST_CASE("coverage svg is deterministic and well formed") {
  std::vector<PlanePoint> pts;
  for (int i = 0; i <= 6; ++i)
    for (int j = 0; j <= 6; ++j)
      pts.push_back({-0.15 + 0.05 * i, 0.5 + 0.05 * j});
  const CoverageResult cov = coverage(pts, kWs, kSys);
  const std::string a = coverage_svg(cov, kWs, kSys);
  const std::string b = coverage_svg(cov, kWs, kSys);
  CHECK(a == b);
  CHECK(a.rfind("<svg", 0) == 0);
  CHECK(a.find("<polygon") != std::string::npos);
  CHECK(a.find("</svg>") != std::string::npos);
  const std::string with_band = coverage_svg(cov, kWs, kSys, true);
  CHECK(with_band.size() > a.size());
}
