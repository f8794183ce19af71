#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dyncable/datasets.hpp"

namespace dyncable {

struct Triangle {
  PlanePoint a, b, c;
};

// Delaunay triangulation (Bowyer-Watson). Input must contain at least three
// non-collinear points; duplicates within 1e-12 are merged.
std::vector<Triangle> delaunay(const std::vector<PlanePoint>& points);

struct CoverageResult {
  double area = 0.0;          // m^2, clipped to the reachable semicircle
  double raw_area = 0.0;      // m^2, before clipping
  double alpha = 0.0;         // circumradius threshold used
  std::size_t point_count = 0;
  std::vector<Triangle> triangles;  // kept (clip applied to area only)
};

// Alpha-shape area of the endpoint cloud. alpha <= 0 selects the default of
// twice the median nearest-neighbour distance. The clip region is the
// semicircle of radius r_max + r_c about the polar origin intersected with
// the table half-plane y >= y_min_base.
CoverageResult coverage(const std::vector<PlanePoint>& points,
                        const WorkspaceLimits& ws, const SystemParams& sys,
                        double alpha = 0.0);

// Endpoints of the valid transitions of a dataset.
std::vector<PlanePoint> dataset_endpoints(const Dataset& ds);

struct RepeatabilityResult {
  std::vector<double> stds;  // per target with >= 2 in-table trials
  std::vector<int> excluded_targets;
  double mean_std = 0.0;
};

// Population standard deviation of endpoint scatter about the per-target
// mean, off-table trials excluded; targets left with fewer than two trials
// are dropped and reported.
RepeatabilityResult repeatability(
    const std::vector<std::vector<PlanePoint>>& trials_per_target,
    const WorkspaceLimits& ws);

struct ConfidenceEllipse {
  PlanePoint center;
  double semi_major = 0.0;
  double semi_minor = 0.0;
  double angle = 0.0;  // radians of the major axis from +x
  bool degenerate = false;
};

// 95% confidence ellipse of a 2-D scatter (chi-square with 2 dof).
ConfidenceEllipse confidence_ellipse(const std::vector<PlanePoint>& points);

// Deterministic SVG of a coverage result: clip-region outline, kept
// triangles, endpoint dots, and optionally the polar-cast-reachable band.
std::string coverage_svg(const CoverageResult& cov, const WorkspaceLimits& ws,
                         const SystemParams& sys,
                         bool show_cast_band = false);

}  // namespace dyncable
