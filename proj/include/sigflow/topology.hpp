#pragma once

#include "sigflow/kernels.hpp"

#include <json.hpp>

#include <iosfwd>
#include <span>
#include <vector>

namespace sigflow {

struct SkeletonPoint {
    Vec2 x;
    double speed_sq = 0.0;
    double delta = 0.0;
};

// Grid points classified singular. The grid has res x res nodes spanning the
// bounding box corners inclusively; nodes outside the domain are dropped.
struct SkeletonCloud {
    int resolution = 0;
    Vec2 spacing = Vec2::Zero();
    int grid_points = 0;  // nodes inside the domain
    int ambiguous = 0;    // nodes whose fan was flagged ambiguous (not in points)
    std::vector<SkeletonPoint> points;
};

// All res x res grid nodes, row-major from the lower-left corner.
std::vector<Vec2> grid_nodes(const BoundingBox& box, int res);

SkeletonCloud extract_skeleton(const DistanceField& field, int res, Execution exec = Execution::parallel);

// Symmetric Hausdorff distance between two clouds (infinity if exactly one is empty).
double hausdorff(const SkeletonCloud& a, const SkeletonCloud& b);

// Deformation H(x, t) = gamma_x(t T) with T = 2 * diameter, t in [0, 1]. H(x, 0) = x exactly.
double homotopy_horizon(const DistanceField& field);
Vec2 homotopy_map(const DistanceField& field, const Vec2& x, double t, const FlowOptions& options = {});

struct RetractionOptions {
    int samples = 500;
    // Coarser than the default flow step: many trajectories of length 2 * diameter.
    double dt = 1e-2;
    int skeleton_res = 129;
};

struct RetractionReport {
    int samples = 0;            // interior samples that were integrated
    int skeleton_samples = 0;
    int failures = 0;           // integrations that stopped with an error
    double diameter = 0.0;
    double horizon = 0.0;
    bool identity_at_zero = true;
    double frac_end_singular = 1.0;      // H(x, 1) singular
    double frac_skeleton_invariant = 1.0; // H(y, t) singular at t = 0, .25, .5, .75, 1
    double max_drift = 0.0;              // endpoint change when dt is halved
    double max_first_singular_time = 0.0;
    int never_singular = 0;              // interior samples that never became singular
    std::vector<Vec2> endpoints;         // H(x, 1) of each completed interior trajectory (not serialized)
};

// Quasi-random interior points: the Halton(2, 3) sequence mapped to the bounding box,
// keeping the first n that fall inside the domain.
std::vector<Vec2> interior_samples(const DistanceField& field, int n);

RetractionReport check_retraction(const DistanceField& field, const RetractionOptions& options = {},
                                  Execution exec = Execution::parallel);

nlohmann::ordered_json to_json(const RetractionReport& r);

// Header x,y,speed_sq,delta.
void write_skeleton_csv(std::ostream& out, const SkeletonCloud& cloud);

// Boundary, skeleton points and trajectories; the view box is the bounding box plus 5%.
void write_svg(std::ostream& out, const Scene& scene, const SkeletonCloud* cloud,
               std::span<const Trajectory> trajectories = {});

} // namespace sigflow
