#pragma once

#include "sigflow/convexmin.hpp"
#include "sigflow/lattice.hpp"
#include "sigflow/scene.hpp"
#include "sigflow/tolerances.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <string_view>
#include <vector>

namespace sigflow {

enum class Backend { exact, lattice };

std::string_view to_string(Backend b);

// Boundary piece a projection lands on. Lattice projections carry the edge of the foot.
struct Feature {
    enum class Kind { edge, vertex, lattice };
    Kind kind = Kind::edge;
    int index = -1;
    auto operator<=>(const Feature&) const = default;
};

struct Projection {
    Vec2 foot;
    double dist = 0.0;
    Feature feature;
    double arclength = 0.0;
};

struct ProjectionSet {
    Vec2 x;
    double delta = 0.0;
    std::vector<Projection> projections; // sorted by distance, deduplicated by feature
    Backend backend = Backend::exact;
};

struct SuperdiffFan {
    Vec2 x;
    double delta = 0.0;
    Mat2 metric = Mat2::Identity();
    std::vector<Vec2> generators;             // after angular dedup, each with <A^-1 p, p> = 1
    std::vector<Feature> generator_features;  // feature of the representative projection
    std::vector<Feature> all_features;        // every near-minimal feature before dedup
    std::vector<double> weights;              // simplex coefficients over generators
    Vec2 covector = Vec2::Zero();             // p*
    Vec2 velocity = Vec2::Zero();             // v* = A^-1 p*
    double speed_sq = 1.0;                    // s*
    bool singular = false;                    // s* < 1 - eps_sing
    bool ambiguous = false;                   // several generators yet s* not below the threshold
    Backend backend = Backend::exact;
};

// Distance to the boundary of a scene with either backend. Exact projection needs a
// constant metric; position-dependent metrics always use the lattice. Immutable after
// construction and safe to query concurrently.
class DistanceField {
public:
    explicit DistanceField(Scene scene, std::optional<Backend> backend = std::nullopt, Tolerances tol = {});

    const Scene& scene() const { return scene_; }
    Backend backend() const { return backend_; }
    const Tolerances& tolerances() const { return tol_; }
    const LatticeField* lattice() const { return lattice_.get(); }

    bool contains(const Vec2& x) const { return scene_.boundary.contains(x); }
    double value(const Vec2& x) const;
    ProjectionSet project(const Vec2& x) const;
    SuperdiffFan fan(const Vec2& x) const;
    // Fan built from an exact projection set computed earlier.
    SuperdiffFan fan(const ProjectionSet& ps) const;
    // Distance from x to a single boundary feature and its gradient covector (exact backend only).
    double feature_distance(const Feature& f, const Vec2& x) const;
    Vec2 feature_covector(const Feature& f, const Vec2& x) const;
    // diameter(scene()), computed on first use.
    double diameter() const;

private:
    ProjectionSet project_exact(const Vec2& x) const;
    SuperdiffFan fan_lattice(const Vec2& x) const;
    void finish(SuperdiffFan& fan, std::vector<Vec2> gens, std::vector<Feature> feats) const;

    Scene scene_;
    Tolerances tol_;
    Backend backend_;
    Mat2 a_ = Mat2::Identity();
    EdgeIndex index_;
    std::shared_ptr<const LatticeField> lattice_;
    std::shared_ptr<std::once_flag> diameter_once_ = std::make_shared<std::once_flag>();
    std::shared_ptr<double> diameter_ = std::make_shared<double>(0.0);
};

ProjectionSet project(const Scene& scene, const Vec2& x);
SuperdiffFan superdifferential(const Scene& scene, const Vec2& x);

// Indices of at most three generators whose hull has the same minimal-norm point as
// the hull of all of them; the generators must be A^-1-unit covectors.
std::vector<int> reduce_unit_fan(const std::vector<Vec2>& generators, const Mat2& a);

} // namespace sigflow
