#pragma once

#include "sigflow/distance.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace sigflow {

struct FlowSample {
    double t = 0.0;
    Vec2 x = Vec2::Zero();
    Vec2 v = Vec2::Zero();   // selected velocity v*
    double delta = 0.0;
    double speed_sq = 1.0;   // <A v*, v*>
    bool singular = false;
    bool ambiguous = false;
    int generators = 1;
};

struct FlowOptions {
    double dt = 1e-3;
    // Steps are also capped at c_cfl * delta.
    double c_cfl = 0.1;
    // Times that must appear exactly among the samples.
    std::vector<double> checkpoints;
    // Bisect steps whose fan changes combinatorially so the crossing is resolved.
    bool resolve_events = true;
};

// Time-stamped samples of a generalized characteristic. When the selected speed drops
// below the stationarity threshold the arc is constant from then on; a final sample at
// t_max records that tail.
struct Trajectory {
    std::vector<FlowSample> samples;
    Backend backend = Backend::exact;
    double dt = 0.0;
    double c_cfl = 0.0;
    double t_max = 0.0;
    std::optional<double> halt_time;

    // Piecewise-linear position; constant past the last sample.
    Vec2 position_at(double t) const;
    // First time with a singular sample, if any.
    std::optional<double> first_singular_time() const;
};

// Largest admissible dt for a field: c_cfl * diameter.
double max_step(const DistanceField& field, double c_cfl = 0.1);

// Selected squared speed below which the arc is stationary: eps_halt on the exact backend,
// (1 / (2 smooth_steps))^2 on the lattice, the residual that direction quantisation can leave.
double halt_threshold(const DistanceField& field);

Trajectory integrate(const DistanceField& field, const Vec2& x0, double t_max, const FlowOptions& options = {});

enum class PointClass { regular, singular, ambiguous };

struct SingularityTest {
    PointClass cls = PointClass::regular;
    double speed_sq = 1.0;
    int generators = 1;
    bool singular() const { return cls == PointClass::singular; }
};

SingularityTest is_singular(const DistanceField& field, const Vec2& x);

struct BoundReport {
    bool riemannian = false; // beta(t) with the curvature bound instead of alpha(t)
    double curvature_bound = 0.0;
    double s0 = 0.0;
    std::vector<double> t;
    std::vector<double> measured;
    std::vector<double> integral; // alpha(t_k) or beta(t_k)
    std::vector<double> bound;
    double min_margin = 0.0;      // min_k bound_k - measured_k
    double tolerance = 1e-6;
    bool pass = false;
};

// Logistic bound s0 e^I / (s0 e^I + 1 - s0), evaluated without overflow.
double logistic_bound(double s0, double integral);

BoundReport verify_speed_bound(const Trajectory& traj, const Scene& scene, double tolerance = 1e-6);

struct SemiconcavityReport {
    int pairs_checked = 0;
    int pairs_skipped = 0; // segment leaves the domain
    double max_violation = 0.0;
    double tolerance = 1e-9;
    bool pass = true;
};

// Checks <d(x) p - d(y) q, x - y> <= |x - y|^2 over all generators of both fans.
SemiconcavityReport check_semiconcavity_pairs(const DistanceField& field, std::span<const std::pair<Vec2, Vec2>> pairs,
                                              double tolerance = 1e-9);

struct DependenceReport {
    int seeds = 0;
    double max_ratio = 0.0; // sup_t |gamma_x(t) - gamma_y(t)| / |x - y|
    std::optional<double> bound;
    bool pass = true;
};

DependenceReport check_continuous_dependence(const DistanceField& field, const Vec2& x, double radius, double t_max,
                                             const FlowOptions& options = {}, int seeds = 8,
                                             std::optional<double> bound = std::nullopt);

// Header t,x,y,vx,vy,delta,speed_sq,singular; 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

} // namespace sigflow
