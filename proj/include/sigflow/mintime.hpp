#pragma once

#include "sigflow/kernels.hpp"

#include <cstdint>

namespace sigflow {

// Metric whose distance is the exit time of y' = F(y) a, |a| <= 1: G = (F^T)^{-1} F^{-1}.
MetricField metric_from_control(const ControlSpec& f);

// Exit time T(x): the boundary distance under G, i.e. field.value(x). Accepts control_field
// scenes and grid_sampled metrics (G sampled from a control); other metrics are rejected.
double min_time(const DistanceField& field, const Vec2& x);

// H(x, p) = <F(x) F(x)^T p, p>.
double hamiltonian(const ControlSpec& f, const Vec2& x, const Vec2& p);
// D_p H(x, p) = 2 F(x) F(x)^T p.
Vec2 hamiltonian_gradient(const ControlSpec& f, const Vec2& x, const Vec2& p);

struct HjbReport {
    int resolution = 0;
    Vec2 spacing = Vec2::Zero();
    int checked = 0;   // nodes with a full five-point stencil in regular territory
    int excluded = 0;  // interior nodes dropped near singular or ambiguous nodes or the boundary
    double max_residual = 0.0; // max |H(x, DT) - 1|
    double mean_residual = 0.0;
    Vec2 worst = Vec2::Zero();
};

// Central differences of T on a res x res grid over the bounding box. Nodes within two
// cells of a singular or ambiguous node are skipped. res = 0 picks the scene spacing.
// H uses F F^T for control scenes and G^{-1} for sampled metrics.
HjbReport hjb_residual(const DistanceField& field, int res = 0, Execution exec = Execution::parallel);

struct CharacteristicReport {
    int samples = 0;
    double max_error = 0.0; // max |D_p H(x, p*) - 2 v*|
};

// Along a trajectory of a control_field scene, compares the Hamiltonian gradient at the
// selected covector with twice the selected velocity.
CharacteristicReport check_characteristic_form(const DistanceField& field, const Trajectory& traj);

struct CoshReport {
    double alpha = 0.0;
    int triples = 0;
    double max_violation = 0.0; // max over triples of lhs - rhs, clamped below at 0
    double worst_ratio = 0.0;   // max_violation / grid_h
};

// Semiconcavity of v = cosh(alpha d) along lattice geodesics: for node pairs (a, b) joined
// by a lattice path g with metric length L and t in (0, 1),
//   (1 - t) v(a) + t v(b) - v(g(t)) <= t (1 - t) K L^2 / 2,  K = alpha^2 max_g v.
// alpha defaults to the scene's curvature_bound.
CoshReport check_cosh_semiconcavity(const DistanceField& field, int triples, std::uint64_t seed,
                                    std::optional<double> alpha = std::nullopt);

} // namespace sigflow
