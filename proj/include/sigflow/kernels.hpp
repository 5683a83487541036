#pragma once

#include "sigflow/flow.hpp"

#include <span>
#include <string>
#include <vector>

namespace sigflow {

enum class Execution { serial, parallel };

struct BatchTrajectory {
    Trajectory traj;
    std::string error; // empty on success; otherwise the integrator's diagnostic
    bool ok() const { return error.empty(); }
};

// One trajectory per seed, results in seed order. The parallel version distributes
// seeds over OpenMP threads and produces the same output as the serial one.
std::vector<BatchTrajectory> integrate_batch(const DistanceField& field, std::span<const Vec2> seeds, double t_max,
                                             const FlowOptions& options, Execution exec = Execution::parallel);

// Singularity classification of each point, in point order.
std::vector<SingularityTest> classify_points(const DistanceField& field, std::span<const Vec2> points,
                                             Execution exec = Execution::parallel);

} // namespace sigflow
