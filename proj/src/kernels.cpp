#include "sigflow/kernels.hpp"

#include "sigflow/errors.hpp"

namespace sigflow {

namespace {

BatchTrajectory run_one(const DistanceField& field, const Vec2& seed, double t_max, const FlowOptions& options)
{
    BatchTrajectory r;
    try {
        r.traj = integrate(field, seed, t_max, options);
    } catch (const Error& e) {
        r.error = e.what();
    }
    return r;
}

} // namespace

std::vector<BatchTrajectory> integrate_batch(const DistanceField& field, std::span<const Vec2> seeds, double t_max,
                                             const FlowOptions& options, Execution exec)
{
    std::vector<BatchTrajectory> out(seeds.size());
    const auto n = static_cast<long>(seeds.size());
    if (exec == Execution::serial) {
        for (long i = 0; i < n; ++i) out[static_cast<size_t>(i)] = run_one(field, seeds[static_cast<size_t>(i)], t_max, options);
        return out;
    }
    // Trajectory lengths vary a lot (some park early), hence dynamic scheduling.
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n; ++i) out[static_cast<size_t>(i)] = run_one(field, seeds[static_cast<size_t>(i)], t_max, options);
    return out;
}

std::vector<SingularityTest> classify_points(const DistanceField& field, std::span<const Vec2> points, Execution exec)
{
    for (const Vec2& x : points)
        if (!field.contains(x)) throw DomainError("point outside domain");
    std::vector<SingularityTest> out(points.size());
    const auto n = static_cast<long>(points.size());
    if (exec == Execution::serial) {
        for (long i = 0; i < n; ++i) out[static_cast<size_t>(i)] = is_singular(field, points[static_cast<size_t>(i)]);
        return out;
    }
#pragma omp parallel for schedule(static, 64)
    for (long i = 0; i < n; ++i) out[static_cast<size_t>(i)] = is_singular(field, points[static_cast<size_t>(i)]);
    return out;
}

} // namespace sigflow
