#include "sigflow/verify.hpp"

#include "sigflow/errors.hpp"
#include "sigflow/linalg.hpp"
#include "sigflow/mintime.hpp"
#include "sigflow/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace sigflow {

namespace {

using nlohmann::ordered_json;

CheckStatus status_of(bool ok) { return ok ? CheckStatus::pass : CheckStatus::fail; }

std::string_view to_string(CheckStatus s)
{
    switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::skipped: return "skipped";
    }
    return "skipped";
}

CheckResult skipped(std::string name, std::string reason)
{
    return {std::move(name), CheckStatus::skipped, ordered_json{{"reason", std::move(reason)}}};
}

CheckResult check_semiconcavity(const DistanceField& field, const VerifyOptions& o)
{
    if (field.scene().metric.kind() != MetricKind::euclidean)
        return skipped("semiconcavity", "needs a Euclidean metric");
    const BoundingBox& box = field.scene().boundary.bbox();
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> ux(box.lo.x(), box.hi.x()), uy(box.lo.y(), box.hi.y());
    auto draw = [&] {
        for (;;) {
            Vec2 x(ux(rng), uy(rng));
            if (field.contains(x)) return x;
        }
    };
    std::vector<std::pair<Vec2, Vec2>> pairs;
    pairs.reserve(o.pairs);
    for (int i = 0; i < o.pairs; ++i) {
        Vec2 a = draw();
        pairs.emplace_back(a, draw());
    }
    SemiconcavityReport r = check_semiconcavity_pairs(field, pairs);
    return {"semiconcavity", status_of(r.pass),
            ordered_json{{"pairs_checked", r.pairs_checked},
                         {"pairs_skipped", r.pairs_skipped},
                         {"max_violation", r.max_violation},
                         {"tolerance", r.tolerance}}};
}

CheckResult check_eikonal(const DistanceField& field, const VerifyOptions& o)
{
    const double tol = field.tolerances().tol_eik;
    double gen_err = 0.0, speed_excess = 0.0;
    int points = 0;
    for (const Vec2& x : interior_samples(field, o.eikonal_points)) {
        SuperdiffFan fan = field.fan(x);
        Mat2 ai = inverse2(fan.metric);
        for (const Vec2& p : fan.generators) gen_err = std::max(gen_err, std::abs(p.dot(ai * p) - 1.0));
        speed_excess = std::max(speed_excess, fan.speed_sq - 1.0);
        ++points;
    }
    return {"eikonal_saturation", status_of(gen_err <= tol && speed_excess <= tol),
            ordered_json{{"points", points},
                         {"max_generator_error", gen_err},
                         {"max_speed_excess", speed_excess},
                         {"tolerance", tol}}};
}

CheckResult check_invariance(const DistanceField& field, const VerifyOptions& o, Execution exec)
{
    std::vector<Vec2> seeds = interior_samples(field, o.battery);
    FlowOptions fo;
    fo.dt = o.dt;
    const double horizon = homotopy_horizon(field);
    std::vector<BatchTrajectory> batch = integrate_batch(field, seeds, horizon, fo, exec);
    const double tol_mono = 1e-9 * field.diameter();
    int violations = 0, failures = 0, decreases = 0, reached = 0;
    for (const BatchTrajectory& b : batch) {
        if (!b.ok()) {
            ++failures;
            continue;
        }
        if (first_sigma_exit(b.traj) >= 0) ++violations;
        if (b.traj.first_singular_time()) ++reached;
        const auto& s = b.traj.samples;
        for (std::size_t k = 1; k < s.size(); ++k)
            if (s[k].delta < s[k - 1].delta - tol_mono) ++decreases;
    }
    return {"sigma_invariance", status_of(violations == 0 && failures == 0),
            ordered_json{{"trajectories", static_cast<int>(batch.size())},
                         {"dt", o.dt},
                         {"t_max", horizon},
                         {"violations", violations},
                         {"failures", failures},
                         {"reached_singular", reached},
                         {"delta_decreases", decreases}}};
}

CheckResult check_bounds(const DistanceField& field, const VerifyOptions& o, Execution exec)
{
    const Scene& scene = field.scene();
    if (scene.metric.kind() != MetricKind::euclidean && !scene.curvature_bound)
        return skipped("speed_bound", "Riemannian scene without curvature_bound");
    SkeletonCloud cloud = extract_skeleton(field, 65, exec);
    if (cloud.points.empty()) return skipped("speed_bound", "no singular grid points");
    std::vector<Vec2> seeds;
    const std::size_t n = cloud.points.size(), want = std::max(1, o.bound_seeds);
    for (std::size_t i = 0; i < std::min(n, want); ++i) seeds.push_back(cloud.points[i * n / std::min(n, want)].x);
    FlowOptions fo;
    fo.dt = o.dt;
    std::vector<BatchTrajectory> batch = integrate_batch(field, seeds, homotopy_horizon(field), fo, exec);
    int checked = 0, failed = 0, failures = 0;
    double margin = std::numeric_limits<double>::infinity();
    for (const BatchTrajectory& b : batch) {
        if (!b.ok()) {
            ++failures;
            continue;
        }
        if (!b.traj.samples.front().singular) continue; // ambiguous start
        BoundReport r = verify_speed_bound(b.traj, scene);
        ++checked;
        if (!r.pass) ++failed;
        margin = std::min(margin, r.min_margin);
    }
    ordered_json d{{"trajectories", checked},
                   {"violating", failed},
                   {"failures", failures},
                   {"min_margin", checked ? ordered_json(margin) : ordered_json(nullptr)},
                   {"tolerance", 1e-6}};
    if (scene.curvature_bound) d["curvature_bound"] = *scene.curvature_bound;
    return {"speed_bound", status_of(failed == 0 && failures == 0), std::move(d)};
}

CheckResult check_retraction_report(const DistanceField& field, const VerifyOptions& o, Execution exec)
{
    RetractionOptions ro;
    ro.samples = o.samples;
    RetractionReport r = check_retraction(field, ro, exec);
    bool ok = r.failures == 0 && r.identity_at_zero && r.frac_end_singular == 1.0 &&
              r.frac_skeleton_invariant == 1.0 && r.max_first_singular_time <= r.diameter;
    return {"retraction", status_of(ok), to_json(r)};
}

CheckResult check_hjb(const DistanceField& field, const VerifyOptions& o, Execution exec)
{
    MetricKind k = field.scene().metric.kind();
    if (k != MetricKind::control_field && k != MetricKind::grid_sampled)
        return skipped("hjb_residual", "no control interpretation");
    HjbReport r = hjb_residual(field, 0, exec);
    const double h = field.scene().grid_h;
    return {"hjb_residual", status_of(r.max_residual <= o.hjb_constant * h),
            ordered_json{{"resolution", r.resolution},
                         {"checked", r.checked},
                         {"excluded", r.excluded},
                         {"max_residual", r.max_residual},
                         {"mean_residual", r.mean_residual},
                         {"worst", {r.worst.x(), r.worst.y()}},
                         {"grid_h", h},
                         {"constant", r.max_residual / h},
                         {"allowed_constant", o.hjb_constant}}};
}

} // namespace

bool VerifyReport::pass() const
{
    return std::none_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.status == CheckStatus::fail; });
}

int first_sigma_exit(const Trajectory& traj)
{
    bool seen = false;
    for (std::size_t k = 0; k < traj.samples.size(); ++k) {
        if (traj.samples[k].singular)
            seen = true;
        else if (seen)
            return static_cast<int>(k);
    }
    return -1;
}

VerifyReport verify_scene(const DistanceField& field, const VerifyOptions& options, Execution exec)
{
    if (options.dt <= 0.0 || !(options.dt <= max_step(field))) throw InputError("dt outside (0, max_step]");
    if (options.battery < 1 || options.samples < 1 || options.pairs < 0) throw InputError("sample counts must be positive");
    const Scene& s = field.scene();
    VerifyReport r;
    r.scene = ordered_json{{"vertices", s.boundary.size()},
                           {"metric", std::string(to_string(s.metric.kind()))},
                           {"backend", std::string(to_string(field.backend()))},
                           {"grid_h", s.grid_h},
                           {"diameter", field.diameter()}};
    if (s.curvature_bound) r.scene["curvature_bound"] = *s.curvature_bound;
    r.checks.push_back(check_semiconcavity(field, options));
    r.checks.push_back(check_eikonal(field, options));
    r.checks.push_back(check_invariance(field, options, exec));
    r.checks.push_back(check_bounds(field, options, exec));
    r.checks.push_back(check_retraction_report(field, options, exec));
    r.checks.push_back(check_hjb(field, options, exec));
    return r;
}

nlohmann::ordered_json to_json(const VerifyReport& r)
{
    ordered_json checks = ordered_json::array();
    for (const CheckResult& c : r.checks) {
        ordered_json j{{"name", c.name}, {"status", std::string(to_string(c.status))}};
        for (auto& [k, v] : c.detail.items()) j[k] = v;
        checks.push_back(std::move(j));
    }
    return ordered_json{{"scene", r.scene}, {"checks", std::move(checks)}, {"pass", r.pass()}};
}

} // namespace sigflow
