#include "sigflow/topology.hpp"

#include "sigflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace sigflow {

namespace {

double radical_inverse(unsigned i, unsigned base)
{
    double inv = 1.0 / base, f = inv, r = 0.0;
    while (i > 0) {
        r += f * (i % base);
        i /= base;
        f *= inv;
    }
    return r;
}

bool singular_at(const Trajectory& tr, double t)
{
    // Last sample at or before t; checkpoints make this an exact hit.
    const auto& s = tr.samples;
    auto it = std::upper_bound(s.begin(), s.end(), t + 1e-12, [](double v, const FlowSample& fs) { return v < fs.t; });
    if (it == s.begin()) return false;
    return std::prev(it)->singular;
}

} // namespace

std::vector<Vec2> grid_nodes(const BoundingBox& box, int res)
{
    if (res < 2) throw InputError("grid resolution must be at least 2");
    std::vector<Vec2> out;
    out.reserve(static_cast<size_t>(res) * static_cast<size_t>(res));
    const Vec2 h = box.extent() / (res - 1);
    for (int j = 0; j < res; ++j) {
        const double y = j == res - 1 ? box.hi.y() : box.lo.y() + j * h.y();
        for (int i = 0; i < res; ++i) {
            const double x = i == res - 1 ? box.hi.x() : box.lo.x() + i * h.x();
            out.emplace_back(x, y);
        }
    }
    return out;
}

SkeletonCloud extract_skeleton(const DistanceField& field, int res, Execution exec)
{
    if (res < 16) throw InputError("skeleton resolution must be at least 16");
    const BoundingBox box = field.scene().boundary.bbox();
    std::vector<Vec2> nodes = grid_nodes(box, res);
    std::erase_if(nodes, [&](const Vec2& x) { return !field.contains(x); });

    SkeletonCloud cloud;
    cloud.resolution = res;
    cloud.spacing = box.extent() / (res - 1);
    cloud.grid_points = static_cast<int>(nodes.size());
    const std::vector<SingularityTest> cls = classify_points(field, nodes, exec);
    for (size_t i = 0; i < nodes.size(); ++i) {
        if (cls[i].cls == PointClass::ambiguous) ++cloud.ambiguous;
        if (!cls[i].singular()) continue;
        cloud.points.push_back({nodes[i], cls[i].speed_sq, field.value(nodes[i])});
    }
    return cloud;
}

double hausdorff(const SkeletonCloud& a, const SkeletonCloud& b)
{
    if (a.points.empty() && b.points.empty()) return 0.0;
    if (a.points.empty() || b.points.empty()) return std::numeric_limits<double>::infinity();
    auto one_sided = [](const SkeletonCloud& p, const SkeletonCloud& q) {
        double worst = 0.0;
        for (const SkeletonPoint& u : p.points) {
            double best = std::numeric_limits<double>::infinity();
            for (const SkeletonPoint& v : q.points) best = std::min(best, (u.x - v.x).squaredNorm());
            worst = std::max(worst, best);
        }
        return std::sqrt(worst);
    };
    return std::max(one_sided(a, b), one_sided(b, a));
}

double homotopy_horizon(const DistanceField& field)
{
    return 2.0 * field.diameter();
}

Vec2 homotopy_map(const DistanceField& field, const Vec2& x, double t, const FlowOptions& options)
{
    if (!(t >= 0.0 && t <= 1.0)) throw InputError("homotopy parameter must lie in [0, 1]");
    if (!field.contains(x)) throw DomainError("point outside domain");
    if (t == 0.0) return x;
    const Trajectory tr = integrate(field, x, t * homotopy_horizon(field), options);
    return tr.samples.back().x;
}

std::vector<Vec2> interior_samples(const DistanceField& field, int n)
{
    std::vector<Vec2> out;
    if (n <= 0) return out;
    const BoundingBox box = field.scene().boundary.bbox();
    const Vec2 ext = box.extent();
    // Give up eventually on domains that cover a tiny part of their box.
    const unsigned limit = 1000u * static_cast<unsigned>(n) + 1000u;
    for (unsigned i = 1; i < limit && static_cast<int>(out.size()) < n; ++i) {
        const Vec2 p(box.lo.x() + radical_inverse(i, 2) * ext.x(), box.lo.y() + radical_inverse(i, 3) * ext.y());
        if (field.contains(p)) out.push_back(p);
    }
    return out;
}

RetractionReport check_retraction(const DistanceField& field, const RetractionOptions& options, Execution exec)
{
    RetractionReport r;
    r.diameter = field.diameter();
    r.horizon = homotopy_horizon(field);
    if (options.samples <= 0) return r;

    const std::vector<Vec2> xs = interior_samples(field, options.samples);
    r.samples = static_cast<int>(xs.size());
    for (const Vec2& x : xs)
        if (homotopy_map(field, x, 0.0) != x) r.identity_at_zero = false;

    FlowOptions fo;
    fo.dt = options.dt;
    const auto coarse = integrate_batch(field, xs, r.horizon, fo, exec);
    FlowOptions half = fo;
    half.dt = 0.5 * fo.dt;
    const auto fine = integrate_batch(field, xs, r.horizon, half, exec);

    int end_singular = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (!coarse[i].ok()) {
            ++r.failures;
            continue;
        }
        const Trajectory& tr = coarse[i].traj;
        r.endpoints.push_back(tr.samples.back().x);
        if (tr.samples.back().singular) ++end_singular;
        if (const auto ts = tr.first_singular_time())
            r.max_first_singular_time = std::max(r.max_first_singular_time, *ts);
        else
            ++r.never_singular;
        if (fine[i].ok())
            r.max_drift = std::max(r.max_drift, (tr.samples.back().x - fine[i].traj.samples.back().x).norm());
        else
            ++r.failures;
    }
    if (r.samples > 0) r.frac_end_singular = static_cast<double>(end_singular) / r.samples;

    const SkeletonCloud cloud = extract_skeleton(field, options.skeleton_res, exec);
    std::vector<Vec2> ys;
    const size_t m = cloud.points.size();
    const size_t want = std::min(m, static_cast<size_t>(options.samples));
    for (size_t k = 0; k < want; ++k) ys.push_back(cloud.points[k * m / want].x);
    r.skeleton_samples = static_cast<int>(ys.size());

    const double ts[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    FlowOptions fc = fo;
    for (double s : {0.25, 0.5, 0.75}) fc.checkpoints.push_back(s * r.horizon);
    const auto sk = integrate_batch(field, ys, r.horizon, fc, exec);
    int invariant = 0;
    for (const BatchTrajectory& b : sk) {
        if (!b.ok()) {
            ++r.failures;
            continue;
        }
        bool all = true;
        for (double s : ts) all = all && singular_at(b.traj, s * r.horizon);
        if (all) ++invariant;
    }
    if (r.skeleton_samples > 0) r.frac_skeleton_invariant = static_cast<double>(invariant) / r.skeleton_samples;
    return r;
}

nlohmann::ordered_json to_json(const RetractionReport& r)
{
    nlohmann::ordered_json j;
    j["samples"] = r.samples;
    j["skeleton_samples"] = r.skeleton_samples;
    j["failures"] = r.failures;
    j["diameter"] = r.diameter;
    j["horizon"] = r.horizon;
    j["identity_at_zero"] = r.identity_at_zero;
    j["frac_end_singular"] = r.frac_end_singular;
    j["frac_skeleton_invariant"] = r.frac_skeleton_invariant;
    j["max_drift"] = r.max_drift;
    j["max_first_singular_time"] = r.max_first_singular_time;
    j["never_singular"] = r.never_singular;
    return j;
}

void write_skeleton_csv(std::ostream& out, const SkeletonCloud& cloud)
{
    out << "x,y,speed_sq,delta\n";
    char buf[128];
    for (const SkeletonPoint& p : cloud.points) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", p.x.x(), p.x.y(), p.speed_sq, p.delta);
        out << buf;
    }
}

void write_svg(std::ostream& out, const Scene& scene, const SkeletonCloud* cloud, std::span<const Trajectory> trajectories)
{
    const BoundingBox box = scene.boundary.bbox();
    const Vec2 m = 0.05 * box.extent();
    const Vec2 lo = box.lo - m, hi = box.hi + m;
    const double w = hi.x() - lo.x(), h = hi.y() - lo.y();
    const double dot = 0.004 * std::max(w, h);
    char buf[256];
    // World y points up; flip inside the group.
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"%.9g %.9g %.9g %.9g\" width=\"800\" height=\"%d\">\n",
                  lo.x(), -hi.y(), w, h, static_cast<int>(std::lround(800.0 * h / w)));
    out << buf << "<g transform=\"scale(1,-1)\">\n<polygon fill=\"#f4f4f4\" stroke=\"black\" "
                  "vector-effect=\"non-scaling-stroke\" points=\"";
    for (const Vec2& v : scene.boundary.vertices()) {
        std::snprintf(buf, sizeof buf, "%.9g,%.9g ", v.x(), v.y());
        out << buf;
    }
    out << "\"/>\n";
    if (cloud) {
        out << "<g fill=\"#c0392b\">\n";
        for (const SkeletonPoint& p : cloud->points) {
            std::snprintf(buf, sizeof buf, "<circle cx=\"%.9g\" cy=\"%.9g\" r=\"%.4g\"/>\n", p.x.x(), p.x.y(), dot);
            out << buf;
        }
        out << "</g>\n";
    }
    for (const Trajectory& tr : trajectories) {
        out << "<polyline fill=\"none\" stroke=\"#2255aa\" vector-effect=\"non-scaling-stroke\" points=\"";
        for (const FlowSample& s : tr.samples) {
            std::snprintf(buf, sizeof buf, "%.9g,%.9g ", s.x.x(), s.x.y());
            out << buf;
        }
        out << "\"/>\n";
    }
    out << "</g>\n</svg>\n";
}

} // namespace sigflow
