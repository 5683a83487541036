#include "sigflow/flow.hpp"

#include "sigflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

namespace sigflow {

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();
constexpr int max_tiny_steps = 64;
constexpr double support_floor = 1e-12;

FlowSample make_sample(double t, const SuperdiffFan& f)
{
    FlowSample s;
    s.t = t;
    s.x = f.x;
    s.v = f.velocity;
    s.delta = f.delta;
    s.speed_sq = f.speed_sq;
    s.singular = f.singular;
    s.ambiguous = f.ambiguous;
    s.generators = static_cast<int>(f.generators.size());
    return s;
}

std::vector<Feature> support(const SuperdiffFan& f)
{
    std::vector<Feature> s;
    for (size_t i = 0; i < f.generators.size(); ++i)
        if (f.weights[i] > support_floor) s.push_back(f.generator_features[i]);
    std::sort(s.begin(), s.end());
    return s;
}

bool subset(const std::vector<Feature>& a, const std::vector<Feature>& b)
{
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// Newton iteration onto the bisector {d_f1 = d_f2}; the gradient of d_f is its covector.
Vec2 slide(const DistanceField& field, const Feature& f1, const Feature& f2, Vec2 x)
{
    for (int it = 0; it < 4; ++it) {
        const double g = field.feature_distance(f1, x) - field.feature_distance(f2, x);
        const Vec2 grad = field.feature_covector(f1, x) - field.feature_covector(f2, x);
        const double gg = grad.squaredNorm();
        if (!(gg > 1e-24)) break;
        const Vec2 dx = g * grad / gg;
        x -= dx;
        if (dx.norm() <= 4.0 * eps * (1.0 + x.norm())) break;
    }
    return x;
}

// Lattice counterpart of slide: equalise the costs of the two clusters, each identified by
// its foot arclength. Candidates go to the nearer cluster; the gradient is frozen at the
// covector difference of the current fan.
Vec2 slide_lattice(const LatticeField& lf, double s1, double s2, const Vec2& grad, Vec2 x)
{
    const double per = lf.polygon().perimeter();
    double gap = std::fmod(std::abs(s1 - s2), per);
    gap = std::min(gap, per - gap);
    const double gg = grad.squaredNorm();
    if (!(gg > 1e-24)) return x;
    for (int it = 0; it < 4; ++it) {
        const double c1 = lf.cost_near(x, s1, 0.5 * gap);
        const double c2 = lf.cost_near(x, s2, 0.5 * gap);
        if (!std::isfinite(c1) || !std::isfinite(c2)) break;
        const Vec2 dx = (c1 - c2) * grad / gg;
        const Vec2 y = x - dx;
        if (!lf.polygon().contains(y)) break;
        x = y;
        if (dx.norm() <= 1e-12 * lf.h()) break;
    }
    return x;
}

} // namespace

double halt_threshold(const DistanceField& field)
{
    const Tolerances& tol = field.tolerances();
    if (field.backend() == Backend::exact) return tol.eps_halt;
    // A lattice generator points at a path node smooth_steps links away; the path strays up
    // to about half a cell from its chord, so directions are good to ~1 / (2 smooth_steps)
    // and opposite generators can leave that much squared as residual speed.
    const double theta = 1.0 / (2.0 * tol.smooth_steps);
    return std::max(tol.eps_halt, theta * theta);
}

Vec2 Trajectory::position_at(double t) const
{
    if (samples.empty()) return Vec2::Zero();
    if (t <= samples.front().t) return samples.front().x;
    if (t >= samples.back().t) return samples.back().x;
    const auto it = std::lower_bound(samples.begin(), samples.end(), t, [](const FlowSample& s, double v) { return s.t < v; });
    if (it->t == t) return it->x;
    const auto& b = *it;
    const auto& a = *(it - 1);
    const double w = (t - a.t) / (b.t - a.t);
    return a.x + w * (b.x - a.x);
}

std::optional<double> Trajectory::first_singular_time() const
{
    for (const auto& s : samples)
        if (s.singular) return s.t;
    return std::nullopt;
}

double max_step(const DistanceField& field, double c_cfl)
{
    return c_cfl * field.diameter();
}

Trajectory integrate(const DistanceField& field, const Vec2& x0, double t_max, const FlowOptions& opt)
{
    if (!(t_max > 0.0)) throw InputError("t_max must be positive");
    if (!(opt.dt > 0.0)) throw InputError("dt must be positive");
    if (!(opt.c_cfl > 0.0)) throw InputError("c_cfl must be positive");
    if (opt.dt > max_step(field, opt.c_cfl)) throw InputError("dt exceeds c_cfl * diameter");

    const bool exact = field.backend() == Backend::exact;
    Trajectory traj;
    traj.backend = field.backend();
    traj.dt = opt.dt;
    traj.c_cfl = opt.c_cfl;
    traj.t_max = t_max;

    std::vector<double> checkpoints;
    for (const double c : opt.checkpoints)
        if (c > 0.0 && c < t_max) checkpoints.push_back(c);
    std::sort(checkpoints.begin(), checkpoints.end());
    size_t next_cp = 0;

    SuperdiffFan fan = field.fan(x0);
    double t = 0.0;
    traj.samples.push_back(make_sample(t, fan));
    int tiny = 0;
    double last_event = 0.0;

    while (t < t_max) {
        if (fan.speed_sq < halt_threshold(field)) {
            // Critical point: the arc is constant from here on.
            traj.halt_time = t;
            for (; next_cp < checkpoints.size(); ++next_cp)
                if (checkpoints[next_cp] > t) traj.samples.push_back(make_sample(checkpoints[next_cp], fan));
            traj.samples.push_back(make_sample(t_max, fan));
            break;
        }
        while (next_cp < checkpoints.size() && checkpoints[next_cp] <= t) ++next_cp;
        const double stop = next_cp < checkpoints.size() ? checkpoints[next_cp] : t_max;
        double step = std::min({opt.dt, opt.c_cfl * fan.delta, stop - t});
        bool lands = step == stop - t;

        const std::vector<Feature> sup = support(fan);
        const bool sliding = sup.size() == 2 && (exact || fan.singular);
        double s1 = 0.0, s2 = 0.0;
        Vec2 grad = Vec2::Zero();
        if (sliding && !exact) {
            const ProjectionSet ps = field.project(fan.x);
            for (const auto& q : ps.projections) {
                if (q.feature == sup[0]) s1 = q.arclength;
                if (q.feature == sup[1]) s2 = q.arclength;
            }
            for (size_t i = 0; i < fan.generators.size(); ++i) {
                if (fan.generator_features[i] == sup[0]) grad += fan.generators[i];
                if (fan.generator_features[i] == sup[1]) grad -= fan.generators[i];
            }
        }
        auto position = [&](double h) {
            Vec2 y = fan.x + h * fan.velocity;
            if (sliding) y = exact ? slide(field, sup[0], sup[1], y) : slide_lattice(*field.lattice(), s1, s2, grad, y);
            return y;
        };
        // Exact backend: the support must persist and no new feature may appear.
        // Lattice backend: singular flag and generator count must persist.
        // The probe keeps whatever the fan at y needs, so the accepted point is not recomputed.
        struct Probe {
            ProjectionSet ps;
            std::optional<SuperdiffFan> fan;
        };
        auto probe = [&](const Vec2& y) {
            Probe p;
            try {
                if (exact) p.ps = field.project(y);
                else p.fan = field.fan(y);
            } catch (const DomainError&) {
                char buf[96];
                std::snprintf(buf, sizeof buf, "step left the domain near t=%.6g", t);
                throw FlowError(buf);
            }
            return p;
        };
        auto consistent = [&](const Probe& p) {
            if (!exact) return p.fan->singular == fan.singular && p.fan->generators.size() == fan.generators.size();
            std::vector<Feature> feats;
            for (const auto& q : p.ps.projections) feats.push_back(q.feature);
            std::sort(feats.begin(), feats.end());
            return subset(sup, feats) && subset(feats, fan.all_features);
        };

        Vec2 y = position(step);
        Probe at = probe(y);
        if (opt.resolve_events && !consistent(at)) {
            // Land just past the first point where the fan changes.
            const double res = exact ? 10.0 * eps * fan.delta : 1e-6 * field.scene().grid_h;
            double lo = 0.0;
            double hi = step;
            // Crossings tend to cluster (fans filling in near a vertex of the skeleton);
            // search upward from the previous event's length before bisecting.
            for (double h = last_event; h > res && h < 0.5 * hi; h *= 2.0) {
                Probe pm = probe(position(h));
                if (!consistent(pm)) {
                    hi = h;
                    at = std::move(pm);
                    break;
                }
                lo = h;
            }
            while (hi - lo > res) {
                const double mid = 0.5 * (lo + hi);
                Probe pm = probe(position(mid));
                if (consistent(pm)) {
                    lo = mid;
                } else {
                    hi = mid;
                    at = std::move(pm);
                }
            }
            if (hi < step) lands = false;
            // A crossing that cannot be separated from the current point means the
            // selection is chattering rather than moving.
            if (hi <= 4.0 * res) {
                if (++tiny > max_tiny_steps) throw FlowError("fan ambiguity persists after step refinement");
            } else {
                tiny = 0;
            }
            step = hi;
            last_event = hi;
        } else {
            tiny = 0;
            last_event = 0.0;
        }
        SuperdiffFan next = exact ? field.fan(at.ps) : std::move(*at.fan);
        t = lands ? stop : t + step;
        fan = std::move(next);
        traj.samples.push_back(make_sample(t, fan));
    }
    return traj;
}

SingularityTest is_singular(const DistanceField& field, const Vec2& x)
{
    const SuperdiffFan f = field.fan(x);
    SingularityTest r;
    r.speed_sq = f.speed_sq;
    r.generators = static_cast<int>(f.generators.size());
    r.cls = f.singular ? PointClass::singular : (f.ambiguous ? PointClass::ambiguous : PointClass::regular);
    return r;
}

double logistic_bound(double s0, double integral)
{
    if (s0 <= 0.0) return 0.0;
    return 1.0 / (1.0 + (1.0 - s0) / s0 * std::exp(-integral));
}

BoundReport verify_speed_bound(const Trajectory& traj, const Scene& scene, double tolerance)
{
    if (traj.samples.empty()) throw InputError("empty trajectory");
    const Tolerances tol;
    const double s0 = traj.samples.front().speed_sq;
    if (!(s0 < 1.0 - tol.eps_sing)) throw InputError("trajectory does not start at a singular point");
    BoundReport r;
    r.riemannian = scene.metric.kind() != MetricKind::euclidean;
    if (r.riemannian) {
        if (!scene.curvature_bound) throw InputError("Riemannian speed bound needs a curvature_bound");
        r.curvature_bound = *scene.curvature_bound;
    }
    r.s0 = s0;
    r.tolerance = tolerance;
    const double alpha = r.curvature_bound;
    auto integrand = [&](double delta) {
        return r.riemannian ? 2.0 * alpha / std::tanh(alpha * delta) : 2.0 / delta;
    };
    double acc = 0.0;
    r.min_margin = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < traj.samples.size(); ++k) {
        const auto& s = traj.samples[k];
        if (k > 0) {
            const auto& p = traj.samples[k - 1];
            acc += 0.5 * (s.t - p.t) * (integrand(p.delta) + integrand(s.delta));
        }
        const double b = logistic_bound(s0, acc);
        r.t.push_back(s.t);
        r.measured.push_back(s.speed_sq);
        r.integral.push_back(acc);
        r.bound.push_back(b);
        r.min_margin = std::min(r.min_margin, b - s.speed_sq);
    }
    r.pass = r.min_margin >= -tolerance;
    return r;
}

SemiconcavityReport check_semiconcavity_pairs(const DistanceField& field, std::span<const std::pair<Vec2, Vec2>> pairs,
                                              double tolerance)
{
    if (field.scene().metric.kind() != MetricKind::euclidean) throw InputError("semiconcavity pairs need a Euclidean scene");
    SemiconcavityReport r;
    r.tolerance = tolerance;
    r.max_violation = -std::numeric_limits<double>::infinity();
    const Polygon& poly = field.scene().boundary;
    for (const auto& [x, y] : pairs) {
        if (x != y && !poly.segment_clear(x, y)) {
            ++r.pairs_skipped;
            continue;
        }
        const SuperdiffFan fx = field.fan(x);
        const SuperdiffFan fy = field.fan(y);
        const Vec2 d = x - y;
        for (const auto& p : fx.generators)
            for (const auto& q : fy.generators)
                r.max_violation = std::max(r.max_violation, (fx.delta * p - fy.delta * q).dot(d) - d.squaredNorm());
        ++r.pairs_checked;
    }
    if (r.pairs_checked == 0) r.max_violation = 0.0;
    r.pass = r.max_violation <= tolerance;
    return r;
}

DependenceReport check_continuous_dependence(const DistanceField& field, const Vec2& x, double radius, double t_max,
                                             const FlowOptions& options, int seeds, std::optional<double> bound)
{
    DependenceReport r;
    r.bound = bound;
    if (!(radius > 0.0) || seeds <= 0) return r;
    const Trajectory base = integrate(field, x, t_max, options);
    for (int k = 0; k < seeds; ++k) {
        const double th = 2.0 * std::numbers::pi * k / seeds;
        const Vec2 y = x + radius * Vec2(std::cos(th), std::sin(th));
        if (!field.contains(y)) continue;
        const Trajectory other = integrate(field, y, t_max, options);
        const double gap0 = (x - y).norm();
        auto ratio_at = [&](double t) { return (base.position_at(t) - other.position_at(t)).norm() / gap0; };
        for (const auto& s : base.samples) r.max_ratio = std::max(r.max_ratio, ratio_at(s.t));
        for (const auto& s : other.samples) r.max_ratio = std::max(r.max_ratio, ratio_at(s.t));
        ++r.seeds;
    }
    r.pass = !bound || r.max_ratio <= *bound;
    return r;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj)
{
    out << "t,x,y,vx,vy,delta,speed_sq,singular\n";
    char buf[512];
    for (const auto& s : traj.samples) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", s.t, s.x.x(), s.x.y(), s.v.x(), s.v.y(),
                      s.delta, s.speed_sq, s.singular ? 1 : 0);
        out << buf;
    }
}

} // namespace sigflow
