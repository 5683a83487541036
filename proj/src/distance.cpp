#include "sigflow/distance.hpp"

#include "sigflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace sigflow {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double two_pi = 2.0 * std::numbers::pi;

// Lt with A^-1 = Lt^T Lt, so <A^-1 p, q> = (Lt p) . (Lt q).
Mat2 inverse_factor(const Mat2& a)
{
    Mat2 ainv = inverse2(a);
    ainv(0, 1) = ainv(1, 0) = 0.5 * (ainv(0, 1) + ainv(1, 0));
    return Eigen::LLT<Mat2>(ainv).matrixU();
}

double cross(const Vec2& a, const Vec2& b)
{
    return a.x() * b.y() - a.y() * b.x();
}

// Side of a counterclockwise boundary that x lies on, decided at a nearest point:
// the open segment from x to its nearest boundary point meets no other boundary point.
bool inside_near(const Polygon& poly, int e, double t, const Vec2& x)
{
    if (t > 0.0 && t < 1.0) return cross(poly.edge_end(e) - poly.edge_start(e), x - poly.edge_start(e)) > 0.0;
    const int v = t <= 0.0 ? e : poly.wrap(e + 1);
    const Vec2 w = x - poly.vertex(v);
    const Vec2 d0 = poly.vertex(v) - poly.vertex(v - 1);
    const Vec2 d1 = poly.vertex(v + 1) - poly.vertex(v);
    const bool left0 = cross(d0, w) > 0.0;
    const bool left1 = cross(d1, w) > 0.0;
    return cross(d0, d1) >= 0.0 ? left0 && left1 : left0 || left1;
}

double wrap_angle(double t)
{
    t = std::fmod(t, two_pi);
    return t < 0.0 ? t + two_pi : t;
}

} // namespace

std::string_view to_string(Backend b)
{
    return b == Backend::exact ? "exact" : "lattice";
}

std::vector<int> reduce_unit_fan(const std::vector<Vec2>& generators, const Mat2& a)
{
    const Mat2 lt = inverse_factor(a);
    const int n = static_cast<int>(generators.size());
    std::vector<double> theta(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const Vec2 z = lt * generators[static_cast<size_t>(i)];
        theta[static_cast<size_t>(i)] = wrap_angle(std::atan2(z.y(), z.x()));
    }
    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return theta[static_cast<size_t>(i)] < theta[static_cast<size_t>(j)]; });

    int gap_at = 0;
    double gap = -1.0;
    for (int k = 0; k < n; ++k) {
        const double t0 = theta[static_cast<size_t>(order[static_cast<size_t>(k)])];
        const double t1 = k + 1 < n ? theta[static_cast<size_t>(order[static_cast<size_t>(k + 1)])]
                                    : theta[static_cast<size_t>(order[0])] + two_pi;
        if (t1 - t0 > gap) {
            gap = t1 - t0;
            gap_at = k;
        }
    }
    const int ia = order[static_cast<size_t>(gap_at)];
    const int ib = order[static_cast<size_t>((gap_at + 1) % n)];
    if (gap >= std::numbers::pi || n < 3) return {ia, ib};

    // The origin lies in the hull; a generator facing the gap closes a triangle around it.
    const double target = wrap_angle(theta[static_cast<size_t>(ia)] + 0.5 * gap + std::numbers::pi);
    int ic = -1;
    double best = inf;
    for (int i = 0; i < n; ++i) {
        if (i == ia || i == ib) continue;
        double d = std::abs(theta[static_cast<size_t>(i)] - target);
        d = std::min(d, two_pi - d);
        if (d < best) {
            best = d;
            ic = i;
        }
    }
    return {ia, ib, ic};
}

DistanceField::DistanceField(Scene scene, std::optional<Backend> backend, Tolerances tol)
    : scene_(std::move(scene)), tol_(tol)
{
    const bool constant = scene_.metric.is_constant();
    if (backend == Backend::exact && !constant) throw InputError("exact backend requires a constant metric");
    backend_ = backend.value_or(constant ? Backend::exact : Backend::lattice);
    if (constant) a_ = scene_.metric.at(scene_.boundary.vertex(0));
    if (backend_ == Backend::exact) index_ = EdgeIndex(scene_.boundary, a_, tol_.tau_proj);
    else lattice_ = std::make_shared<const LatticeField>(scene_.boundary, scene_.metric, scene_.grid_h);
}

double DistanceField::value(const Vec2& x) const
{
    if (backend_ == Backend::lattice) return lattice_->value(x);
    if (!contains(x)) throw DomainError("point outside domain");
    const Polygon& poly = scene_.boundary;
    double best = inf;
    for (const int e : index_.candidates(x))
        best = std::min(best, project_to_segment(x, poly.edge_start(e), poly.edge_end(e), a_).dist);
    return best;
}

double DistanceField::feature_distance(const Feature& f, const Vec2& x) const
{
    const Polygon& poly = scene_.boundary;
    switch (f.kind) {
    case Feature::Kind::edge: return project_to_segment(x, poly.edge_start(f.index), poly.edge_end(f.index), a_).dist;
    case Feature::Kind::vertex: return metric_norm(a_, x - poly.vertex(f.index));
    case Feature::Kind::lattice: break;
    }
    throw InputError("feature distance is defined for exact features only");
}

Vec2 DistanceField::feature_covector(const Feature& f, const Vec2& x) const
{
    const Polygon& poly = scene_.boundary;
    Vec2 foot;
    switch (f.kind) {
    case Feature::Kind::edge: foot = project_to_segment(x, poly.edge_start(f.index), poly.edge_end(f.index), a_).foot; break;
    case Feature::Kind::vertex: foot = poly.vertex(f.index); break;
    case Feature::Kind::lattice: throw InputError("feature covector is defined for exact features only");
    }
    const Vec2 w = x - foot;
    return a_ * w / metric_norm(a_, w);
}

double DistanceField::diameter() const
{
    std::call_once(*diameter_once_, [this] { *diameter_ = sigflow::diameter(scene_); });
    return *diameter_;
}

ProjectionSet DistanceField::project_exact(const Vec2& x) const
{
    const Polygon& poly = scene_.boundary;
    const BoundingBox box = poly.bbox();
    if (!(x.x() > box.lo.x() && x.x() < box.hi.x() && x.y() > box.lo.y() && x.y() < box.hi.y()))
        throw DomainError("point outside domain");
    struct Raw {
        SegmentProjection sp;
        int edge;
    };
    const std::span<const int> cand = index_.candidates(x);
    std::vector<Raw> all;
    all.reserve(cand.size());
    double best = inf;
    size_t nearest = 0;
    for (const int e : cand) {
        const auto sp = project_to_segment(x, poly.edge_start(e), poly.edge_end(e), a_);
        all.push_back({sp, e});
        if (sp.dist < best) {
            best = sp.dist;
            nearest = all.size() - 1;
        }
    }
    if (!(best > 0.0) || !inside_near(poly, all[nearest].edge, all[nearest].sp.t, x))
        throw DomainError("point outside domain");
    ProjectionSet ps;
    ps.x = x;
    ps.delta = best;
    ps.backend = Backend::exact;
    for (const auto& [sp, e] : all) {
        if (sp.dist > best * (1.0 + tol_.tau_proj)) continue;
        Feature f{Feature::Kind::edge, e};
        if (sp.t <= 0.0) f = {Feature::Kind::vertex, e};
        else if (sp.t >= 1.0) f = {Feature::Kind::vertex, poly.wrap(e + 1)};
        ps.projections.push_back({sp.foot, sp.dist, f, poly.arclength(e, sp.t)});
    }
    std::sort(ps.projections.begin(), ps.projections.end(), [](const Projection& a, const Projection& b) {
        return a.dist < b.dist || (a.dist == b.dist && a.feature < b.feature);
    });
    // A vertex reached from both of its edges is one projection.
    std::vector<Projection> unique;
    for (const auto& p : ps.projections) {
        const bool seen = std::any_of(unique.begin(), unique.end(), [&](const Projection& q) { return q.feature == p.feature; });
        if (!seen) unique.push_back(p);
    }
    ps.projections = std::move(unique);
    return ps;
}

ProjectionSet DistanceField::project(const Vec2& x) const
{
    if (backend_ == Backend::exact) return project_exact(x);
    const SuperdiffFan f = fan_lattice(x);
    ProjectionSet ps;
    ps.x = x;
    ps.delta = f.delta;
    ps.backend = Backend::lattice;
    const auto cands = lattice_->candidates(x);
    for (const Feature& feat : f.generator_features) {
        // Representative foot of each cluster: the cheapest candidate on that feature.
        const LatticeField::Candidate* best = nullptr;
        for (const auto& c : cands)
            if (c.edge == feat.index && (!best || c.cost < best->cost)) best = &c;
        if (best) ps.projections.push_back({best->foot, best->cost, feat, best->arclength});
    }
    return ps;
}

void DistanceField::finish(SuperdiffFan& fan, std::vector<Vec2> gens, std::vector<Feature> feats) const
{
    const Mat2& a = fan.metric;
    const Mat2 lt = inverse_factor(a);
    fan.all_features = feats;
    // Chain clustering by metric angle; each cluster keeps its earliest (closest) member.
    const size_t n = gens.size();
    std::vector<double> theta(n);
    for (size_t i = 0; i < n; ++i) {
        const Vec2 z = lt * gens[i];
        theta[i] = wrap_angle(std::atan2(z.y(), z.x()));
    }
    std::vector<size_t> by_angle(n);
    std::iota(by_angle.begin(), by_angle.end(), size_t{0});
    std::stable_sort(by_angle.begin(), by_angle.end(), [&](size_t i, size_t j) { return theta[i] < theta[j]; });
    std::vector<size_t> cluster(n, 0);
    size_t count = 0;
    for (size_t k = 0; k < n; ++k) {
        if (k > 0 && theta[by_angle[k]] - theta[by_angle[k - 1]] >= tol_.theta_dedup) ++count;
        cluster[by_angle[k]] = count;
    }
    if (n > 1 && count > 0 && theta[by_angle[0]] + two_pi - theta[by_angle[n - 1]] < tol_.theta_dedup)
        for (size_t k = 0; k < n; ++k)
            if (cluster[k] == count) cluster[k] = 0;
    std::vector<char> taken(count + 1, 0);
    for (size_t i = 0; i < n; ++i) {
        if (taken[cluster[i]]) continue;
        taken[cluster[i]] = 1;
        fan.generators.push_back(gens[i]);
        fan.generator_features.push_back(feats[i]);
    }
    std::sort(fan.all_features.begin(), fan.all_features.end());
    fan.all_features.erase(std::unique(fan.all_features.begin(), fan.all_features.end()), fan.all_features.end());

    std::vector<int> used(fan.generators.size());
    std::iota(used.begin(), used.end(), 0);
    if (static_cast<int>(used.size()) > tol_.max_generators) used = reduce_unit_fan(fan.generators, a);
    std::vector<Vec2> sub;
    for (const int i : used) sub.push_back(fan.generators[static_cast<size_t>(i)]);
    const SimplexSolution sol = min_norm_point(sub, a, tol_.max_generators);

    fan.weights.assign(fan.generators.size(), 0.0);
    for (size_t k = 0; k < used.size(); ++k) fan.weights[static_cast<size_t>(used[k])] = sol.weights[k];
    fan.covector = sol.point;
    fan.velocity = sol.velocity;
    fan.speed_sq = sol.objective;
    fan.singular = fan.speed_sq < 1.0 - tol_.eps_sing;
    fan.ambiguous = fan.generators.size() >= 2 && !fan.singular;
}

SuperdiffFan DistanceField::fan(const Vec2& x) const
{
    if (backend_ == Backend::lattice) return fan_lattice(x);
    return fan(project_exact(x));
}

SuperdiffFan DistanceField::fan(const ProjectionSet& ps) const
{
    if (ps.backend != Backend::exact || backend_ != Backend::exact) throw InputError("fan from projections needs the exact backend");
    const Vec2& x = ps.x;
    SuperdiffFan f;
    f.x = x;
    f.delta = ps.delta;
    f.metric = a_;
    f.backend = Backend::exact;
    std::vector<Vec2> gens;
    std::vector<Feature> feats;
    for (const auto& p : ps.projections) {
        const Vec2 w = x - p.foot;
        gens.push_back(a_ * w / metric_norm(a_, w));
        feats.push_back(p.feature);
    }
    finish(f, std::move(gens), std::move(feats));
    return f;
}

SuperdiffFan DistanceField::fan_lattice(const Vec2& x) const
{
    const auto cands = lattice_->candidates(x);
    SuperdiffFan f;
    f.x = x;
    f.metric = scene_.metric.at(x);
    f.delta = lattice_->value(x);
    f.backend = Backend::lattice;
    if (cands.empty()) throw DomainError("point has no lattice neighbours inside the domain");

    const double h = lattice_->h();
    const double slack = 2.0 * h * std::sqrt(symmetric_eigenvalues(f.metric).second);
    double cmin = inf;
    for (const auto& c : cands) cmin = std::min(cmin, c.cost);
    std::vector<const LatticeField::Candidate*> near;
    for (const auto& c : cands)
        if (c.cost <= cmin + slack) near.push_back(&c);
    std::stable_sort(near.begin(), near.end(), [](auto* a, auto* b) { return a->arclength < b->arclength; });

    // Clusters of feet separated by boundary gaps larger than g_gap.
    const double perimeter = scene_.boundary.perimeter();
    const double g_gap = 4.0 * h + 0.1 * f.delta;
    const size_t n = near.size();
    size_t start = 0;
    double widest = -1.0;
    for (size_t k = 0; k < n; ++k) {
        const double next = k + 1 < n ? near[k + 1]->arclength : near[0]->arclength + perimeter;
        const double gap = next - near[k]->arclength;
        if (gap > widest) {
            widest = gap;
            start = (k + 1) % n;
        }
    }
    std::vector<std::vector<const LatticeField::Candidate*>> clusters(1);
    for (size_t m = 0; m < n; ++m) {
        const auto* c = near[(start + m) % n];
        if (m > 0) {
            const auto* prev = near[(start + m - 1) % n];
            double gap = c->arclength - prev->arclength;
            if (gap < 0.0) gap += perimeter;
            if (gap > g_gap) clusters.emplace_back();
        }
        clusters.back().push_back(c);
    }

    std::vector<Vec2> gens;
    std::vector<Feature> feats;
    std::vector<double> costs;
    for (const auto& cl : clusters) {
        const auto* rep = *std::min_element(cl.begin(), cl.end(), [](auto* a, auto* b) { return a->cost < b->cost; });
        Vec2 anchor = rep->node >= 0 ? lattice_->path_anchor(rep->node, tol_.smooth_steps) : rep->foot;
        if ((x - anchor).norm() <= 1e-12 * h) anchor = rep->foot;
        const Vec2 w = x - anchor;
        gens.push_back(f.metric * w / metric_norm(f.metric, w));
        feats.push_back({Feature::Kind::lattice, rep->edge});
        costs.push_back(rep->cost);
    }
    // Cheapest cluster first, so dedup keeps the best representative.
    std::vector<size_t> order(gens.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return costs[a] < costs[b]; });
    std::vector<Vec2> g2;
    std::vector<Feature> f2;
    for (const size_t i : order) {
        g2.push_back(gens[i]);
        f2.push_back(feats[i]);
    }
    finish(f, std::move(g2), std::move(f2));
    return f;
}

ProjectionSet project(const Scene& scene, const Vec2& x)
{
    return DistanceField(scene).project(x);
}

SuperdiffFan superdifferential(const Scene& scene, const Vec2& x)
{
    return DistanceField(scene).fan(x);
}

} // namespace sigflow
