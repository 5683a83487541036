#include "sigflow/mintime.hpp"

#include "sigflow/errors.hpp"
#include "sigflow/lattice.hpp"
#include "sigflow/topology.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

namespace sigflow {

namespace {

const ControlSpec& control_of(const DistanceField& field)
{
    const auto* c = std::get_if<ControlMetric>(&field.scene().metric.variant());
    if (!c) throw InputError("scene metric is not a control_field");
    return c->f;
}

// Control scenes, and sampled metrics standing for G of an isotropic control.
void require_time_metric(const DistanceField& field)
{
    const MetricKind k = field.scene().metric.kind();
    if (k != MetricKind::control_field && k != MetricKind::grid_sampled)
        throw InputError("minimum time needs a control_field or grid_sampled metric");
}

// H(x, p) with F F^T taken from the control when there is one, else from G^{-1}.
double scene_hamiltonian(const MetricField& metric, const Vec2& x, const Vec2& p)
{
    if (const auto* c = std::get_if<ControlMetric>(&metric.variant())) return hamiltonian(c->f, x, p);
    return p.dot(inverse2(metric.at(x)) * p);
}

} // namespace

MetricField metric_from_control(const ControlSpec& f)
{
    return MetricField(ControlMetric{f});
}

double min_time(const DistanceField& field, const Vec2& x)
{
    require_time_metric(field);
    return field.value(x);
}

double hamiltonian(const ControlSpec& f, const Vec2& x, const Vec2& p)
{
    const Mat2 m = f.at(x);
    return (m.transpose() * p).squaredNorm();
}

Vec2 hamiltonian_gradient(const ControlSpec& f, const Vec2& x, const Vec2& p)
{
    const Mat2 m = f.at(x);
    return 2.0 * m * (m.transpose() * p);
}

HjbReport hjb_residual(const DistanceField& field, int res, Execution exec)
{
    require_time_metric(field);
    const MetricField& metric = field.scene().metric;
    const BoundingBox box = field.scene().boundary.bbox();
    if (res == 0) res = static_cast<int>(std::lround(box.extent().maxCoeff() / field.scene().grid_h)) + 1;
    if (res < 5) throw InputError("HJB grid resolution must be at least 5");

    HjbReport r;
    r.resolution = res;
    r.spacing = box.extent() / (res - 1);
    const std::vector<Vec2> nodes = grid_nodes(box, res);
    const auto n = static_cast<size_t>(res);

    std::vector<char> inside(nodes.size());
    std::vector<Vec2> pts;
    std::vector<size_t> where;
    for (size_t i = 0; i < nodes.size(); ++i) {
        inside[i] = field.contains(nodes[i]);
        if (inside[i]) {
            pts.push_back(nodes[i]);
            where.push_back(i);
        }
    }
    const std::vector<SingularityTest> cls = classify_points(field, pts, exec);

    // Regular nodes more than two cells (Chebyshev) from any singular or ambiguous node.
    std::vector<char> blocked(nodes.size(), 0);
    for (size_t k = 0; k < pts.size(); ++k) {
        if (cls[k].cls == PointClass::regular) continue;
        const long i0 = static_cast<long>(where[k] % n), j0 = static_cast<long>(where[k] / n);
        for (long j = std::max(0L, j0 - 2); j <= std::min<long>(res - 1, j0 + 2); ++j)
            for (long i = std::max(0L, i0 - 2); i <= std::min<long>(res - 1, i0 + 2); ++i)
                blocked[static_cast<size_t>(j) * n + static_cast<size_t>(i)] = 1;
    }

    std::vector<double> t(nodes.size(), 0.0);
    for (size_t k = 0; k < pts.size(); ++k) t[where[k]] = field.value(pts[k]);

    double sum = 0.0;
    for (size_t j = 1; j + 1 < n; ++j)
        for (size_t i = 1; i + 1 < n; ++i) {
            const size_t c = j * n + i;
            if (!inside[c]) continue;
            const size_t st[] = {c - 1, c + 1, c - n, c + n};
            bool ok = !blocked[c];
            for (size_t s : st) ok = ok && inside[s] && !blocked[s];
            if (!ok) {
                ++r.excluded;
                continue;
            }
            const Vec2 grad((t[c + 1] - t[c - 1]) / (2.0 * r.spacing.x()), (t[c + n] - t[c - n]) / (2.0 * r.spacing.y()));
            const double e = std::abs(scene_hamiltonian(metric, nodes[c], grad) - 1.0);
            ++r.checked;
            sum += e;
            if (e > r.max_residual) {
                r.max_residual = e;
                r.worst = nodes[c];
            }
        }
    if (r.checked > 0) r.mean_residual = sum / r.checked;
    return r;
}

CharacteristicReport check_characteristic_form(const DistanceField& field, const Trajectory& traj)
{
    const ControlSpec& f = control_of(field);
    CharacteristicReport r;
    for (const FlowSample& s : traj.samples) {
        const SuperdiffFan fan = field.fan(s.x);
        const Vec2 g = hamiltonian_gradient(f, s.x, fan.covector);
        r.max_error = std::max(r.max_error, (g - 2.0 * fan.velocity).norm());
        ++r.samples;
    }
    return r;
}

CoshReport check_cosh_semiconcavity(const DistanceField& field, int triples, std::uint64_t seed,
                                    std::optional<double> alpha)
{
    const Scene& sc = field.scene();
    if (!alpha) alpha = sc.curvature_bound;
    if (!alpha || !(*alpha > 0.0)) throw InputError("cosh semiconcavity needs a positive curvature bound");
    CoshReport r;
    r.alpha = *alpha;

    std::shared_ptr<const LatticeField> own;
    const LatticeField* lf = field.lattice();
    if (!lf) {
        own = std::make_shared<LatticeField>(sc.boundary, sc.metric, sc.grid_h);
        lf = own.get();
    }
    const Lattice& lat = lf->lattice();
    std::vector<int> valid;
    for (int i = 0; i < lat.size(); ++i)
        if (lat.valid(i)) valid.push_back(i);
    if (valid.size() < 2) throw InputError("lattice has fewer than two interior nodes");

    auto v = [&](const Vec2& x) { return std::cosh(r.alpha * field.value(x)); };
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<size_t> pick(0, valid.size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < triples; ++k) {
        const int a = valid[pick(rng)];
        int b = valid[pick(rng)];
        while (b == a) b = valid[pick(rng)];
        const double t = unit(rng);
        const LatticeField::Path path = lf->geodesic(a, b);
        if (path.points.size() < 2) continue;
        double vmax = 0.0;
        for (const Vec2& p : path.points) vmax = std::max(vmax, v(p));
        const double kk = r.alpha * r.alpha * vmax;
        const double len = path.length();
        const double lhs = (1.0 - t) * v(path.points.front()) + t * v(path.points.back()) - v(path.at_fraction(t));
        const double rhs = t * (1.0 - t) * kk * len * len / 2.0;
        r.max_violation = std::max(r.max_violation, lhs - rhs);
        ++r.triples;
    }
    r.worst_ratio = r.max_violation / sc.grid_h;
    return r;
}

} // namespace sigflow
