#include "sigflow/lattice.hpp"

#include "sigflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace sigflow {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double seed_cells = 3.0;
constexpr double direct_cells = 2.0;

} // namespace

Lattice::Lattice(const Polygon& poly, const MetricField& metric, double h) : h_(h)
{
    const BoundingBox box = poly.bbox();
    origin_ = box.lo;
    nx_ = static_cast<int>(std::ceil(box.extent().x() / h_ - 1e-9)) + 1;
    ny_ = static_cast<int>(std::ceil(box.extent().y() / h_ - 1e-9)) + 1;
    const auto n = static_cast<size_t>(size());
    valid_.assign(n, 0);
    clearance_.assign(n, 0.0);
    weights_.assign(n * stencil_size, -1.0);

    const EdgeIndex edges(poly, Mat2::Identity(), 0.0);
    for (int idx = 0; idx < size(); ++idx) {
        const Vec2 p = node(idx);
        if (!poly.contains(p)) continue;
        double c = inf;
        for (const int e : edges.candidates(p))
            c = std::min(c, project_to_segment(p, poly.edge_start(e), poly.edge_end(e)).dist);
        clearance_[static_cast<size_t>(idx)] = c;
        valid_[static_cast<size_t>(idx)] = c > 1e-9 * h_ ? 1 : 0;
    }
    for (int idx = 0; idx < size(); ++idx) {
        if (!valid(idx)) continue;
        const int i = idx % nx_;
        const int j = idx / nx_;
        const Vec2 p = node(idx);
        for (int k = 0; k < stencil_size; ++k) {
            const int ni = i + stencil[static_cast<size_t>(k)][0];
            const int nj = j + stencil[static_cast<size_t>(k)][1];
            if (ni < 0 || nj < 0 || ni >= nx_ || nj >= ny_) continue;
            const int nb = index(ni, nj);
            if (!valid(nb)) continue;
            const Vec2 q = node(nb);
            const double len = (q - p).norm();
            if (std::min(clearance(idx), clearance(nb)) <= len && !poly.segment_clear(p, q)) continue;
            weights_[static_cast<size_t>(idx) * stencil_size + static_cast<size_t>(k)] =
                metric_norm(metric.at(0.5 * (p + q)), q - p);
        }
    }
}

std::vector<double> Lattice::shortest_paths(std::span<const std::pair<int, double>> sources, std::vector<int>* parent,
                                            int target) const
{
    std::vector<double> d(static_cast<size_t>(size()), inf);
    if (parent) parent->assign(static_cast<size_t>(size()), -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (const auto& [idx, value] : sources) {
        if (value < d[static_cast<size_t>(idx)]) {
            d[static_cast<size_t>(idx)] = value;
            heap.emplace(value, idx);
        }
    }
    while (!heap.empty()) {
        const auto [du, u] = heap.top();
        heap.pop();
        if (du > d[static_cast<size_t>(u)]) continue;
        if (u == target) break;
        for (int k = 0; k < stencil_size; ++k) {
            const double w = weight(u, k);
            if (w < 0.0) continue;
            const int v = neighbor(u, k);
            const double dv = du + w;
            if (dv < d[static_cast<size_t>(v)]) {
                d[static_cast<size_t>(v)] = dv;
                if (parent) (*parent)[static_cast<size_t>(v)] = u;
                heap.emplace(dv, v);
            }
        }
    }
    return d;
}

LatticeField::LatticeField(const Polygon& poly, const MetricField& metric, double h)
    : poly_(poly), metric_(metric), lattice_(poly, metric, h), euclid_index_(poly, Mat2::Identity(), 0.0)
{
    const auto n = static_cast<size_t>(lattice_.size());
    foot_.assign(n, Vec2::Zero());
    foot_s_.assign(n, 0.0);
    foot_edge_.assign(n, -1);
    std::vector<std::pair<int, double>> seeds;
    for (int idx = 0; idx < lattice_.size(); ++idx) {
        if (!lattice_.valid(idx) || lattice_.clearance(idx) > seed_cells * h) continue;
        const Vec2 p = lattice_.node(idx);
        const auto proj = direct_projections(p, metric_.at(p));
        const auto best = std::min_element(proj.begin(), proj.end(),
                                           [](const Direct& a, const Direct& b) { return a.dist < b.dist; });
        seeds.emplace_back(idx, best->dist);
        foot_[static_cast<size_t>(idx)] = best->foot;
        foot_s_[static_cast<size_t>(idx)] = best->arclength;
        foot_edge_[static_cast<size_t>(idx)] = best->edge;
    }
    dist_ = lattice_.shortest_paths(seeds, &parent_);
    // Propagate feet along the shortest-path tree in order of increasing distance.
    std::vector<int> order;
    order.reserve(n);
    for (int idx = 0; idx < lattice_.size(); ++idx)
        if (std::isfinite(dist_[static_cast<size_t>(idx)])) order.push_back(idx);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return dist_[static_cast<size_t>(a)] < dist_[static_cast<size_t>(b)]; });
    for (const int idx : order) {
        const int p = parent_[static_cast<size_t>(idx)];
        if (p < 0) continue;
        foot_[static_cast<size_t>(idx)] = foot_[static_cast<size_t>(p)];
        foot_s_[static_cast<size_t>(idx)] = foot_s_[static_cast<size_t>(p)];
        foot_edge_[static_cast<size_t>(idx)] = foot_edge_[static_cast<size_t>(p)];
    }
}

std::vector<LatticeField::Direct> LatticeField::direct_projections(const Vec2& x, const Mat2& a) const
{
    std::vector<Direct> out;
    out.reserve(static_cast<size_t>(poly_.size()));
    for (int e = 0; e < poly_.size(); ++e) {
        const auto p = project_to_segment(x, poly_.edge_start(e), poly_.edge_end(e), a);
        out.push_back({p.foot, p.dist, poly_.arclength(e, p.t), e});
    }
    return out;
}

double LatticeField::value(const Vec2& x) const
{
    if (!poly_.contains(x)) throw DomainError("point outside domain");
    double clear = inf;
    for (const int e : euclid_index_.candidates(x))
        clear = std::min(clear, project_to_segment(x, poly_.edge_start(e), poly_.edge_end(e)).dist);
    if (clear <= direct_cells * h()) {
        const auto proj = direct_projections(x, metric_.at(x));
        double best = inf;
        for (const auto& d : proj) best = std::min(best, d.dist);
        return best;
    }
    const Vec2 r = (x - lattice_.origin()) / h();
    const int i = std::min(static_cast<int>(std::floor(r.x())), lattice_.nx() - 2);
    const int j = std::min(static_cast<int>(std::floor(r.y())), lattice_.ny() - 2);
    const double u = r.x() - i;
    const double v = r.y() - j;
    auto d = [&](int di, int dj) { return dist_[static_cast<size_t>(lattice_.index(i + di, j + dj))]; };
    return (1 - u) * (1 - v) * d(0, 0) + u * (1 - v) * d(1, 0) + (1 - u) * v * d(0, 1) + u * v * d(1, 1);
}

std::vector<LatticeField::Candidate> LatticeField::candidates(const Vec2& x) const
{
    if (!poly_.contains(x)) throw DomainError("point outside domain");
    std::vector<Candidate> out;
    const Vec2 r = (x - lattice_.origin()) / h();
    const int i0 = static_cast<int>(std::floor(r.x()));
    const int j0 = static_cast<int>(std::floor(r.y()));
    for (int j = j0 - 1; j <= j0 + 2; ++j) {
        for (int i = i0 - 1; i <= i0 + 2; ++i) {
            if (i < 0 || j < 0 || i >= lattice_.nx() || j >= lattice_.ny()) continue;
            const int idx = lattice_.index(i, j);
            if (!lattice_.valid(idx) || !std::isfinite(dist_[static_cast<size_t>(idx)])) continue;
            const Vec2 p = lattice_.node(idx);
            const double len = (p - x).norm();
            if (lattice_.clearance(idx) <= len && !poly_.segment_clear(x, p)) continue;
            Candidate c;
            c.node = idx;
            c.cost = dist_[static_cast<size_t>(idx)] + metric_norm(metric_.at(0.5 * (p + x)), p - x);
            c.foot = foot_[static_cast<size_t>(idx)];
            c.arclength = foot_s_[static_cast<size_t>(idx)];
            c.edge = foot_edge_[static_cast<size_t>(idx)];
            out.push_back(c);
        }
    }
    double clear = inf;
    for (const int e : euclid_index_.candidates(x))
        clear = std::min(clear, project_to_segment(x, poly_.edge_start(e), poly_.edge_end(e)).dist);
    if (clear <= direct_cells * h()) {
        for (const auto& d : direct_projections(x, metric_.at(x))) out.push_back({d.foot, d.dist, d.arclength, d.edge, -1});
    }
    return out;
}

double LatticeField::cost_near(const Vec2& x, double arclength, double window) const
{
    const double per = poly_.perimeter();
    double best = inf;
    for (const Candidate& c : candidates(x)) {
        double d = std::fmod(std::abs(c.arclength - arclength), per);
        d = std::min(d, per - d);
        if (d <= window) best = std::min(best, c.cost);
    }
    return best;
}

Vec2 LatticeField::path_anchor(int node, int steps) const
{
    int m = node;
    for (int k = 0; k < steps; ++k) {
        const int p = parent_[static_cast<size_t>(m)];
        if (p < 0) return foot_[static_cast<size_t>(m)];
        m = p;
    }
    return lattice_.node(m);
}

int LatticeField::nearest_valid_node(const Vec2& x) const
{
    const Vec2 r = (x - lattice_.origin()) / h();
    const int i0 = static_cast<int>(std::lround(r.x()));
    const int j0 = static_cast<int>(std::lround(r.y()));
    int best = -1;
    double best_d = inf;
    for (int j = j0 - 2; j <= j0 + 2; ++j)
        for (int i = i0 - 2; i <= i0 + 2; ++i) {
            if (i < 0 || j < 0 || i >= lattice_.nx() || j >= lattice_.ny()) continue;
            const int idx = lattice_.index(i, j);
            if (!lattice_.valid(idx)) continue;
            const double d = (lattice_.node(idx) - x).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = idx;
            }
        }
    return best;
}

LatticeField::Path LatticeField::geodesic(int from, int to) const
{
    const std::pair<int, double> src[] = {{from, 0.0}};
    std::vector<int> parent;
    const auto d = lattice_.shortest_paths(src, &parent, to);
    Path path;
    if (!std::isfinite(d[static_cast<size_t>(to)])) return path;
    std::vector<int> nodes;
    for (int v = to; v >= 0; v = parent[static_cast<size_t>(v)]) nodes.push_back(v);
    std::reverse(nodes.begin(), nodes.end());
    for (const int v : nodes) {
        path.points.push_back(lattice_.node(v));
        path.cumulative.push_back(d[static_cast<size_t>(v)]);
    }
    return path;
}

Vec2 LatticeField::Path::at_fraction(double f) const
{
    if (points.size() == 1) return points.front();
    const double target = std::clamp(f, 0.0, 1.0) * length();
    const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), target);
    const auto k = static_cast<size_t>(std::max<std::ptrdiff_t>(1, it - cumulative.begin()));
    const double seg = cumulative[k] - cumulative[k - 1];
    const double w = seg > 0.0 ? (target - cumulative[k - 1]) / seg : 0.0;
    return points[k - 1] + std::clamp(w, 0.0, 1.0) * (points[k] - points[k - 1]);
}

double lattice_diameter(const Polygon& poly, const MetricField& metric, double h)
{
    const Lattice lat(poly, metric, h);
    std::vector<int> rim;
    double lmax = 0.0;
    for (int idx = 0; idx < lat.size(); ++idx) {
        if (!lat.valid(idx) || lat.clearance(idx) > 1.5 * h) continue;
        rim.push_back(idx);
        lmax = std::max(lmax, symmetric_eigenvalues(metric.at(lat.node(idx))).second);
    }
    if (rim.empty()) throw InputError("lattice spacing too coarse for the domain");
    // Every boundary point is within `reach` of a rim node: edge points within 1.5 h,
    // corners within their nearest-node gap.
    double reach = 1.5 * h;
    for (const Vec2& v : poly.vertices()) {
        double gap = inf;
        for (const int r : rim) gap = std::min(gap, (lat.node(r) - v).norm());
        reach = std::max(reach, gap);
    }
    const double margin = reach * std::sqrt(lmax);

    auto farthest = [&](int source) {
        const std::pair<int, double> src[] = {{source, 0.0}};
        const auto d = lat.shortest_paths(src, nullptr);
        double best = 0.0;
        int arg = source;
        for (const int r : rim)
            if (std::isfinite(d[static_cast<size_t>(r)]) && d[static_cast<size_t>(r)] > best) {
                best = d[static_cast<size_t>(r)];
                arg = r;
            }
        return std::pair{best, arg};
    };

    // Coarse sweep over rim sources, then every rim node near the best pair.
    const size_t stride = std::max<size_t>(1, rim.size() / 48);
    double best = 0.0;
    int best_src = rim.front();
    for (size_t k = 0; k < rim.size(); k += stride) {
        const auto [d, arg] = farthest(rim[k]);
        (void)arg;
        if (d > best) {
            best = d;
            best_src = rim[k];
        }
    }
    // Shrinking windows around the best source; each round probes a few rim nodes.
    double window = 1.5 * static_cast<double>(stride) * h;
    while (true) {
        const Vec2 centre = lat.node(best_src);
        std::vector<int> near;
        for (const int r : rim)
            if (r != best_src && (lat.node(r) - centre).norm() <= window) near.push_back(r);
        const bool last = window <= 2.0 * h;
        const size_t step = last ? 1 : std::max<size_t>(1, near.size() / 8);
        int next_src = best_src;
        for (size_t k = 0; k < near.size(); k += step) {
            const auto [d, arg] = farthest(near[k]);
            (void)arg;
            if (d > best) {
                best = d;
                next_src = near[k];
            }
        }
        best_src = next_src;
        if (last) break;
        window = std::max(2.0 * h, 0.25 * window);
    }
    return best + 2.0 * margin;
}

} // namespace sigflow
