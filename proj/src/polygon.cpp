#include "sigflow/polygon.hpp"

#include <limits>

namespace sigflow {

SegmentProjection project_to_segment(const Vec2& x, const Vec2& a, const Vec2& b, const Mat2& m)
{
    const Vec2 d = b - a;
    const double dd = d.dot(m * d);
    double t = dd > 0.0 ? (x - a).dot(m * d) / dd : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    SegmentProjection p;
    p.t = t;
    p.foot = t == 0.0 ? a : (t == 1.0 ? b : Vec2(a + t * d));
    p.dist = metric_norm(m, x - p.foot);
    return p;
}

SegmentProjection project_to_segment(const Vec2& x, const Vec2& a, const Vec2& b)
{
    const Vec2 d = b - a;
    const double dd = d.squaredNorm();
    double t = dd > 0.0 ? (x - a).dot(d) / dd : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    SegmentProjection p;
    p.t = t;
    p.foot = t == 0.0 ? a : (t == 1.0 ? b : Vec2(a + t * d));
    p.dist = (x - p.foot).norm();
    return p;
}

Polygon::Polygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices))
{
    cumulative_.assign(vertices_.size() + 1, 0.0);
    for (int i = 0; i < size(); ++i)
        cumulative_[static_cast<size_t>(i) + 1] = cumulative_[static_cast<size_t>(i)] + (edge_end(i) - edge_start(i)).norm();
    if (vertices_.empty()) return;
    box_ = {vertices_.front(), vertices_.front()};
    for (const auto& v : vertices_) {
        box_.lo = box_.lo.cwiseMin(v);
        box_.hi = box_.hi.cwiseMax(v);
    }
}

int Polygon::wrap(int i) const
{
    const int n = size();
    return ((i % n) + n) % n;
}

double Polygon::signed_area() const
{
    double area = 0.0;
    for (int i = 0; i < size(); ++i) {
        const Vec2& p = edge_start(i);
        const Vec2& q = edge_end(i);
        area += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * area;
}

namespace {

double orient(const Vec2& a, const Vec2& b, const Vec2& c)
{
    return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p)
{
    return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x())
        && std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

} // namespace

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2)
{
    const double d1 = orient(q1, q2, p1);
    const double d2 = orient(q1, q2, p2);
    const double d3 = orient(p1, p2, q1);
    const double d4 = orient(p1, p2, q2);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    if (d1 == 0 && on_segment(q1, q2, p1)) return true;
    if (d2 == 0 && on_segment(q1, q2, p2)) return true;
    if (d3 == 0 && on_segment(p1, p2, q1)) return true;
    if (d4 == 0 && on_segment(p1, p2, q2)) return true;
    return false;
}

bool Polygon::is_simple() const
{
    const int n = size();
    if (n < 3) return false;
    for (int i = 0; i < n; ++i) {
        if ((edge_end(i) - edge_start(i)).squaredNorm() == 0.0) return false;
        for (int j = i + 1; j < n; ++j) {
            const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if (adjacent) {
                // Adjacent edges may only share their common vertex.
                const int shared = (j == i + 1) ? j : i;
                const int far_i = (j == i + 1) ? i : i + 1;
                const int far_j = (j == i + 1) ? j + 1 : j;
                const Vec2& s = vertex(shared);
                if (std::abs(orient(s, vertex(far_i), vertex(far_j))) == 0.0
                    && (vertex(far_i) - s).dot(vertex(far_j) - s) > 0.0)
                    return false; // folds back onto itself
                continue;
            }
            if (segments_intersect(edge_start(i), edge_end(i), edge_start(j), edge_end(j)))
                return false;
        }
    }
    return true;
}

double Polygon::arclength(int e, double t) const
{
    const int i = wrap(e);
    const double len = cumulative_[static_cast<size_t>(i) + 1] - cumulative_[static_cast<size_t>(i)];
    return cumulative_[static_cast<size_t>(i)] + t * len;
}

double Polygon::boundary_distance(const Vec2& x) const
{
    double best = std::numeric_limits<double>::infinity();
    for (int e = 0; e < size(); ++e)
        best = std::min(best, project_to_segment(x, edge_start(e), edge_end(e)).dist);
    return best;
}

bool Polygon::contains(const Vec2& x) const
{
    bool inside = false;
    for (int e = 0; e < size(); ++e) {
        const Vec2& a = edge_start(e);
        const Vec2& b = edge_end(e);
        const double o = orient(a, b, x);
        if (o == 0.0 && on_segment(a, b, x)) return false;
        if ((a.y() > x.y()) != (b.y() > x.y())) {
            const double xc = a.x() + (x.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
            if (x.x() < xc) inside = !inside;
        }
    }
    return inside;
}

bool Polygon::segment_clear(const Vec2& a, const Vec2& b) const
{
    for (int e = 0; e < size(); ++e)
        if (segments_intersect(a, b, edge_start(e), edge_end(e))) return false;
    return true;
}

EdgeIndex::EdgeIndex(const Polygon& poly, const Mat2& metric, double tau, int cells)
    : metric_(metric), box_(poly.bbox()), cells_(cells)
{
    const Vec2 pad = 1e-9 * Vec2::Ones() * std::max(1.0, box_.extent().maxCoeff());
    box_.lo -= pad;
    box_.hi += pad;
    cell_size_ = box_.extent() / static_cast<double>(cells_);
    offsets_.assign(static_cast<size_t>(cells_) * cells_ + 1, 0);
    const double radius = 0.5 * std::max(metric_norm(metric_, cell_size_),
                                         metric_norm(metric_, Vec2(cell_size_.x(), -cell_size_.y())));
    std::vector<double> dist(static_cast<size_t>(poly.size()));
    for (int j = 0; j < cells_; ++j) {
        for (int i = 0; i < cells_; ++i) {
            const Vec2 c = box_.lo + Vec2((i + 0.5) * cell_size_.x(), (j + 0.5) * cell_size_.y());
            double best = std::numeric_limits<double>::infinity();
            for (int e = 0; e < poly.size(); ++e) {
                dist[static_cast<size_t>(e)] = project_to_segment(c, poly.edge_start(e), poly.edge_end(e), metric_).dist;
                best = std::min(best, dist[static_cast<size_t>(e)]);
            }
            const double limit = (best + radius) * (1.0 + tau) + radius;
            const double slack = 1e-12 * std::max(1.0, limit);
            for (int e = 0; e < poly.size(); ++e)
                if (dist[static_cast<size_t>(e)] <= limit + slack) edges_.push_back(e);
            offsets_[static_cast<size_t>(j * cells_ + i) + 1] = static_cast<int>(edges_.size());
        }
    }
}

int EdgeIndex::cell_of(const Vec2& x) const
{
    const Vec2 r = (x - box_.lo).cwiseQuotient(cell_size_);
    const int i = std::clamp(static_cast<int>(std::floor(r.x())), 0, cells_ - 1);
    const int j = std::clamp(static_cast<int>(std::floor(r.y())), 0, cells_ - 1);
    return j * cells_ + i;
}

std::span<const int> EdgeIndex::candidates(const Vec2& x) const
{
    const int c = cell_of(x);
    const auto begin = static_cast<size_t>(offsets_[static_cast<size_t>(c)]);
    const auto end = static_cast<size_t>(offsets_[static_cast<size_t>(c) + 1]);
    return {edges_.data() + begin, end - begin};
}

} // namespace sigflow
