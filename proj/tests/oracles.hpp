#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the solvers it checks.

#include "sigflow/linalg.hpp"
#include "sigflow/metric.hpp"
#include "sigflow/polygon.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <vector>

namespace oracle {

using sigflow::Mat2;
using sigflow::Vec2;

inline double quad_inv(const Mat2& a, const Vec2& q)
{
    return q.dot(a.inverse() * q);
}

// Minimum of <A^-1 q, q> over the hull of gens by coarse-to-fine grid search.
// In the plane the minimiser lies on a triangle (or segment) of generators, so every
// triple is searched on its own 2-simplex: a full grid at 1e-2, then windows of two
// cells around the incumbent at 1e-3 and finally `finest`.
inline double simplex_grid_min(const std::vector<Vec2>& gens, const Mat2& a, double finest = 1e-4)
{
    const Mat2 ainv = a.inverse();
    const int n = static_cast<int>(gens.size());
    double best = std::numeric_limits<double>::infinity();
    auto value = [&](const Vec2& q) { return q.dot(ainv * q); };
    for (int i = 0; i < n; ++i) best = std::min(best, value(gens[static_cast<size_t>(i)]));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j; k < n; ++k) {
                // k == j searches the segment (i, j).
                const Vec2& p0 = gens[static_cast<size_t>(i)];
                const Vec2& p1 = gens[static_cast<size_t>(j)];
                const Vec2& p2 = gens[static_cast<size_t>(k)];
                double cu = 1.0 / 3.0, cv = 1.0 / 3.0, step = 1e-2;
                double lo_u = 0.0, hi_u = 1.0, lo_v = 0.0, hi_v = 1.0;
                double local = std::numeric_limits<double>::infinity();
                while (true) {
                    const long nu = std::lround((hi_u - lo_u) / step);
                    const long nv = std::lround((hi_v - lo_v) / step);
                    for (long a_ = 0; a_ <= nu; ++a_)
                        for (long b_ = 0; b_ <= nv; ++b_) {
                            const double u = lo_u + a_ * step;
                            const double v = lo_v + b_ * step;
                            if (u < -1e-15 || v < -1e-15 || u + v > 1.0 + 1e-12) continue;
                            const double w = std::max(0.0, 1.0 - u - v);
                            const double f = value(w * p0 + u * p1 + v * p2);
                            if (f < local) {
                                local = f;
                                cu = u;
                                cv = v;
                            }
                        }
                    if (step <= finest * 1.0000001) break;
                    const double next = std::max(finest, step / 10.0);
                    lo_u = std::max(0.0, cu - 2 * step);
                    hi_u = std::min(1.0, cu + 2 * step);
                    lo_v = std::max(0.0, cv - 2 * step);
                    hi_v = std::min(1.0, cv + 2 * step);
                    step = next;
                }
                best = std::min(best, local);
            }
    return best;
}

// Distance from x to the boundary by dense uniform sampling of every edge.
inline double sampled_boundary_distance(const sigflow::Polygon& poly, const Vec2& x, int samples_total)
{
    const double per_len = samples_total / poly.perimeter();
    double best = std::numeric_limits<double>::infinity();
    for (int e = 0; e < poly.size(); ++e) {
        const Vec2 a = poly.edge_start(e);
        const Vec2 b = poly.edge_end(e);
        const int m = std::max(1, static_cast<int>(std::ceil((b - a).norm() * per_len)));
        for (int k = 0; k < m; ++k) best = std::min(best, (x - (a + (b - a) * (double(k) / m))).norm());
    }
    return best;
}

// Number of boundary edges whose Euclidean projection of x is within rel of the minimum,
// after merging projections closer than merge apart (shared vertices).
inline int projection_count(const sigflow::Polygon& poly, const Vec2& x, double rel, double merge)
{
    std::vector<std::pair<double, Vec2>> proj;
    double best = std::numeric_limits<double>::infinity();
    for (int e = 0; e < poly.size(); ++e) {
        const Vec2 a = poly.edge_start(e);
        const Vec2 d = poly.edge_end(e) - a;
        const double t = std::clamp((x - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
        const Vec2 foot = a + t * d;
        const double dist = (x - foot).norm();
        proj.emplace_back(dist, foot);
        best = std::min(best, dist);
    }
    std::vector<Vec2> kept;
    for (const auto& [dist, foot] : proj) {
        if (dist > best * (1.0 + rel)) continue;
        bool dup = false;
        for (const auto& k : kept) dup = dup || (k - foot).norm() <= merge;
        if (!dup) kept.push_back(foot);
    }
    return static_cast<int>(kept.size());
}

// Boundary distance on the square [-r, r]^2 by Dijkstra over a uniform grid with spacing h,
// using every primitive step (i, j) with max(|i|, |j|) <= 3. Boundary nodes start at zero;
// steps are measured in the metric at their midpoint. Evaluates at the node nearest x.
struct SquareGridDistance {
    double r = 1.0;
    double h = 0.01;
    int n = 0;
    std::vector<double> d;
    double operator()(const Vec2& x) const
    {
        const int i = static_cast<int>(std::lround((x.x() + r) / h));
        const int j = static_cast<int>(std::lround((x.y() + r) / h));
        return d[static_cast<size_t>(j * n + i)];
    }
};

inline SquareGridDistance square_grid_distance(const sigflow::MetricField& metric, double r, double h)
{
    const int n = static_cast<int>(std::lround(2.0 * r / h)) + 1;
    auto node = [&](int i, int j) { return Vec2(-r + i * h, -r + j * h); };
    std::vector<std::array<int, 2>> steps;
    for (int j = -3; j <= 3; ++j)
        for (int i = -3; i <= 3; ++i)
            if ((i != 0 || j != 0) && std::gcd(std::abs(i), std::abs(j)) == 1) steps.push_back({i, j});
    std::vector<double> d(static_cast<size_t>(n) * n, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (i == 0 || j == 0 || i == n - 1 || j == n - 1) {
                d[static_cast<size_t>(j * n + i)] = 0.0;
                queue.emplace(0.0, j * n + i);
            }
    while (!queue.empty()) {
        const auto [du, u] = queue.top();
        queue.pop();
        if (du > d[static_cast<size_t>(u)]) continue;
        const int i = u % n, j = u / n;
        for (const auto& [si, sj] : steps) {
            const int a = i + si, b = j + sj;
            if (a <= 0 || b <= 0 || a >= n - 1 || b >= n - 1) continue;
            const Vec2 p = node(i, j), q = node(a, b);
            const double w = sigflow::metric_norm(metric.at(0.5 * (p + q)), q - p);
            double& dv = d[static_cast<size_t>(b * n + a)];
            if (du + w < dv) {
                dv = du + w;
                queue.emplace(dv, b * n + a);
            }
        }
    }
    return {r, h, n, std::move(d)};
}

} // namespace oracle
