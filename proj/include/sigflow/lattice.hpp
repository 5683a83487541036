#pragma once

#include "sigflow/metric.hpp"
#include "sigflow/polygon.hpp"

#include <array>
#include <span>
#include <utility>
#include <vector>

namespace sigflow {

// Regular node lattice over the polygon's bounding box with a 16-neighbour stencil.
// Edge weights are segment lengths under the metric evaluated at the segment midpoint;
// an edge exists only when both nodes are interior and the segment stays inside.
class Lattice {
public:
    static constexpr int stencil_size = 16;
    static constexpr std::array<std::array<int, 2>, stencil_size> stencil{{
        {1, 0}, {0, 1}, {-1, 0}, {0, -1}, {1, 1}, {-1, 1}, {-1, -1}, {1, -1},
        {2, 1}, {1, 2}, {-1, 2}, {-2, 1}, {-2, -1}, {-1, -2}, {1, -2}, {2, -1},
    }};

    Lattice(const Polygon& poly, const MetricField& metric, double h);

    double h() const { return h_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int size() const { return nx_ * ny_; }
    const Vec2& origin() const { return origin_; }
    int index(int i, int j) const { return j * nx_ + i; }
    Vec2 node(int idx) const { return origin_ + h_ * Vec2(idx % nx_, idx / nx_); }
    bool valid(int idx) const { return valid_[static_cast<size_t>(idx)] != 0; }
    // Euclidean distance from the node to the polygon boundary.
    double clearance(int idx) const { return clearance_[static_cast<size_t>(idx)]; }
    // Weight of stencil edge k out of idx; negative when the edge does not exist.
    double weight(int idx, int k) const { return weights_[static_cast<size_t>(idx) * stencil_size + static_cast<size_t>(k)]; }
    int neighbor(int idx, int k) const { return idx + stencil[static_cast<size_t>(k)][1] * nx_ + stencil[static_cast<size_t>(k)][0]; }

    // Multi-source label-setting shortest paths. parent may be null.
    std::vector<double> shortest_paths(std::span<const std::pair<int, double>> sources, std::vector<int>* parent,
                                       int target = -1) const;

private:
    double h_;
    int nx_ = 0;
    int ny_ = 0;
    Vec2 origin_;
    std::vector<char> valid_;
    std::vector<double> clearance_;
    std::vector<double> weights_;
};

// Lattice-geodesic distance to the boundary, seeded near the boundary with the exact
// distance under the frozen local metric.
class LatticeField {
public:
    struct Candidate {
        Vec2 foot;
        double cost = 0.0;
        double arclength = 0.0;
        int edge = -1;
        int node = -1; // -1: direct projection of the query point
    };

    struct Path {
        std::vector<Vec2> points;
        std::vector<double> cumulative; // metric length from the start
        double length() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
        Vec2 at_fraction(double f) const;
    };

    LatticeField(const Polygon& poly, const MetricField& metric, double h);

    const Lattice& lattice() const { return lattice_; }
    const Polygon& polygon() const { return poly_; }
    const MetricField& metric() const { return metric_; }
    double h() const { return lattice_.h(); }

    double node_distance(int idx) const { return dist_[static_cast<size_t>(idx)]; }
    int parent(int idx) const { return parent_[static_cast<size_t>(idx)]; }
    const Vec2& foot(int idx) const { return foot_[static_cast<size_t>(idx)]; }
    double foot_arclength(int idx) const { return foot_s_[static_cast<size_t>(idx)]; }
    int foot_edge(int idx) const { return foot_edge_[static_cast<size_t>(idx)]; }

    // Interpolated boundary distance: bilinear away from the boundary, direct near it.
    double value(const Vec2& x) const;
    // Paths into x from the surrounding nodes (plus direct projections near the boundary).
    std::vector<Candidate> candidates(const Vec2& x) const;
    // Cheapest candidate whose foot lies within `window` (boundary arclength) of `arclength`;
    // infinity when there is none.
    double cost_near(const Vec2& x, double arclength, double window) const;
    // Point `steps` parent links down from node, or its foot when the chain ends first.
    Vec2 path_anchor(int node, int steps) const;
    // Node-to-node lattice geodesic.
    Path geodesic(int from, int to) const;
    int nearest_valid_node(const Vec2& x) const;

private:
    struct Direct {
        Vec2 foot;
        double dist;
        double arclength;
        int edge;
    };
    std::vector<Direct> direct_projections(const Vec2& x, const Mat2& a) const;

    Polygon poly_;
    MetricField metric_;
    Lattice lattice_;
    EdgeIndex euclid_index_;
    std::vector<double> dist_;
    std::vector<int> parent_;
    std::vector<Vec2> foot_;
    std::vector<double> foot_s_;
    std::vector<int> foot_edge_;
};

double lattice_diameter(const Polygon& poly, const MetricField& metric, double h);

} // namespace sigflow
