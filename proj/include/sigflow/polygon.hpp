#pragma once

#include "sigflow/linalg.hpp"

#include <span>
#include <vector>

namespace sigflow {

struct BoundingBox {
    Vec2 lo;
    Vec2 hi;
    Vec2 extent() const { return hi - lo; }
};

// Closest point of segment [a, b] to x in the metric <m ., .>.
struct SegmentProjection {
    Vec2 foot;
    double t = 0.0; // foot = a + t (b - a), t in [0, 1]
    double dist = 0.0;
};

SegmentProjection project_to_segment(const Vec2& x, const Vec2& a, const Vec2& b, const Mat2& m);
SegmentProjection project_to_segment(const Vec2& x, const Vec2& a, const Vec2& b);

// Closed polygon given by its vertex loop; edge i joins vertex i to vertex i+1 (mod n).
// Construction does not validate; see Scene for the invariants.
class Polygon {
public:
    Polygon() = default;
    explicit Polygon(std::vector<Vec2> vertices);

    int size() const { return static_cast<int>(vertices_.size()); }
    const std::vector<Vec2>& vertices() const { return vertices_; }
    const Vec2& vertex(int i) const { return vertices_[static_cast<size_t>(wrap(i))]; }
    // e in [0, size())
    const Vec2& edge_start(int e) const { return vertices_[static_cast<size_t>(e)]; }
    const Vec2& edge_end(int e) const { return vertices_[e + 1 == size() ? 0 : static_cast<size_t>(e) + 1]; }
    int wrap(int i) const;

    double signed_area() const;
    bool is_simple() const;
    double perimeter() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
    // Arclength position of edge e at parameter t, measured from vertex 0.
    double arclength(int e, double t) const;
    const BoundingBox& bbox() const { return box_; }

    // Euclidean distance from x to the boundary.
    double boundary_distance(const Vec2& x) const;
    // Strict interior test; points on the boundary are outside.
    bool contains(const Vec2& x) const;
    // True when the open segment (a, b) does not meet the boundary.
    bool segment_clear(const Vec2& a, const Vec2& b) const;

private:
    std::vector<Vec2> vertices_;
    std::vector<double> cumulative_; // cumulative_[i] = arclength at vertex i; back() = perimeter
    BoundingBox box_{Vec2::Zero(), Vec2::Zero()};
};

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2);

// Uniform-cell acceleration for nearest-edge queries in a constant metric.
// For every cell the candidate list holds all edges that can lie within
// (1 + tau) of the boundary distance from any point of the cell.
class EdgeIndex {
public:
    EdgeIndex() = default;
    EdgeIndex(const Polygon& poly, const Mat2& metric, double tau, int cells = 128);

    std::span<const int> candidates(const Vec2& x) const;
    const Mat2& metric() const { return metric_; }

private:
    int cell_of(const Vec2& x) const;

    Mat2 metric_ = Mat2::Identity();
    BoundingBox box_{};
    int cells_ = 0;
    Vec2 cell_size_ = Vec2::Zero();
    std::vector<int> offsets_;
    std::vector<int> edges_;
};

} // namespace sigflow
